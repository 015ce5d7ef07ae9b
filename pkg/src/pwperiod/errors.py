"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`PwPeriodError`.
The CLI maps :class:`ConfigInvalid` to exit status 2 and every
:class:`AnalysisError` to exit status 3.
"""


class PwPeriodError(Exception):
    """Base class for package errors."""

    kind = "error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class ConfigInvalid(PwPeriodError):
    kind = "config_invalid"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    def to_json(self) -> dict:
        out = super().to_json()
        if self.field is not None:
            out["field"] = self.field
        return out


class AnalysisError(PwPeriodError):
    kind = "analysis_error"


# series
class NonzeroConstantInner(AnalysisError):
    kind = "nonzero_constant_inner"


class NotInvertible(AnalysisError):
    kind = "not_invertible"


# potential
class OutOfDomain(AnalysisError):
    kind = "out_of_domain"


# expansion
class NotACenter(AnalysisError):
    kind = "not_a_center"


class NotMonotoneBranch(AnalysisError):
    kind = "not_monotone_branch"


class UnsupportedCase(AnalysisError):
    kind = "unsupported_case"


class NotMonodromic(AnalysisError):
    kind = "not_monodromic"


# quadrature
class NoTurningPoint(AnalysisError):
    kind = "no_turning_point"


class InvalidSide(AnalysisError):
    kind = "invalid_side"


class NonSimpleTurningPoint(AnalysisError):
    kind = "non_simple_turning_point"


class NotDegenerate(AnalysisError):
    kind = "not_degenerate"


# simulate
class EventNotBracketed(AnalysisError):
    kind = "event_not_bracketed"


class MaxStepsExceeded(AnalysisError):
    kind = "max_steps_exceeded"


class EscapedDomain(AnalysisError):
    kind = "escaped_domain"
