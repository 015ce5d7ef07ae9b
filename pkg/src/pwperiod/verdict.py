"""Isochronicity verdicts.

Combines the case classification with either the exact period constants
(finite-period cases) or the numerical divergence exponent (cases where the
period blows up at the center) into a single certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import AnalysisError
from .exact import ExactNumber
from .expansion import (
    AllZeroUpToN,
    Omega,
    coupled_expansion,
    first_nonzero_constant,
    omega_of,
)
from .potential import PiecewiseSystem, Side, classify_system
from .quadrature import divergence_probe
from .series import DEFAULT_ORDER


def _fmt(x: float) -> str:
    return format(x, ".17g")


# -- evidence -------------------------------------------------------------------


@dataclass(frozen=True)
class FirstNonzeroConstant:
    index: int
    value: ExactNumber
    power: Fraction = Fraction(1)

    def to_json(self) -> dict:
        return {"kind": "first_nonzero_constant", "index": self.index, "value": self.value.to_json(),
                "power": str(self.power), "approx": _fmt(float(self.value))}


@dataclass(frozen=True)
class DivergentPeriodAtOrigin:
    case: str
    predicted_exponent: float
    fitted_exponent: float

    def to_json(self) -> dict:
        return {"kind": "divergent_period_at_origin", "case": self.case,
                "predicted_exponent": _fmt(self.predicted_exponent),
                "fitted_exponent": _fmt(self.fitted_exponent)}


@dataclass(frozen=True)
class PeriodVanishesAtOrigin:
    leading: ExactNumber
    first: ExactNumber

    def to_json(self) -> dict:
        return {"kind": "period_vanishes_at_origin", "leading": self.leading.to_json(),
                "T1": self.first.to_json()}


Evidence = FirstNonzeroConstant | DivergentPeriodAtOrigin | PeriodVanishesAtOrigin


# -- verdict variants -------------------------------------------------------------


@dataclass(frozen=True)
class NotIsochronous:
    evidence: Evidence
    case: str
    order: int

    def to_json(self) -> dict:
        return {"verdict": "not_isochronous", "evidence": self.evidence.to_json(),
                "case": self.case, "order": self.order}


@dataclass(frozen=True)
class IsochronousLinearCase:
    omega_minus: Omega
    omega_plus: Omega
    case: str
    order: int

    def to_json(self) -> dict:
        return {"verdict": "isochronous_linear_case", "omega_minus": self.omega_minus.to_json(),
                "omega_plus": self.omega_plus.to_json(), "case": self.case, "order": self.order}


@dataclass(frozen=True)
class UndeterminedUpToOrder:
    order: int
    case: str | None = None
    diagnostic: str | None = None

    def to_json(self) -> dict:
        out = {"verdict": "undetermined_up_to_order", "order": self.order, "case": self.case}
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


@dataclass(frozen=True)
class NotMonodromic:
    reason: str

    def to_json(self) -> dict:
        return {"verdict": "not_monodromic", "reason": self.reason}


IsochronyVerdict = NotIsochronous | IsochronousLinearCase | UndeterminedUpToOrder | NotMonodromic


def verdict_json(v: IsochronyVerdict) -> str:
    """Canonical serialization (sorted keys) so reruns are byte-identical."""
    return json.dumps(v.to_json(), sort_keys=True)


def verdict(sys: PiecewiseSystem, N: int = DEFAULT_ORDER, rho_grid=None) -> IsochronyVerdict:
    """Certify (or fail to certify) non-isochronicity of the center at the origin."""
    case = classify_system(sys)
    if not case.monodromic:
        return NotMonodromic(case.reason)
    try:
        if case.divergent:
            fit = divergence_probe(case.flat_potential, Side.LEFT, rho_grid)
            return NotIsochronous(DivergentPeriodAtOrigin(case.case, fit.predicted_exponent, fit.fitted_exponent),
                                  case.case, N)
        exp = coupled_expansion(sys, N, case)
    except AnalysisError as exc:
        return UndeterminedUpToOrder(N, case.case, "%s: %s" % (type(exc).__name__, exc))

    if case.case == "iv" and exp.leading.is_zero():
        return NotIsochronous(PeriodVanishesAtOrigin(exp.leading, exp.coeffs[1]), case.case, N)
    found = first_nonzero_constant(exp)
    if not isinstance(found, AllZeroUpToN):
        return NotIsochronous(FirstNonzeroConstant(found.index, found.value, found.power), case.case, N)
    if sys.v_minus.is_pure_quadratic() and sys.v_plus.is_pure_quadratic():
        return IsochronousLinearCase(omega_of(sys.v_minus), omega_of(sys.v_plus), case.case, N)
    return UndeterminedUpToOrder(N, case.case, "period constants vanish up to order %d" % found.order)
