"""Period-constant engines.

Everything here is exact. Three building blocks:

* :func:`z_substitution` -- the normalizing change of variable ``x = x(z)``
  with ``V(x(z)) = omega^2 z^2``.
* :func:`center_half_period_series` -- time spent on the arc between the two
  turning points of a nondegenerate center, ``pi/(sqrt2 omega) (1 + sum T2i h^i)``.
* :func:`branch_time_series` -- time from x = 0 to one turning point along a
  single monotone branch (tangency side or one half of a center), obtained by
  integrating the inverse branch termwise against ``1/sqrt(2(h - u))``. Every
  moment is a Beta integral with a rational or rational-times-pi value.

:func:`coupled_expansion` assembles the two sides of a piecewise system in the
crossing coordinate appropriate to its topology.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable

from .errors import NotACenter, NotMonodromic, NotMonotoneBranch, UnsupportedCase
from .exact import ZERO, ZERO_TEST_REASON, ExactNumber
from .potential import (
    CenterCase,
    NondegenerateCenter,
    PiecewiseSystem,
    Potential,
    Side,
    Tangency,
    Topology,
    classify_side,
    classify_system,
)
from .series import (
    DEFAULT_ORDER,
    TruncatedSeries,
    series_compose,
    series_reversion,
    series_sqrt1p,
)


class Param(str, enum.Enum):
    ENERGY = "energy"
    X_CROSSING = "x-crossing"
    Y_CROSSING = "y-crossing"


@dataclass(frozen=True)
class PeriodExpansion:
    """``sum_k coeffs[k] * p**(k * power_step)`` in the parameter ``p``.

    ``coeffs[0]`` is the leading term (limit of the period at the center);
    ``coeffs[1:]`` are the period constants. Energy expansions of single
    branches carry half-integer powers, signalled by ``power_step = 1/2``.
    """

    param: Param
    coeffs: tuple[ExactNumber, ...]
    power_step: Fraction = Fraction(1)
    case: str | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> ExactNumber:
        return self.coeffs[0]

    @property
    def constants(self) -> tuple[ExactNumber, ...]:
        return self.coeffs[1:]

    def component(self, key: tuple[str, int]) -> TruncatedSeries:
        """Rational series of the coefficients along one basis element."""
        return TruncatedSeries.from_coeffs([c.as_dict().get(key, 0) for c in self.coeffs], self.order, self.param.value)

    def rational_series(self) -> TruncatedSeries:
        return self.component(("sqrt", 1))

    def __add__(self, other: "PeriodExpansion") -> "PeriodExpansion":
        if self.param != other.param or self.power_step != other.power_step:
            raise ValueError("cannot add expansions in different parametrizations")
        n = min(self.order, other.order)
        return PeriodExpansion(self.param, tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)),
                               self.power_step, self.case, self.notes + other.notes)

    def scaled(self, q) -> "PeriodExpansion":
        return PeriodExpansion(self.param, tuple(c * q for c in self.coeffs), self.power_step, self.case, self.notes)

    def evaluate(self, p: float) -> float:
        step = float(self.power_step)
        return math.fsum(float(c) * p ** (k * step) for k, c in enumerate(self.coeffs) if not c.is_zero())

    def to_json(self) -> dict:
        out = {
            "param": self.param.value,
            "power_step": str(self.power_step),
            "order": self.order,
            "leading": self.leading.to_json_object(),
            "constants": [c.to_json() for c in self.constants],
            "exact": True,
        }
        if self.case is not None:
            out["case"] = self.case
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PeriodExpansion":
        coeffs = [ExactNumber.from_json(data["leading"])] + [ExactNumber.from_json(c) for c in data["constants"]]
        return cls(Param(data["param"]), tuple(coeffs), Fraction(data.get("power_step", "1")),
                   data.get("case"), tuple(data.get("notes", ())))


# -- omega -------------------------------------------------------------------


@dataclass(frozen=True)
class Omega:
    """omega = sqrt(c_2), exact when c_2 is a rational square."""

    squared: Fraction
    value: float
    exact: Fraction | None
    error_bound: float

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        return {"omega_sq": str(self.squared), "omega": repr(self.value),
                "exact": None if self.exact is None else str(self.exact), "error_bound": self.error_bound}


def omega_of(V: Potential) -> Omega:
    side = classify_side(V, Side.RIGHT)
    if not isinstance(side, NondegenerateCenter):
        raise NotACenter("omega needs c1 = 0 and c2 > 0 (side is %s)" % side.kind)
    c2 = side.omega_sq
    num, den = math.isqrt(c2.numerator), math.isqrt(c2.denominator)
    if num * num == c2.numerator and den * den == c2.denominator:
        w = Fraction(num, den)
        return Omega(c2, float(w), w, 0.0)
    value = math.sqrt(c2)
    with localcontext() as ctx:
        ctx.prec = 50
        true = (Decimal(c2.numerator) / Decimal(c2.denominator)).sqrt()
        err = abs(Decimal(value) - true)
    # round the bound up so it certifies the float
    return Omega(c2, value, None, float(err) * (1 + 1e-12) + 1e-300)


# -- exact Beta/Gamma ratios -------------------------------------------------


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def gamma_ratio(i: int) -> Fraction:
    """Gamma(i + 3/2) / (sqrt(pi) Gamma(i + 1)) = (2i+1)!! / (2^(i+1) i!)."""
    return Fraction(_double_factorial(2 * i + 1), 2 ** (i + 1) * math.factorial(i))


def beta_half_integer(i: int) -> Fraction:
    """B(i + 1/2, 1/2) / pi = (2i-1)!! / (2^i i!)."""
    return Fraction(_double_factorial(2 * i - 1), 2 ** i * math.factorial(i))


def beta_integer(j: int) -> Fraction:
    """B(j, 1/2) = (j-1)! 2^j / (2j-1)!!, j >= 1."""
    return Fraction(math.factorial(j - 1) * 2 ** j, _double_factorial(2 * j - 1))


# -- z-substitution and the center arc ----------------------------------------


def z_substitution(V: Potential, N: int = DEFAULT_ORDER) -> TruncatedSeries:
    """x(z) = z + sum_{i>=2} b_i z^i with V(x(z)) = omega^2 z^2 (omega^2 = c_2)."""
    if not isinstance(classify_side(V, Side.RIGHT), NondegenerateCenter):
        raise NotACenter("z-substitution needs c1 = 0 and c2 > 0")
    z_of_x = _z_of_x(V, N)
    return series_reversion(z_of_x).with_var("z")


def _z_of_x(V: Potential, N: int) -> TruncatedSeries:
    # z = x sqrt(V / (c2 x^2)) = x sqrt(1 + u)
    c2 = V.coeff(2)
    u = TruncatedSeries.from_coeffs([0] + [V.coeff(k) / c2 for k in range(3, N + 2)], N - 1, "x")
    root = series_sqrt1p(u)
    return TruncatedSeries.from_coeffs((Fraction(0),) + root.coeffs, N, "x")


def half_period_constants(V: Potential, N: int = DEFAULT_ORDER) -> list[Fraction]:
    """Relative constants [1, T~2, T~4, ..., T~2N] of the center arc."""
    b = z_substitution(V, 2 * N + 1)
    c2 = V.coeff(2)
    out = [Fraction(1)]
    for i in range(1, N + 1):
        out.append(2 * gamma_ratio(i) * b[2 * i + 1] / c2 ** i)
    return out


def center_half_period_series(V: Potential, N: int = DEFAULT_ORDER) -> PeriodExpansion:
    """Time between the two turning points, as a series in the energy h.

    T~(h) = pi/(sqrt2 omega) * (1 + sum_{i=1}^{N} T~_{2i} h^i); only the
    odd-indexed b's of the z-substitution contribute.
    """
    rel = half_period_constants(V, N)
    c2 = V.coeff(2)
    coeffs = tuple(ExactNumber.pi_over_sqrt2_omega(c2, q) for q in rel)
    return PeriodExpansion(Param.ENERGY, coeffs, Fraction(1))


# -- single branches -----------------------------------------------------------


def branch_time_series(V: Potential, side: Side, N: int = DEFAULT_ORDER) -> PeriodExpansion:
    """t(h) = int_0^{x_t(h)} dx / sqrt(2 (h - V(x))) along one monotone branch.

    Returned in powers h^(k/2), k = 0..N. A tangency side has only
    half-integer powers; a center branch mixes both.
    """
    side = Side(side)
    behavior = classify_side(V, side)
    if isinstance(behavior, Tangency):
        coeffs = _tangency_branch(V, N)
    elif isinstance(behavior, NondegenerateCenter):
        coeffs = _center_branch(V, side, N)
    elif behavior.admissible:
        raise UnsupportedCase("%s side has no expansion in powers of sqrt(h) (period diverges)" % behavior.kind)
    else:
        raise NotMonotoneBranch(behavior.reason)
    return PeriodExpansion(Param.ENERGY, tuple(coeffs), Fraction(1, 2))


def _tangency_branch(V: Potential, N: int) -> list[ExactNumber]:
    K = (N + 1) // 2
    c1 = V.coeff(1)
    inverse = series_reversion(V.series(max(K, 1), "u"))
    sgn = 1 if c1 > 0 else -1
    coeffs = [ZERO] * (N + 1)
    for k in range(1, K + 1):
        # int_0^h u^(k-1)/sqrt(2(h-u)) du = B(k, 1/2) h^(k-1/2) / sqrt2
        q = sgn * k * inverse[k] * beta_integer(k)
        coeffs[2 * k - 1] = ExactNumber.sqrt(Fraction(1, 2), q)
    return coeffs


def _center_branch(V: Potential, side: Side, N: int) -> list[ExactNumber]:
    b = z_substitution(V, N + 1)
    c2 = V.coeff(2)
    s = side.sign
    coeffs = [ZERO] * (N + 1)
    for k in range(1, N + 2):
        if b[k] == 0:
            continue
        sign = s ** (k + 1)
        if k % 2:
            i = (k - 1) // 2
            q = sign * b[k] * Fraction(k, 2) * beta_half_integer(i) / c2 ** i
            coeffs[k - 1] = ExactNumber.pi_over_sqrt2_omega(c2, q)
        else:
            j = k // 2
            q = sign * b[k] * j * beta_integer(j) / c2 ** j
            coeffs[k - 1] = ExactNumber.sqrt(Fraction(1, 2), q)
    return coeffs


def transit_time_series(V: Potential, side: Side, N: int = DEFAULT_ORDER) -> PeriodExpansion:
    """Full transit of one half-plane (out to the turning point and back): 2 t(h)."""
    return branch_time_series(V, side, N).scaled(2)


# -- reparametrizations ----------------------------------------------------------


def energy_to_crossing(exp: PeriodExpansion, param: Param = Param.Y_CROSSING) -> PeriodExpansion:
    """Substitute h = sigma^2 / 2 into an energy expansion.

    sigma is the crossing coordinate on the switching line (y0 for x = 0, and
    the x-crossing of the Hamiltonian x^2/2 + V(y) of a horizontal lower side).
    """
    if exp.param is not Param.ENERGY:
        raise ValueError("expected an energy expansion")
    if exp.power_step == 1:
        half = [ZERO] * (2 * exp.order + 1)
        for i, c in enumerate(exp.coeffs):
            half[2 * i] = c
        coeffs = half
    else:
        coeffs = list(exp.coeffs)
    out = []
    for k, c in enumerate(coeffs):
        if k % 2 == 0:
            out.append(c / 2 ** (k // 2))
        else:
            out.append(c.mul_sqrt(Fraction(1, 2)) / 2 ** ((k - 1) // 2))
    return PeriodExpansion(param, tuple(out), Fraction(1), exp.case, exp.notes)


def compose_exact(coeffs: Iterable[ExactNumber], inner: TruncatedSeries, order: int) -> list[ExactNumber]:
    """Substitute a rational series (zero constant term) into an ExactNumber series.

    `inner` must have valuation >= 1; the outer series is zero-padded to
    `order`, which is exact when the caller knows the outer terms beyond its
    order cannot reach `order`.
    """
    coeffs = list(coeffs)
    keys = sorted({k for c in coeffs for k, _ in c.terms})
    out = [ZERO] * (order + 1)
    for key in keys:
        outer = TruncatedSeries.from_coeffs([c.as_dict().get(key, 0) for c in coeffs], order)
        composed = series_compose(outer, inner.padded(order) if inner.order < order else inner.truncate(order))
        for k, q in enumerate(composed):
            if q:
                out[k] = out[k] + ExactNumber._from_dict({key: q})
    return out


# -- coupled systems ---------------------------------------------------------------


def coupled_expansion(sys: PiecewiseSystem, N: int = DEFAULT_ORDER, case: CenterCase | None = None) -> PeriodExpansion:
    """Period function of the coupled system near the center.

    * vertical, case (i): energy h, half-integer powers allowed;
    * vertical, cases (iv), (v): crossing y0 on x = 0 (h = y0^2/2);
    * horizontal_mixed: crossing x = a of the orbit entering the lower side at (a, 0);
    * horizontal, case (i): same x-crossing convention.
    """
    case = case or classify_system(sys)
    if not case.monodromic:
        raise NotMonodromic(case.reason)
    if not case.finite_period:
        raise UnsupportedCase("case (%s): the period diverges at the center; use the divergence probe" % case.case)

    if sys.topology is Topology.HORIZONTAL_MIXED:
        return _mixed_horizontal_expansion(sys, N)
    if sys.topology is Topology.HORIZONTAL:
        return _horizontal_centers_expansion(sys, N)

    left = transit_time_series(sys.v_minus, Side.LEFT, N)
    right = transit_time_series(sys.v_plus, Side.RIGHT, N)
    total = left + right
    if case.case == "i":
        return PeriodExpansion(Param.ENERGY, total.coeffs, Fraction(1, 2), "i")
    out = energy_to_crossing(total, Param.Y_CROSSING)
    notes: tuple[str, ...] = ()
    if case.case == "v":
        left_is_tangent = isinstance(classify_side(sys.v_minus, Side.LEFT), Tangency)
        tangential = energy_to_crossing(left if left_is_tangent else right)
        notes = _odd_constant_notes(out, tangential, "left tangency" if left_is_tangent else "right tangency")
    return PeriodExpansion(out.param, out.coeffs, out.power_step, case.case, notes)


def _odd_constant_notes(full: PeriodExpansion, tangential: PeriodExpansion, label: str) -> tuple[str, ...]:
    diffs = [k for k in range(1, full.order + 1, 2) if full.coeffs[k] != tangential.coeffs[k]]
    if not diffs:
        return ()
    return (
        "odd-order constants %s differ from the %s contribution alone: the center side is asymmetric "
        "and contributes odd powers of the crossing coordinate (tangential-only values: %s)"
        % (diffs, label, {k: str(tangential.coeffs[k]) for k in diffs}),
    )


def _mixed_horizontal_expansion(sys: PiecewiseSystem, N: int) -> PeriodExpansion:
    # lower side: Hamiltonian x^2/2 + V-(y); from (a, 0) to (-a, 0) at energy a^2/2
    lower = energy_to_crossing(transit_time_series(sys.v_minus, Side.LEFT, N), Param.X_CROSSING)
    # upper side: center arc from (-a, 0) at energy V+(-a)
    arc = center_half_period_series(sys.v_plus, N // 2)
    energy = sys.v_plus.mirrored().series(N, "a")
    upper = compose_exact(arc.coeffs, energy, N)
    coeffs = tuple(lower.coeffs[k] + upper[k] for k in range(N + 1))
    out = PeriodExpansion(Param.X_CROSSING, coeffs, Fraction(1), "theorem_a")
    notes = _odd_constant_notes(out, lower, "lower tangency")
    return PeriodExpansion(out.param, out.coeffs, out.power_step, out.case, notes)


def _horizontal_centers_expansion(sys: PiecewiseSystem, N: int) -> PeriodExpansion:
    # lower arc from (a, 0) to (a', 0) at energy V-(a); upper arc from a' at energy V+(a')
    lower_arc = center_half_period_series(sys.v_minus, N // 2)
    upper_arc = center_half_period_series(sys.v_plus, N // 2)
    e_low = sys.v_minus.series(N, "a")
    z_low = _z_of_x(sys.v_minus, N)
    x_low = series_reversion(z_low)
    a_prime = series_compose(x_low, -z_low)
    e_up = series_compose(sys.v_plus.series(N, "a"), a_prime)
    low = compose_exact(lower_arc.coeffs, e_low, N)
    up = compose_exact(upper_arc.coeffs, e_up, N)
    return PeriodExpansion(Param.X_CROSSING, tuple(low[k] + up[k] for k in range(N + 1)), Fraction(1), "i")


def horizontal_return_point(sys: PiecewiseSystem, N: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Return crossing b(a) of the half-return maps composed, as a series in a.

    Only for the horizontal topologies with center-type upper potential.
    """
    if sys.topology is Topology.HORIZONTAL_MIXED:
        mid = TruncatedSeries.from_coeffs([0, -1], N, "a")
    elif sys.topology is Topology.HORIZONTAL:
        z_low = _z_of_x(sys.v_minus, N)
        mid = series_compose(series_reversion(z_low), -z_low)
    else:
        raise UnsupportedCase("return point series only for horizontal topologies")
    z_up = _z_of_x(sys.v_plus, N)
    return series_compose(series_reversion(z_up), -series_compose(z_up, mid))


# -- certificates ---------------------------------------------------------------------


@dataclass(frozen=True)
class FirstNonzero:
    index: int
    value: ExactNumber
    power: Fraction

    def to_json(self) -> dict:
        return {"index": self.index, "value": self.value.to_json(), "power": str(self.power),
                "approx": float(self.value), "zero_test": ZERO_TEST_REASON}


@dataclass(frozen=True)
class AllZeroUpToN:
    order: int

    def to_json(self) -> dict:
        return {"all_zero_up_to": self.order, "zero_test": ZERO_TEST_REASON}


def first_nonzero_constant(exp: PeriodExpansion) -> FirstNonzero | AllZeroUpToN:
    """Smallest i >= 1 with T_i != 0, decided exactly."""
    for i, c in enumerate(exp.constants, start=1):
        if not c.is_zero():
            return FirstNonzero(i, c, i * exp.power_step)
    return AllZeroUpToN(exp.order)
