"""Polynomial potentials, piecewise systems and the center-type case table.

A :class:`Potential` is ``V(x) = sum_k c_k x^k`` with exact rational
coefficients and ``V(0) = 0``. Each side of the switching line is classified
by the sign and index of the first nonzero coefficient, which decides the
local behaviour of that half of the orbit:

=====================  ==================  =====================
first nonzero index    left (x < 0)        right (x > 0)
=====================  ==================  =====================
1                      c_1 < 0: tangency   c_1 > 0: tangency
2                      c_2 > 0: center     c_2 > 0: center
2r, r > 1              c > 0: degenerate   c > 0: degenerate
2r + 1                 c < 0: cusp         c > 0: cusp
=====================  ==================  =====================

Any other sign makes the side non-monodromic (:class:`Invalid`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import ConfigInvalid, OutOfDomain
from .series import TruncatedSeries

DEFAULT_DOMAIN_BOUND = 10.0


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        return -1 if self is Side.LEFT else 1

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class Topology(str, enum.Enum):
    VERTICAL = "vertical"                  # switching line x = 0, potentials on both sides
    HORIZONTAL = "horizontal"              # switching line y = 0, potentials above and below
    HORIZONTAL_MIXED = "horizontal_mixed"  # y = 0, upper potential + lower field (V-'(y), -x)


@dataclass(frozen=True, eq=True)
class Potential:
    """V(x) = sum_{k>=1} coeffs[k] x^k; ``coeffs[0]`` is always zero."""

    coeffs: tuple[Fraction, ...]
    domain_bound: float = DEFAULT_DOMAIN_BOUND

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs or cs[0] != 0:
            raise ConfigInvalid("potential must vanish at the origin (no degree-0 term)", "coeffs")
        if all(c == 0 for c in cs):
            raise ConfigInvalid("potential needs at least one nonzero coefficient", "coeffs")
        if not self.domain_bound > 0:
            raise ConfigInvalid("domain_bound must be positive", "domain_bound")
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_mapping(cls, coeffs: Mapping, domain_bound: float = DEFAULT_DOMAIN_BOUND) -> "Potential":
        """Build from ``{degree: coefficient}``; keys and values may be strings."""
        items = {}
        for k, v in coeffs.items():
            try:
                deg = int(k)
                val = Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12)
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid("bad potential coefficient %r: %r" % (k, v), "coeffs") from exc
            if deg < 0:
                raise ConfigInvalid("negative degree %d" % deg, "coeffs")
            if deg == 0 and val != 0:
                raise ConfigInvalid("potential must vanish at the origin (no degree-0 term)", "coeffs")
            items[deg] = items.get(deg, Fraction(0)) + val
        if not items:
            raise ConfigInvalid("potential needs at least one nonzero coefficient", "coeffs")
        dense = [Fraction(0)] * (max(items) + 1)
        for deg, val in items.items():
            dense[deg] = val
        return cls(tuple(dense), float(domain_bound))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Potential":
        return cls.from_mapping({degree: Fraction(coeff)})

    # -- queries --------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def flatness(self) -> int:
        """Index of the first nonzero coefficient."""
        return next(k for k, c in enumerate(self.coeffs) if c != 0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[self.flatness]

    def is_even(self) -> bool:
        return all(c == 0 for k, c in enumerate(self.coeffs) if k % 2)

    def is_pure_quadratic(self) -> bool:
        return self.degree == 2 and self.coeffs[1] == 0

    @property
    def float_coeffs(self) -> np.ndarray:
        """Ascending float coefficients (numpy.polynomial convention)."""
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, x):
        """Fast float evaluation, vectorised over numpy arrays."""
        return np.polynomial.polynomial.polyval(x, self.float_coeffs)

    def derivative_coeffs(self, order: int = 1) -> tuple[Fraction, ...]:
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * cs[k] for k in range(1, len(cs))] or [Fraction(0)]
        return tuple(cs)

    def dV(self, x):
        """Float evaluation of V'(x)."""
        return np.polynomial.polynomial.polyval(x, [float(c) for c in self.derivative_coeffs(1)])

    def mirrored(self) -> "Potential":
        """V(-x)."""
        return Potential(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)), self.domain_bound)

    def scaled(self, lam) -> "Potential":
        lam = Fraction(lam)
        return Potential(tuple(lam * c for c in self.coeffs), self.domain_bound)

    def series(self, order: int, var: str = "x") -> TruncatedSeries:
        return TruncatedSeries.from_coeffs(self.coeffs, order, var)

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "coeffs": {str(k): str(c) for k, c in enumerate(self.coeffs) if c != 0},
            "domain_bound": self.domain_bound,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Potential":
        if not isinstance(data, Mapping) or "coeffs" not in data:
            raise ConfigInvalid("potential needs a 'coeffs' mapping", "coeffs")
        if not isinstance(data["coeffs"], Mapping):
            raise ConfigInvalid("'coeffs' must map degree to coefficient", "coeffs")
        return cls.from_mapping(data["coeffs"], data.get("domain_bound", DEFAULT_DOMAIN_BOUND))


def eval_potential(V: Potential, x, derivative_order: int = 0):
    """Value of the `derivative_order`-th derivative of V at x.

    Exact (Fraction) for int/Fraction input, float otherwise.
    """
    if abs(float(x)) > V.domain_bound:
        raise OutOfDomain("|x| = %g exceeds domain bound %g" % (abs(float(x)), V.domain_bound))
    cs = V.derivative_coeffs(derivative_order)
    if isinstance(x, (int, Fraction)):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc
    acc = 0.0
    for c in reversed(cs):
        acc = acc * x + float(c)
    return acc


# -- side behaviours -------------------------------------------------------


@dataclass(frozen=True)
class SideBehavior:
    kind = "side"

    @property
    def flatness(self) -> int:
        raise NotImplementedError

    @property
    def admissible(self) -> bool:
        return True

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            out[name] = str(val) if isinstance(val, Fraction) else val
        return out


@dataclass(frozen=True)
class NondegenerateCenter(SideBehavior):
    omega_sq: Fraction
    kind = "nondegenerate_center"

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega_sq)

    @property
    def flatness(self) -> int:
        return 2

    @property
    def r(self) -> int:
        return 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "omega_sq": str(self.omega_sq), "omega": self.omega}


@dataclass(frozen=True)
class DegenerateCenter(SideBehavior):
    r: int
    coeff: Fraction
    kind = "degenerate_center"

    @property
    def flatness(self) -> int:
        return 2 * self.r


@dataclass(frozen=True)
class Cusp(SideBehavior):
    r: int
    coeff: Fraction
    kind = "cusp"

    @property
    def flatness(self) -> int:
        return 2 * self.r + 1


@dataclass(frozen=True)
class Tangency(SideBehavior):
    slope: Fraction
    kind = "tangency"

    @property
    def flatness(self) -> int:
        return 1


@dataclass(frozen=True)
class Invalid(SideBehavior):
    reason: str
    kind = "invalid"

    @property
    def flatness(self) -> int:
        return 0

    @property
    def admissible(self) -> bool:
        return False


def classify_side(V: Potential, side: Side) -> SideBehavior:
    """Local behaviour of the half-orbit of ``x'' = -V'(x)`` on one side of x = 0."""
    side = Side(side)
    k, c = V.flatness, V.leading
    if k == 1:
        if c * side.sign > 0:
            return Tangency(c)
        return Invalid("V'(0) = %s points orbits out through the switching line on the %s" % (c, side.value))
    if k % 2 == 0:
        if c < 0:
            return Invalid("leading coefficient c_%d = %s < 0: saddle-type side" % (k, c))
        if k == 2:
            return NondegenerateCenter(c)
        return DegenerateCenter(k // 2, c)
    if c * side.sign > 0:
        return Cusp((k - 1) // 2, c)
    return Invalid("leading odd coefficient c_%d = %s opens the %s side away from the origin" % (k, c, side.value))


# -- systems and the case table ----------------------------------------------


@dataclass(frozen=True)
class PiecewiseSystem:
    """Piecewise potential system.

    ``v_minus`` lives on the left (vertical) or lower (horizontal) side,
    ``v_plus`` on the right or upper side. For ``HORIZONTAL_MIXED`` the lower
    field is ``(V-'(y), -x)`` so ``v_minus`` is a function of y.
    """

    topology: Topology
    v_minus: Potential
    v_plus: Potential
    h_max: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.h_max is not None:
            hm = Fraction(self.h_max)
            if hm <= 0:
                raise ConfigInvalid("h_max must be positive", "h_max")
            object.__setattr__(self, "h_max", hm)

    def mirrored(self) -> "PiecewiseSystem":
        """Reflect x -> -x (vertical topology): swaps and reflects the potentials."""
        return PiecewiseSystem(self.topology, self.v_plus.mirrored(), self.v_minus.mirrored(), self.h_max)

    @classmethod
    def dry_friction(cls, g: Mapping, h_max=None) -> "PiecewiseSystem":
        """``(y, -x - g(x))`` above y = 0 and ``(y, -x + g(x))`` below.

        `g` maps degree to coefficient. This is the horizontal topology with
        V+- = x^2/2 +- G(x), G' = g, G(0) = 0.
        """
        G = {int(k) + 1: Fraction(v) / (int(k) + 1) for k, v in g.items()}
        degrees = set(G) | {2}
        half = {2: Fraction(1, 2)}
        plus = {k: half.get(k, 0) + G.get(k, 0) for k in degrees}
        minus = {k: half.get(k, 0) - G.get(k, 0) for k in degrees}
        return cls(Topology.HORIZONTAL, Potential.from_mapping(minus), Potential.from_mapping(plus), h_max)

    def to_json(self) -> dict:
        out = {"topology": self.topology.value, "v_minus": self.v_minus.to_json(), "v_plus": self.v_plus.to_json()}
        if self.h_max is not None:
            out["h_max"] = str(self.h_max)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "PiecewiseSystem":
        if not isinstance(data, Mapping):
            raise ConfigInvalid("system must be an object", "system")
        for name in ("topology", "v_minus", "v_plus"):
            if name not in data:
                raise ConfigInvalid("system is missing '%s'" % name, name)
        try:
            topo = Topology(data["topology"])
        except ValueError as exc:
            raise ConfigInvalid("unknown topology %r" % data["topology"], "topology") from exc
        h_max = data.get("h_max")
        return cls(topo, Potential.from_json(data["v_minus"]), Potential.from_json(data["v_plus"]),
                   Fraction(h_max) if h_max is not None else None)


FINITE_PERIOD_CASES = ("i", "iv", "v", "theorem_a")
DIVERGENT_CASES = ("ii", "iii", "vi", "vii", "viii")


@dataclass(frozen=True)
class CenterCase:
    """Result of :func:`classify_system`.

    ``left``/``right`` are the side behaviours after flatness normalization
    (the left side is at least as flat as the right; ``mirrored`` records a
    swap). For the horizontal topologies ``left`` is the lower side and
    ``right`` the upper side. ``flat_potential`` is the potential whose
    left branch governs divergence in the degenerate cases.
    """

    case: str
    topology: Topology
    left: SideBehavior | None = None
    right: SideBehavior | None = None
    r: int | None = None
    s: int | None = None
    mirrored: bool = False
    reason: str | None = None
    flat_potential: Potential | None = field(default=None, compare=False)

    @property
    def is_fold_fold(self) -> bool:
        return self.case == "iv"

    @property
    def monodromic(self) -> bool:
        return self.case != "not_monodromic"

    @property
    def finite_period(self) -> bool:
        return self.case in FINITE_PERIOD_CASES

    @property
    def divergent(self) -> bool:
        return self.case in DIVERGENT_CASES

    def to_json(self) -> dict:
        out: dict = {"case": self.case, "topology": self.topology.value}
        if self.case == "not_monodromic":
            out["reason"] = self.reason
            return out
        out["mirrored"] = self.mirrored
        if self.r is not None:
            out["r"] = self.r
        if self.s is not None:
            out["s"] = self.s
        if self.is_fold_fold:
            out["fold_fold"] = True
        if self.left is not None:
            out["left"] = self.left.to_json()
        if self.right is not None:
            out["right"] = self.right.to_json()
        return out


def _order_param(b: SideBehavior) -> int:
    if isinstance(b, (DegenerateCenter, Cusp)):
        return b.r
    return 1


def _vertical_case(left: SideBehavior, right: SideBehavior) -> tuple[str, int | None, int | None]:
    kinds = {type(left), type(right)}
    centers = (NondegenerateCenter, DegenerateCenter)
    if kinds == {NondegenerateCenter}:
        return "i", None, None
    if kinds == {Tangency}:
        return "iv", None, None
    if kinds == {NondegenerateCenter, Tangency}:
        return "v", None, None
    if isinstance(left, centers) and isinstance(right, centers):
        return "ii", left.flatness // 2, right.flatness // 2
    if kinds == {Cusp}:
        return "iii", left.r, right.r
    if kinds == {DegenerateCenter, Tangency}:
        flat = left if isinstance(left, DegenerateCenter) else right
        return "vi", flat.r, None
    if Cusp in kinds and (kinds & set(centers)):
        return "vii", _order_param(left), _order_param(right)
    if kinds == {Cusp, Tangency}:
        flat = left if isinstance(left, Cusp) else right
        return "viii", flat.r, None
    raise AssertionError("unreachable side combination %r / %r" % (left, right))


def classify_system(sys: PiecewiseSystem) -> CenterCase:
    """Center type at the origin."""
    topo = sys.topology
    if topo is Topology.HORIZONTAL_MIXED:
        up_r = classify_side(sys.v_plus, Side.RIGHT)
        low = classify_side(sys.v_minus, Side.LEFT)
        if not isinstance(up_r, NondegenerateCenter):
            return CenterCase("not_monodromic", topo,
                              reason="upper potential needs V+'(0) = 0 and V+''(0) > 0 (got %s)" % up_r.kind)
        if not isinstance(low, Tangency):
            return CenterCase("not_monodromic", topo,
                              reason="lower potential needs (V-)'(0) < 0 (got %s)" % low.kind)
        return CenterCase("theorem_a", topo, left=low, right=up_r)

    if topo is Topology.HORIZONTAL:
        sides = []
        for name, V in (("lower", sys.v_minus), ("upper", sys.v_plus)):
            b = classify_side(V, Side.RIGHT)
            if not isinstance(b, (NondegenerateCenter, DegenerateCenter)):
                return CenterCase("not_monodromic", topo,
                                  reason="%s potential must be a center on both branches (got %s)" % (name, b.kind))
            sides.append(b)
        low, up = sides
        mirrored = low.flatness < up.flatness
        if mirrored:
            low, up = up, low
        flat_V = sys.v_plus if mirrored else sys.v_minus
        if isinstance(low, NondegenerateCenter) and isinstance(up, NondegenerateCenter):
            return CenterCase("i", topo, low, up, mirrored=False)
        return CenterCase("ii", topo, low, up, low.flatness // 2, up.flatness // 2, mirrored, flat_potential=flat_V)

    left = classify_side(sys.v_minus, Side.LEFT)
    right = classify_side(sys.v_plus, Side.RIGHT)
    for name, b in (("left", left), ("right", right)):
        if isinstance(b, Invalid):
            return CenterCase("not_monodromic", topo, reason="%s side: %s" % (name, b.reason))
    mirrored = left.flatness < right.flatness
    flat_V = sys.v_minus
    if mirrored:
        left = classify_side(sys.v_plus.mirrored(), Side.LEFT)
        right = classify_side(sys.v_minus.mirrored(), Side.RIGHT)
        flat_V = sys.v_plus.mirrored()
    case, r, s = _vertical_case(left, right)
    return CenterCase(case, topo, left, right, r, s, mirrored,
                      flat_potential=flat_V if case in DIVERGENT_CASES else None)
