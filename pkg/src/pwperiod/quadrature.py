"""Numerical period function.

The side transit time ``2 * int_0^{x_t} dx / sqrt(2 (h - V(x)))`` has an
inverse-square-root singularity at the turning point ``x_t``. Writing
``h - V(x) = (x_t - x) W(x)`` with ``W`` the divided difference of V between
``x`` and ``x_t`` and substituting ``x = x_t - s v^2`` (s = +1 right, -1 left)
turns it into ``4 int_0^{sqrt|x_t|} dv / sqrt(2 s W)``, a smooth integrand
handled by adaptive Gauss-Legendre.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    InvalidSide,
    NoTurningPoint,
    NonSimpleTurningPoint,
    NotDegenerate,
    NotMonodromic,
)
from .potential import (
    Cusp,
    DegenerateCenter,
    PiecewiseSystem,
    Potential,
    Side,
    Topology,
    classify_side,
    classify_system,
)

QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-14
TURNING_REL_TOL = 1e-15
SIMPLE_CONTACT_TOL = 1e-10
CLOSURE_TOL = 1e-7
DEFAULT_RHO_GRID = tuple(np.logspace(-1, -3, 9))

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def adaptive_gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                            abs_tol: float = QUAD_ABS_TOL, rel_tol: float = QUAD_REL_TOL,
                            max_depth: int = 40) -> float:
    """Integrate a vectorised smooth `f` over [a, b] by interval bisection.

    A panel is accepted when the 20-point rule on it agrees with the sum
    over its two halves to ``max(abs_tol, rel_tol * |I|)``.
    """

    def rule(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES))

    def recurse(lo, hi, whole, tol, depth):
        m = 0.5 * (lo + hi)
        left, right = rule(lo, m), rule(m, hi)
        both = left + right
        if abs(both - whole) <= max(tol, rel_tol * abs(both)) or depth >= max_depth:
            return both
        return recurse(lo, m, left, tol / 2, depth + 1) + recurse(m, hi, right, tol / 2, depth + 1)

    return recurse(a, b, rule(a, b), abs_tol, 0)


# -- float-coefficient cores (shared with the scaled divergence integrand) -----


def _polyval(c: np.ndarray, x):
    return np.polynomial.polynomial.polyval(x, c)


def _turning_point(c: np.ndarray, h: float, sign: int, bound: float) -> float:
    f = lambda x: _polyval(c, sign * x) - h  # noqa: E731
    x_prev, x = 0.0, bound * 2.0 ** -60
    while f(x) < 0:
        if x >= bound:
            raise NoTurningPoint("V < h up to the domain bound %g: energy %g outside the period annulus" % (bound, h))
        x_prev, x = x, min(2 * x, bound)
    # guard against several roots inside one doubling step
    grid = np.linspace(x_prev, x, 33)
    vals = f(grid)
    k = int(np.argmax(vals >= 0))
    lo, hi = grid[k - 1], grid[k]
    if vals[k] == 0:
        return sign * hi
    root = brentq(f, lo, hi, xtol=1e-300, rtol=TURNING_REL_TOL, maxiter=500)
    return sign * root


def _divided_difference(c: np.ndarray, a: float, x: np.ndarray) -> np.ndarray:
    # (V(a) - V(x)) / (a - x) = sum_k c_k sum_j a^j x^(k-1-j), no cancellation
    q = np.ones_like(x)
    acc = np.zeros_like(x)
    a_pow = 1.0
    for k in range(1, len(c)):
        if k > 1:
            a_pow *= a
            q = a_pow + x * q
        if c[k]:
            acc = acc + c[k] * q
    return acc


def _transit(c: np.ndarray, h: float, sign: int, bound: float, abs_tol: float) -> tuple[float, float]:
    xt = _turning_point(c, h, sign, bound)
    slope = _polyval(np.polynomial.polynomial.polyder(c), xt)
    if abs(slope * xt) < SIMPLE_CONTACT_TOL * h:
        raise NonSimpleTurningPoint("V'(x_t) = %g at x_t = %g: degenerate contact" % (slope, xt))

    def integrand(v):
        x = xt - sign * v * v
        w = sign * _divided_difference(c, xt, x)
        return 2.0 / np.sqrt(2.0 * w)

    t = adaptive_gauss_legendre(integrand, 0.0, math.sqrt(abs(xt)), abs_tol / 2)
    return float(2.0 * t), float(xt)


# -- public operations -----------------------------------------------------------


def _check_side(V: Potential, side: Side) -> Side:
    side = Side(side)
    b = classify_side(V, side)
    if not b.admissible:
        raise InvalidSide("%s side: %s" % (side.value, b.reason))
    return side


def turning_point(V: Potential, h: float, side: Side) -> float:
    """Root of V(x) = h nearest 0 on the given side."""
    if not h > 0:
        raise ValueError("energy must be positive")
    side = _check_side(V, side)
    return _turning_point(V.float_coeffs, float(h), side.sign, V.domain_bound)


def branch_time_numeric(V: Potential, h: float, side: Side, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Full transit time of one side: out to the turning point and back."""
    if not h > 0:
        raise ValueError("energy must be positive")
    side = _check_side(V, side)
    return _transit(V.float_coeffs, float(h), side.sign, V.domain_bound, abs_tol)[0]


def arc_time_numeric(V: Potential, h: float, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Time between the two turning points of a center potential at energy h."""
    return 0.5 * (branch_time_numeric(V, h, Side.LEFT, abs_tol) + branch_time_numeric(V, h, Side.RIGHT, abs_tol))


@dataclass(frozen=True)
class PeriodRow:
    h: float
    T_total: float
    T_minus: float
    T_plus: float
    cross_1: float
    cross_2: float
    non_closed: bool = False
    displacement: float = 0.0

    def to_json(self) -> dict:
        return {k: (_fmt(v) if isinstance(v, float) else v) for k, v in self.__dict__.items()}


def _fmt(x: float) -> str:
    return format(x, ".17g")


def period_numeric(sys: PiecewiseSystem, h: float, abs_tol: float = QUAD_ABS_TOL) -> PeriodRow:
    """Return time of the orbit at energy h.

    vertical: crossings (0, +-sqrt(2h)), always closed.
    horizontal topologies: the orbit starts at (a, 0), a = right turning point of
    V+ at energy h, enters the lower side and returns to (b, 0); when b != a the
    row carries the first-return time and ``non_closed``.
    """
    case = classify_system(sys)
    if not case.monodromic:
        raise NotMonodromic(case.reason)
    h = float(h)
    if sys.topology is Topology.VERTICAL:
        tm = branch_time_numeric(sys.v_minus, h, Side.LEFT, abs_tol)
        tp = branch_time_numeric(sys.v_plus, h, Side.RIGHT, abs_tol)
        y0 = math.sqrt(2 * h)
        return PeriodRow(h, float(tm + tp), float(tm), float(tp), y0, -y0)

    a = turning_point(sys.v_plus, h, Side.RIGHT)
    if sys.topology is Topology.HORIZONTAL_MIXED:
        tm = branch_time_numeric(sys.v_minus, 0.5 * a * a, Side.LEFT, abs_tol)
        mid = -a
    else:
        h_low = float(sys.v_minus(a))
        tm = arc_time_numeric(sys.v_minus, h_low, abs_tol)
        mid = turning_point(sys.v_minus, h_low, Side.LEFT)
    h_up = float(sys.v_plus(mid))
    tp = arc_time_numeric(sys.v_plus, h_up, abs_tol)
    b = turning_point(sys.v_plus, h_up, Side.RIGHT)
    disp = b - a
    return PeriodRow(h, float(tm + tp), float(tm), float(tp), float(a), float(mid),
                     bool(abs(disp) > CLOSURE_TOL), float(disp))


def return_displacement(sys: PiecewiseSystem, start_crossing: float) -> float:
    """Return crossing minus start crossing after one turn, from level-set geometry."""
    case = classify_system(sys)
    if not case.monodromic:
        raise NotMonodromic(case.reason)
    if sys.topology is Topology.VERTICAL:
        # H is continuous across x = 0, so (0, y0) -> (0, -y0) -> (0, y0)
        return 0.0
    a = float(start_crossing)
    if a <= 0:
        raise ValueError("start crossing must be positive")
    if sys.topology is Topology.HORIZONTAL_MIXED:
        mid = -a
    else:
        mid = turning_point(sys.v_minus, float(sys.v_minus(a)), Side.LEFT)
    b = turning_point(sys.v_plus, float(sys.v_plus(mid)), Side.RIGHT)
    return float(b - a)


@dataclass
class PeriodTable:
    rows: list[PeriodRow]
    meta: dict = field(default_factory=dict)

    COLUMNS = ("h", "T_total", "T_minus", "T_plus", "cross_1", "cross_2", "non_closed")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.h), _fmt(r.T_total), _fmt(r.T_minus), _fmt(r.T_plus),
                        _fmt(r.cross_1), _fmt(r.cross_2), "1" if r.non_closed else "0"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"meta": self.meta, "rows": [r.to_json() for r in self.rows]}


def period_table(sys: PiecewiseSystem, energies: Sequence[float], abs_tol: float = QUAD_ABS_TOL,
                 workers: int = 1) -> PeriodTable:
    hs = sorted(float(h) for h in energies)
    if any(h <= 0 for h in hs) or len(set(hs)) != len(hs):
        raise ValueError("energies must be distinct and positive")
    if sys.h_max is not None and hs[-1] >= float(sys.h_max):
        raise NoTurningPoint("energy %g is not below h_max = %s" % (hs[-1], sys.h_max))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(period_numeric, [sys] * len(hs), hs, [abs_tol] * len(hs)))
    else:
        rows = [period_numeric(sys, h, abs_tol) for h in hs]
    meta = {"case": classify_system(sys).to_json(), "quadrature_abs": abs_tol,
            "turning_point_rel": TURNING_REL_TOL}
    return PeriodTable(rows, meta)


# -- h_max ---------------------------------------------------------------------


def _branch_cap(V: Potential, side: Side) -> float:
    """Largest energy reachable along the monotone branch on `side`."""
    s = side.sign
    d = np.polynomial.polynomial.polyder(V.float_coeffs)
    crit = [r.real for r in np.atleast_1d(np.polynomial.polynomial.polyroots(d))
            if abs(r.imag) < 1e-12 and s * r.real > 1e-12 and abs(r.real) <= V.domain_bound]
    x_end = min(crit, key=abs) if crit else s * V.domain_bound
    return float(V(x_end))


def default_h_max(sys: PiecewiseSystem) -> float:
    """0.9 x the smallest energy at which a turning-point search fails."""
    if sys.h_max is not None:
        return float(sys.h_max)
    if sys.topology is Topology.VERTICAL:
        return 0.9 * min(_branch_cap(sys.v_minus, Side.LEFT), _branch_cap(sys.v_plus, Side.RIGHT))
    h = min(_branch_cap(sys.v_plus, Side.LEFT), _branch_cap(sys.v_plus, Side.RIGHT))
    for _ in range(200):
        try:
            period_numeric(sys, h * (1 - 1e-9))
            return 0.9 * h
        except (NoTurningPoint, NonSimpleTurningPoint):
            h *= 0.95
    raise NoTurningPoint("could not locate a period annulus")


# -- divergence ----------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceFit:
    rho_values: tuple[float, ...]
    times: tuple[float, ...]
    fitted_exponent: float
    predicted_exponent: float
    r: int
    i: int

    @property
    def relative_error(self) -> float:
        return abs(self.fitted_exponent - self.predicted_exponent) / abs(self.predicted_exponent)

    def to_json(self) -> dict:
        return {
            "rho_values": [_fmt(x) for x in self.rho_values],
            "times": [_fmt(x) for x in self.times],
            "fitted_exponent": _fmt(self.fitted_exponent),
            "predicted_exponent": _fmt(self.predicted_exponent),
            "r": self.r,
            "i": self.i,
        }


def scaled_transit(V: Potential, rho: float, side: Side = Side.LEFT, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Transit time at h = rho^k (k = flatness) via x = rho s.

    T = rho^(1 - k/2) * 2 int ds / sqrt(2 (1 - V(rho s)/rho^k)); the s-integrand
    has an O(1) turning point for every rho.
    """
    side = Side(side)
    k = V.flatness
    c = V.float_coeffs
    scaled = np.array([c[m] * rho ** (m - k) if m >= k else 0.0 for m in range(len(c))])
    t, _ = _transit(scaled, 1.0, side.sign, V.domain_bound / rho, abs_tol)
    return float(rho ** (1 - k / 2) * t)


def divergence_probe(V: Potential, side: Side = Side.LEFT, rho_grid: Sequence[float] | None = None) -> DivergenceFit:
    """Log-log slope of the transit time against rho, h = rho^(2r+i)."""
    side = Side(side)
    b = classify_side(V, side)
    if isinstance(b, DegenerateCenter):
        i = 0
    elif isinstance(b, Cusp):
        i = 1
    else:
        raise NotDegenerate("divergence probe needs a degenerate center or cusp side (got %s)" % b.kind)
    rhos = tuple(float(r) for r in (DEFAULT_RHO_GRID if rho_grid is None else rho_grid))
    if len(rhos) < 2 or any(r <= 0 for r in rhos) or any(x <= y for x, y in zip(rhos, rhos[1:])):
        raise ValueError("rho_grid must be strictly decreasing positive values (at least two)")
    times = tuple(scaled_transit(V, rho, side) for rho in rhos)
    slope = float(np.polyfit(np.log(rhos), np.log(times), 1)[0])
    predicted = -(2 * (b.r - 1) + i) / 2
    return DivergenceFit(rhos, times, slope, predicted, b.r, i)
