"""Direct simulation of the piecewise flows.

An independent check on the quadrature and series engines: the actual vector
fields are integrated with an adaptive embedded Runge-Kutta pair (scipy's
DOP853 stepper, used step by step for its dense output), switching fields
whenever the orbit crosses the switching line. Crossings are located by
bisection on the dense output of the accepted step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import DOP853

from .errors import AnalysisError, EscapedDomain, EventNotBracketed, MaxStepsExceeded, NotMonodromic
from .potential import PiecewiseSystem, Topology, classify_system


@dataclass(frozen=True)
class SimOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    event_tol: float = 1e-13
    max_step: float = 0.1
    max_steps: int = 200_000
    t_max: float = 1e4
    samples_per_step: int = 8
    closure_tol: float = 1e-7
    max_events: int = 8


def locate_switch_event(dense: Callable[[float], np.ndarray], switch_fn: Callable[[np.ndarray], float],
                        t_lo: float, t_hi: float, tol: float = 1e-13) -> tuple[float, np.ndarray]:
    """Bisect ``switch_fn(dense(t))`` for a sign change on [t_lo, t_hi].

    Stops when ``|switch_fn| <= tol`` or the bracket collapses to rounding.
    """
    g_lo, g_hi = switch_fn(dense(t_lo)), switch_fn(dense(t_hi))
    if g_lo == 0:
        return t_lo, np.asarray(dense(t_lo))
    if g_hi == 0:
        return t_hi, np.asarray(dense(t_hi))
    if (g_lo > 0) == (g_hi > 0):
        raise EventNotBracketed("switching function keeps its sign on [%r, %r]" % (t_lo, t_hi))
    lo_pos = g_lo > 0
    best_t, best_g = (t_lo, g_lo) if abs(g_lo) < abs(g_hi) else (t_hi, g_hi)
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if mid <= t_lo or mid >= t_hi:
            break
        g = switch_fn(dense(mid))
        if abs(g) < abs(best_g):
            best_t, best_g = mid, g
        if abs(g) <= tol:
            break
        if (g > 0) == lo_pos:
            t_lo = mid
        else:
            t_hi = mid
    return best_t, np.asarray(dense(best_t))


@dataclass(frozen=True)
class SwitchEvent:
    t: float
    position: float
    side_from: str
    side_to: str
    state: tuple[float, float]

    def to_json(self) -> dict:
        return {"t": format(self.t, ".17g"), "position": format(self.position, ".17g"),
                "side_from": self.side_from, "side_to": self.side_to}


@dataclass
class OrbitRun:
    states: np.ndarray            # rows (t, x, y)
    sides: np.ndarray             # +1 / -1 per state row
    events: list[SwitchEvent]
    return_time: float
    closed: bool
    start_position: float
    return_position: float
    labels: tuple[str, str] = ("minus", "plus")
    hamiltonians: dict = field(default_factory=dict, repr=False)

    @property
    def displacement(self) -> float:
        return self.return_position - self.start_position

    def hamiltonian_drift(self) -> float:
        """Largest relative change of the side Hamiltonian along any smooth arc."""
        worst = 0.0
        arc_start = 0
        for k in range(1, len(self.states) + 1):
            if k == len(self.states) or self.sides[k] != self.sides[arc_start]:
                arc = self.states[arc_start:k]
                H = self.hamiltonians[int(self.sides[arc_start])]
                vals = np.array([H(x, y) for _, x, y in arc])
                ref = abs(vals[0]) if vals[0] != 0 else 1.0
                worst = max(worst, float(np.max(np.abs(vals - vals[0])) / ref))
                arc_start = k
        return worst

    def summary(self) -> dict:
        return {
            "return_time": format(self.return_time, ".17g"),
            "closed": self.closed,
            "start_position": format(self.start_position, ".17g"),
            "return_position": format(self.return_position, ".17g"),
            "displacement": format(self.displacement, ".17g"),
            "events": [e.to_json() for e in self.events],
            "n_states": int(len(self.states)),
        }

    def trajectory_csv(self) -> str:
        lines = ["t,x,y,side"]
        for (t, x, y), s in zip(self.states, self.sides):
            lines.append("%s,%s,%s,%s" % (format(t, ".17g"), format(x, ".17g"), format(y, ".17g"),
                                          self.labels[0] if s < 0 else self.labels[1]))
        return "\n".join(lines) + "\n"

    def event_log(self) -> str:
        return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in self.events)


def _fields(sys: PiecewiseSystem):
    """(field_minus, field_plus, switch index, labels, hamiltonians)."""
    dm = np.polynomial.polynomial.polyder(sys.v_minus.float_coeffs)
    dp = np.polynomial.polynomial.polyder(sys.v_plus.float_coeffs)
    pv = np.polynomial.polynomial.polyval
    plus = lambda u: np.array([u[1], -pv(u[0], dp)])  # noqa: E731
    H_plus = lambda x, y: 0.5 * y * y + float(sys.v_plus(x))  # noqa: E731
    if sys.topology is Topology.HORIZONTAL_MIXED:
        minus = lambda u: np.array([pv(u[1], dm), -u[0]])  # noqa: E731
        H_minus = lambda x, y: 0.5 * x * x + float(sys.v_minus(y))  # noqa: E731
    else:
        minus = lambda u: np.array([u[1], -pv(u[0], dm)])  # noqa: E731
        H_minus = lambda x, y: 0.5 * y * y + float(sys.v_minus(x))  # noqa: E731
    if sys.topology is Topology.VERTICAL:
        return minus, plus, 0, ("left", "right"), {-1: H_minus, 1: H_plus}
    return minus, plus, 1, ("lower", "upper"), {-1: H_minus, 1: H_plus}


def side_hamiltonian(sys: PiecewiseSystem, side: int, x: float, y: float) -> float:
    return _fields(sys)[4][1 if side > 0 else -1](x, y)


def integrate_return(sys: PiecewiseSystem, start: float | tuple[float, float],
                     opts: SimOptions | None = None) -> OrbitRun:
    """Integrate from a point of the switching line until the first return.

    `start` is either the coordinate along the switching line (y0 on x = 0,
    x0 on y = 0) or an explicit point on it. The run ends at the first
    crossing into the entry side at a point on the same half-line as the
    start.
    """
    opts = opts or SimOptions()
    case = classify_system(sys)
    if not case.monodromic:
        raise NotMonodromic(case.reason)
    f_minus, f_plus, k, labels, hams = _fields(sys)
    along = 1 - k
    if isinstance(start, (tuple, list, np.ndarray)):
        u0 = np.array(start, dtype=float)
        if u0[k] != 0:
            raise ValueError("start point must lie on the switching line")
    else:
        u0 = np.zeros(2)
        u0[along] = float(start)
    start_pos = float(u0[along])
    if start_pos == 0:
        raise ValueError("start must differ from the center")

    n_minus, n_plus = f_minus(u0)[k], f_plus(u0)[k]
    if n_minus > 0 and n_plus > 0:
        side = 1
    elif n_minus < 0 and n_plus < 0:
        side = -1
    else:
        raise AnalysisError("start point is not a crossing point (sliding or grazing)")
    entry = side
    bound = max(sys.v_minus.domain_bound, sys.v_plus.domain_bound)

    t = 0.0
    u = u0
    states = [(t, u[0], u[1])]
    sides = [side]
    events: list[SwitchEvent] = []
    steps = 0
    while True:
        fun = f_plus if side > 0 else f_minus
        solver = DOP853(lambda _t, v, fun=fun: fun(v), t, u, t_bound=opts.t_max,
                        rtol=opts.rtol, atol=opts.atol, max_step=opts.max_step)
        crossed = None
        while crossed is None:
            if steps >= opts.max_steps:
                raise MaxStepsExceeded("no return after %d steps" % steps)
            if solver.status != "running":
                raise MaxStepsExceeded("reached t_max = %g without returning" % opts.t_max)
            msg = solver.step()
            steps += 1
            if solver.status == "failed":
                raise AnalysisError("integrator failed: %s" % msg)
            dense = solver.dense_output()
            ts = np.linspace(solver.t_old, solver.t, opts.samples_per_step + 1)[1:]
            g = side * dense(ts)[k]
            hits = np.nonzero(g < 0)[0]
            if hits.size:
                j = int(hits[0])
                lo = solver.t_old if j == 0 else ts[j - 1]
                te, ue = locate_switch_event(dense, lambda v, s=side: s * v[k], lo, ts[j], opts.event_tol)
                ue = np.array(ue, dtype=float)
                ue[k] = 0.0
                crossed = (te, ue)
            else:
                states.append((solver.t, solver.y[0], solver.y[1]))
                sides.append(side)
                if np.max(np.abs(solver.y)) > bound:
                    raise EscapedDomain("orbit left |x|, |y| <= %g" % bound)

        te, ue = crossed
        new_side = -side
        normal = (f_plus if new_side > 0 else f_minus)(ue)[k]
        if new_side * normal <= 0:
            raise AnalysisError("orbit reaches a sliding or grazing point at %r" % (tuple(ue),))
        states.append((te, ue[0], ue[1]))
        sides.append(side)
        pos = float(ue[along])
        events.append(SwitchEvent(float(te), pos, labels[0] if side < 0 else labels[1],
                                  labels[0] if new_side < 0 else labels[1], (float(ue[0]), float(ue[1]))))
        t, u, side = te, ue, new_side
        states.append((t, u[0], u[1]))
        sides.append(side)
        if side == entry and np.sign(pos) == np.sign(start_pos):
            return OrbitRun(np.array(states), np.array(sides), events, float(te),
                            abs(pos - start_pos) <= opts.closure_tol, start_pos, pos, labels, hams)
        if len(events) >= opts.max_events:
            raise MaxStepsExceeded("no return after %d switching events" % len(events))
