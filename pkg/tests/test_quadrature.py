import math

import numpy as np
import pytest

from helpers import P, vertical
from pwperiod.errors import InvalidSide, NonSimpleTurningPoint, NoTurningPoint, NotDegenerate, NotMonodromic
from pwperiod.potential import PiecewiseSystem, Potential, Side, Topology
from pwperiod.quadrature import (
    adaptive_gauss_legendre,
    arc_time_numeric,
    branch_time_numeric,
    default_h_max,
    divergence_probe,
    period_numeric,
    period_table,
    return_displacement,
    turning_point,
)

QUARTIC_INTEGRAL = math.sqrt(math.pi) * math.gamma(1.25) / math.gamma(0.75)  # int_0^1 ds / sqrt(1 - s^4)


def test_adaptive_rule_on_smooth_integrand():
    assert adaptive_gauss_legendre(np.cos, 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("coeffs, h, side, expected", [
    ({2: 1}, 1.0, Side.RIGHT, 1.0),
    ({2: 1, 3: 1}, 2.0, Side.RIGHT, 1.0),
    ({4: 1}, 1.0, Side.LEFT, -1.0),
])
def test_turning_point_examples(coeffs, h, side, expected):
    assert turning_point(P(coeffs), h, side) == pytest.approx(expected, rel=1e-15)


def test_branch_time_examples():
    assert branch_time_numeric(P({2: 1}), 0.3, Side.RIGHT) == pytest.approx(math.pi / math.sqrt(2), abs=1e-12)
    oracle = 0.01 ** -0.25 * math.sqrt(2) * QUARTIC_INTEGRAL
    assert branch_time_numeric(P({4: 1}), 0.01, Side.LEFT) == pytest.approx(oracle, rel=1e-12)
    assert oracle == pytest.approx(5.8631, abs=1e-4)
    assert branch_time_numeric(P({1: -1}), 0.5, Side.LEFT) == pytest.approx(2.0, abs=1e-12)


def test_period_examples():
    assert period_numeric(vertical({2: 1}, {2: 1}), 0.2).T_total == pytest.approx(math.pi * math.sqrt(2), abs=1e-12)
    row = period_numeric(vertical({2: 1}, {2: 2}), 1.0)
    assert row.T_total == pytest.approx(math.pi / math.sqrt(2) + math.pi / 2, abs=1e-12)
    mixed = PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1}))
    assert period_numeric(mixed, 0.01).T_total == pytest.approx(math.pi / math.sqrt(2) + 0.2, abs=1e-12)


def test_arc_time_richardson_gamma_constant():
    V = P({2: 1, 3: 1})
    T0 = math.pi / math.sqrt(2)
    d = [(arc_time_numeric(V, h) - T0) / h for h in (1e-3, 5e-4, 2.5e-4)]
    est = (8 * d[2] - 6 * d[1] + d[0]) / 3
    assert est / T0 == pytest.approx(15 / 16, rel=1e-6)


def test_displacements():
    assert return_displacement(vertical({2: 1, 3: 5}, {1: 1}), 0.3) == 0.0
    even = PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1}))
    assert return_displacement(even, 0.1) == pytest.approx(0.0, abs=1e-15)
    odd = PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1, 3: 1}))
    # b^2 + b^3 = V+(-0.1) = 0.009, independent cubic root
    roots = np.roots([1, 1, 0, -0.009])
    b = max(r.real for r in roots if abs(r.imag) < 1e-14)
    assert return_displacement(odd, 0.1) == pytest.approx(b - 0.1, abs=1e-13)
    assert period_numeric(odd, 0.011).non_closed


@pytest.mark.parametrize("coeffs, side", [({2: 1, 3: 2, 4: -1}, Side.RIGHT), ({1: -2, 2: 1, 5: 3}, Side.LEFT)])
def test_energy_scaling_law(coeffs, side):
    V = P(coeffs)
    for lam in (0.5, 3.0, 7.25):
        h = 0.02
        assert branch_time_numeric(V.scaled(lam), lam * h, side) == pytest.approx(
            branch_time_numeric(V, h, side) / math.sqrt(lam), rel=1e-9)


def test_mirror_law():
    V = P({2: 1, 3: "1/2", 4: 1, 5: "-1/4"})
    for h in (1e-4, 1e-2, 0.05):
        assert branch_time_numeric(V, h, Side.LEFT) == pytest.approx(
            branch_time_numeric(V.mirrored(), h, Side.RIGHT), rel=1e-12)


def test_errors():
    with pytest.raises(NoTurningPoint):
        branch_time_numeric(P({2: 1}), 1e3, Side.RIGHT)
    with pytest.raises(InvalidSide):
        branch_time_numeric(P({1: 1}), 0.1, Side.LEFT)
    # V = 3x^2 - 2x^3 has a maximum V(1) = 1; bound 8 puts x = 1 on the bracketing grid
    with pytest.raises(NonSimpleTurningPoint):
        branch_time_numeric(Potential.from_mapping({2: 3, 3: -2}, 8.0), 1.0, Side.RIGHT)
    with pytest.raises(NotMonodromic):
        period_numeric(vertical({1: 1}, {1: 1}), 0.1)
    with pytest.raises(ValueError):
        branch_time_numeric(P({2: 1}), 0.0, Side.RIGHT)


def test_default_h_max():
    assert default_h_max(vertical({2: 1}, {2: 1, 3: "-2/3"})) == pytest.approx(0.3, rel=1e-12)


@pytest.mark.parametrize("coeffs, predicted", [({4: 1}, -1.0), ({6: 1}, -2.0), ({3: -1}, -0.5), ({5: -1}, -1.5)])
def test_divergence_probe(coeffs, predicted):
    fit = divergence_probe(P(coeffs), Side.LEFT, [0.1, 0.05, 0.025, 0.0125])
    assert fit.predicted_exponent == predicted
    assert fit.relative_error < 1e-6


def test_divergence_probe_rejects():
    with pytest.raises(NotDegenerate):
        divergence_probe(P({2: 1}))
    with pytest.raises(ValueError):
        divergence_probe(P({4: 1}), Side.LEFT, [0.01, 0.1])


def test_period_table_csv():
    table = period_table(vertical({2: 1}, {2: 1}), [1e-3, 1e-2, 0.1])
    lines = table.to_csv().splitlines()
    assert lines[0] == "h,T_total,T_minus,T_plus,cross_1,cross_2,non_closed"
    assert len(lines) == 4
    assert all(abs(float(l.split(",")[1]) - math.pi * math.sqrt(2)) < 1e-12 for l in lines[1:])
    with pytest.raises(ValueError):
        period_table(vertical({2: 1}, {2: 1}), [0.1, 0.1])


def test_period_table_workers_match_serial():
    sys = vertical({2: 1, 3: 1}, {1: 1})
    hs = [1e-4, 1e-3, 1e-2]
    assert period_table(sys, hs, workers=2).rows == period_table(sys, hs).rows
