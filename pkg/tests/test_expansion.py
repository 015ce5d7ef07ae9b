import math
from fractions import Fraction

import mpmath
import pytest

from helpers import P, vertical
from pwperiod.errors import NotACenter, NotMonodromic, NotMonotoneBranch, UnsupportedCase
from pwperiod.exact import ExactNumber
from pwperiod.expansion import (
    AllZeroUpToN,
    Param,
    PeriodExpansion,
    branch_time_series,
    center_half_period_series,
    coupled_expansion,
    first_nonzero_constant,
    gamma_ratio,
    half_period_constants,
    horizontal_return_point,
    omega_of,
    transit_time_series,
    z_substitution,
)
from pwperiod.potential import PiecewiseSystem, Side, Topology
from pwperiod.series import series_compose

mpmath.mp.dps = 30
HARMONIC = ExactNumber.pi_over_sqrt2_omega(1)


def mp_branch_time(V, h, side):
    """int_0^{x_t} dx / sqrt(2 (h - V)) by tanh-sinh quadrature at 30 digits."""
    c = [mpmath.mpf(x.numerator) / x.denominator for x in V.coeffs]
    f = lambda x: sum(ck * x**k for k, ck in enumerate(c)) - h  # noqa: E731
    s = side.sign
    x = mpmath.mpf(0)
    step = mpmath.mpf(h) ** mpmath.mpf(0.5) / 8
    while f(s * (x + step)) < 0:
        x += step
    xt = mpmath.findroot(f, (s * x, s * (x + step)), solver="anderson")
    return abs(mpmath.quad(lambda y: 1 / mpmath.sqrt(2 * (h - (f(y) + h))), [0, xt]))


def test_omega_examples():
    assert omega_of(P({2: 1})).exact == 1
    w = omega_of(P({2: 2, 3: 1}))
    assert w.exact is None and abs(w.value - math.sqrt(2)) <= w.error_bound + 1e-16
    assert omega_of(P({2: 4})).exact == 2
    with pytest.raises(NotACenter):
        omega_of(P({4: 1}))


def test_z_substitution_examples():
    assert list(z_substitution(P({2: 1}), 6).coeffs[2:]) == [0] * 5
    b = z_substitution(P({2: 1, 3: 1}), 5)
    assert (b[2], b[3], b[4]) == (Fraction(-1, 2), Fraction(5, 8), Fraction(-1))
    b = z_substitution(P({2: 1, 4: 1}), 5)
    assert (b[2], b[3]) == (0, Fraction(-1, 2))


@pytest.mark.parametrize("coeffs", [{2: 1, 3: 1}, {2: 3, 3: -2, 5: 1}, {2: "1/2", 4: 7, 6: -1}])
def test_z_substitution_compose_back(coeffs):
    V = P(coeffs)
    x_of_z = z_substitution(V, 8)
    back = series_compose(V.series(8, "z"), x_of_z)
    assert list(back.coeffs) == [0, 0, V.coeff(2)] + [0] * 6


@pytest.mark.parametrize("coeffs", [{2: 1, 4: 1}, {2: 3, 4: -2, 6: 5}, {2: 1}])
def test_even_potential_parity(coeffs):
    b = z_substitution(P(coeffs), 9)
    assert all(b[k] == 0 for k in range(2, 10, 2))


def test_gamma_ratio():
    for i in range(6):
        expected = math.gamma(i + 1.5) / (math.sqrt(math.pi) * math.gamma(i + 1))
        assert float(gamma_ratio(i)) == pytest.approx(expected, rel=1e-15)


def test_half_period_constants():
    assert center_half_period_series(P({2: 1}), 6).coeffs == (HARMONIC,) + (ExactNumber(),) * 6
    assert half_period_constants(P({2: 1, 3: 1}), 2)[1] == Fraction(15, 16)
    assert half_period_constants(P({2: 1, 4: 1}), 2)[1] == Fraction(-3, 4)


@pytest.mark.parametrize("coeffs, side", [
    ({2: 1, 3: 1}, Side.RIGHT),
    ({2: 1, 3: 1}, Side.LEFT),
    ({2: "3/2", 3: "-1/2", 4: 2}, Side.LEFT),
    ({1: -1, 2: 1, 3: "1/3"}, Side.LEFT),
    ({1: 2, 2: -1}, Side.RIGHT),
])
def test_branch_series_against_mpmath(coeffs, side):
    V = P(coeffs)
    exp = branch_time_series(V, side, 14)
    for h in (1e-3, 1e-4):
        oracle = float(mp_branch_time(V, mpmath.mpf(h), side))
        assert exp.evaluate(h) == pytest.approx(oracle, rel=1e-10)


def test_branch_series_right_sqrt_coefficient():
    exp = branch_time_series(P({2: 1, 3: 1}), Side.RIGHT, 4)
    assert exp.coeffs[1] == ExactNumber.sqrt(Fraction(1, 2), -1)


def test_tangency_examples():
    left = energy_crossing = transit_time_series(P({1: -1}), Side.LEFT, 6)
    assert left.coeffs[1] == ExactNumber.sqrt(8)  # 2 x0 with x0 = sqrt(2h)
    assert all(c.is_zero() for k, c in enumerate(energy_crossing.coeffs) if k != 1)


def test_odd_power_cancellation():
    for coeffs in ({2: 1, 3: 1}, {2: 2, 3: -1, 4: 3, 5: 1}):
        V = P(coeffs)
        total = transit_time_series(V, Side.LEFT, 12) + transit_time_series(V, Side.RIGHT, 12)
        assert all(total.coeffs[k].is_zero() for k in range(1, 13, 2))
        arc = center_half_period_series(V, 6)
        assert all(total.coeffs[2 * i] == arc.coeffs[i] * 2 for i in range(7))


def test_branch_errors():
    with pytest.raises(UnsupportedCase):
        branch_time_series(P({4: 1}), Side.LEFT)
    with pytest.raises(NotMonotoneBranch):
        branch_time_series(P({1: 1}), Side.LEFT)


def test_mixed_horizontal_example():
    sys = PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1}))
    exp = coupled_expansion(sys, 8)
    assert exp.param is Param.X_CROSSING
    assert exp.coeffs == (HARMONIC, ExactNumber.rational(2)) + (ExactNumber(),) * 7


def test_case_iv_and_i_examples():
    iv = coupled_expansion(vertical({1: -1}, {1: 1}), 6)
    assert iv.param is Param.Y_CROSSING
    assert iv.coeffs == (ExactNumber(), ExactNumber.rational(4)) + (ExactNumber(),) * 5
    lin = coupled_expansion(vertical({2: 1}, {2: 1}), 6)
    assert lin.leading == HARMONIC * 2
    assert isinstance(first_nonzero_constant(lin), AllZeroUpToN)


def test_first_nonzero_examples():
    a = first_nonzero_constant(coupled_expansion(PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1}))))
    assert (a.index, a.value) == (1, ExactNumber.rational(2))
    v = first_nonzero_constant(coupled_expansion(vertical({2: 1}, {1: 1})))
    assert (v.index, v.value) == (1, ExactNumber.rational(2))


def test_case_v_asymmetric_center_note():
    exp = coupled_expansion(vertical({2: 1, 3: 1}, {1: 1}), 6)
    # T1 = 2/c1+ - 2 b2 / c2 with b2 = -1/2
    assert exp.coeffs[1] == ExactNumber.rational(3)
    assert exp.notes


def test_divergent_and_non_monodromic():
    with pytest.raises(UnsupportedCase):
        coupled_expansion(vertical({4: 1}, {2: 1}))
    with pytest.raises(NotMonodromic):
        coupled_expansion(vertical({1: 1}, {1: 1}))


def test_horizontal_return_point_even_upper():
    sys = PiecewiseSystem(Topology.HORIZONTAL_MIXED, P({1: -1}), P({2: 1, 4: 3}))
    b = horizontal_return_point(sys, 8)
    assert list(b.coeffs) == [0, 1] + [0] * 7


def test_expansion_json_roundtrip():
    exp = coupled_expansion(vertical({2: 1, 3: 1}, {2: 2}), 6)
    again = PeriodExpansion.from_json(exp.to_json())
    assert again.coeffs == exp.coeffs and again.power_step == exp.power_step
