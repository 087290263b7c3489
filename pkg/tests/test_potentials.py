import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steplike_ist.errors import DataError, MomentError, SmoothnessError
from steplike_ist.potentials import (
    BargmannPotential,
    CompositePotential,
    ExpressionPotential,
    FreePotential,
    GridPotential,
    Sech2Potential,
    StepPotential,
    compute_moments,
    moment_norm_against,
    potential_from_dict,
)


def central_diff(f, x, h=1e-4):
    return (f(x + h) - f(x - h)) / (2 * h)


def test_free_is_zero_everywhere():
    q = FreePotential()
    assert q(3.7) == 0.0
    assert q(3.7, order=2) == 0.0


def test_sech2_value_at_origin():
    q = Sech2Potential()
    assert q(0.0) == pytest.approx(-2.0, abs=1e-15)
    # -2 sech^2 x evaluated analytically elsewhere
    assert q(1.3) == pytest.approx(-2.0 / np.cosh(1.3) ** 2, rel=1e-14)


def test_step_piecewise_values():
    q = StepPotential(c_minus=0.0, c_plus=1.0)
    assert q(-0.5) == 0.0
    assert q(0.5) == 1.0
    assert q(0.0) == 1.0  # jump point carries the right value


def test_step_rejects_smoothness_claims():
    with pytest.raises(DataError):
        StepPotential(n=2)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-4.0, max_value=4.0))
def test_sech2_derivative_matches_central_difference(x):
    q = Sech2Potential(kappa=1.0)
    fd = central_diff(lambda t: q(t), x)
    exact = q(x, order=1)
    assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.6, max_value=1.8),
    st.floats(min_value=-1.0, max_value=1.0),
    st.integers(min_value=1, max_value=4),
)
def test_sech2_higher_derivatives_consistent(kappa, center, order):
    q = Sech2Potential(kappa=kappa, center=center)
    x = 0.37
    fd = central_diff(lambda t: q(t, order=order - 1), x)
    assert abs(fd - q(x, order=order)) <= 1e-5 * max(1.0, abs(q(x, order=order)))


def test_sech2_second_derivative_at_origin():
    # q = -2 sech^2, q'' = 4(1-t^2)(1-3t^2) with t = tanh -> q''(0) = 4
    q = Sech2Potential()
    assert q(0.0, order=2) == pytest.approx(4.0, rel=1e-13)


def test_bargmann_single_soliton_reduces_to_sech2():
    # one decay rate kappa with gamma = 2 kappa centers the well at 0
    q1 = BargmannPotential([1.0], [2.0])
    q2 = Sech2Potential()
    xs = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(q1(xs), q2(xs), atol=1e-11)


def test_bargmann_derivatives_match_finite_differences():
    q = BargmannPotential([0.8, 1.7], [1.0, 3.0])
    for x in (-1.2, 0.0, 0.9):
        fd1 = central_diff(lambda t: q(t), x)
        fd2 = central_diff(lambda t: q(t, order=1), x)
        assert abs(fd1 - q(x, order=1)) < 2e-7
        assert abs(fd2 - q(x, order=2)) < 2e-6


def test_bargmann_translation_by_gamma():
    # gamma = 2 kappa e^{2 kappa a} shifts the single well to x = a
    a = 0.7
    q = BargmannPotential([1.0], [2.0 * np.exp(2 * a)])
    ref = Sech2Potential(center=a)
    xs = np.linspace(-4, 4, 61)
    np.testing.assert_allclose(q(xs), ref(xs), atol=1e-11)


def test_expression_potential_with_derivatives():
    q = ExpressionPotential("-3*exp(-x**2/2)", c_minus=0.0, c_plus=0.0, n=4)
    xs = np.linspace(-2, 2, 11)
    np.testing.assert_allclose(q(xs), -3 * np.exp(-(xs**2) / 2), rtol=1e-14)
    fd = central_diff(lambda t: q(t), 0.8)
    assert abs(fd - q(0.8, order=1)) < 1e-7


def test_expression_with_heaviside_requires_n0():
    with pytest.raises(DataError):
        ExpressionPotential("Heaviside(x)", c_minus=0.0, c_plus=1.0, n=1, breakpoints=(0.0,))
    q = ExpressionPotential("Heaviside(x)", c_minus=0.0, c_plus=1.0, n=0, breakpoints=(0.0,))
    assert q(-1.0) == 0.0
    assert q(1.0) == 1.0
    with pytest.raises(SmoothnessError):
        q(1.0, order=1)


def test_grid_potential_round_trip():
    xs = np.linspace(-12, 12, 401)
    vals = -2.0 / np.cosh(xs) ** 2
    q = GridPotential(xs, vals, c_minus=0.0, c_plus=0.0, n=2)
    probe = np.linspace(-3, 3, 17)
    np.testing.assert_allclose(q(probe), -2.0 / np.cosh(probe) ** 2, atol=5e-7)
    assert q(20.0) == 0.0
    assert q(-20.0) == 0.0
    with pytest.raises(SmoothnessError):
        q(0.0, order=4)


def test_grid_potential_validates_monotone_abscissae():
    with pytest.raises(DataError):
        GridPotential([0, 1, 1, 2], [0, 0, 0, 0], 0.0, 0.0)


def test_derivative_order_above_declared_smoothness_raises():
    q = StepPotential()
    with pytest.raises(SmoothnessError):
        q(0.5, order=1)


def test_composite_sums_parts():
    q = CompositePotential(StepPotential(), [Sech2Potential(center=-2.0)])
    assert q(-2.0) == pytest.approx(-2.0, abs=1e-12)
    assert q(8.0) == pytest.approx(1.0 - 2 / np.cosh(10.0) ** 2, rel=1e-12)
    assert q.c_minus == 0.0 and q.c_plus == 1.0


def test_kind_factory_round_trip():
    for pot in (
        FreePotential(),
        StepPotential(),
        Sech2Potential(kappa=1.3, center=0.4),
        BargmannPotential([1.0, 2.0], [2.0, 12.0]),
        ExpressionPotential("-exp(-x**2)", 0.0, 0.0, n=3),
    ):
        clone = potential_from_dict(pot.to_dict())
        xs = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(clone(xs), pot(xs), rtol=1e-12, atol=1e-12)


def test_factory_rejects_unknown_kind():
    with pytest.raises(DataError):
        potential_from_dict({"kind": "mystery"})


# -- moment diagnostics ----------------------------------------------------


def test_moments_free_all_zero():
    diag = compute_moments(FreePotential(), m=2, n=1)
    for side in (-1, 1):
        assert np.all(diag.sigma[side][0] == 0.0)
        assert diag.moment_norm[side][1] == 0.0


def test_moments_sech2_sigma0_closed_form():
    # right tail integral of |q| = 2 sech^2: 2(1 - tanh x)
    diag = compute_moments(Sech2Potential(), m=2, n=0)
    f = diag.sigma_fn(1, 0)
    for x in (0.0, 0.5, 2.0):
        assert f(x) == pytest.approx(2 * (1 - np.tanh(x)), abs=1e-4)


def test_sigma_monotone_toward_infinity():
    diag = compute_moments(Sech2Potential(), m=1, n=0)
    right = diag.sigma[1][0]
    xs = diag.x
    d = np.diff(right[xs >= 0])
    assert np.all(d <= 1e-12)
    left = diag.sigma[-1][0]
    d = np.diff(left[xs <= 0])
    assert np.all(d >= -1e-12)


def test_sigma_hat_decays_to_zero():
    diag = compute_moments(Sech2Potential(), m=2, n=0)
    assert diag.sigma_hat[1][0][-1] == pytest.approx(0.0, abs=1e-8)
    assert diag.sigma_hat[-1][0][0] == pytest.approx(0.0, abs=1e-8)


def test_step_moments_finite_with_correct_background():
    diag = compute_moments(StepPotential(), m=1, n=0)
    assert diag.moment_norm[-1][1] == pytest.approx(0.0, abs=1e-12)
    assert diag.moment_norm[1][1] == pytest.approx(0.0, abs=1e-12)


def test_wrong_background_moment_grows_like_window():
    # |q - c_plus| on the left half-line of a step does not decay: the
    # weighted integral grows ~ X^2 and must be flagged as divergent
    q = StepPotential()
    w1 = moment_norm_against(q, -1, q.c_plus, j=1, x_inf=30.0)
    w2 = moment_norm_against(q, -1, q.c_plus, j=1, x_inf=60.0)
    assert w2 > 2.5 * w1


def test_moment_divergence_raises():
    # a declared class the profile does not belong to: slowly-decaying tail
    q = ExpressionPotential("1/(1+x**2)", 0.0, 0.0, m=2, n=0)
    with pytest.raises(MomentError):
        compute_moments(q, m=2, n=0, x_inf=30.0)


def test_tail_check():
    q = Sech2Potential()
    q.check_tail(30.0, 1e-10)
    with pytest.raises(DataError):
        q.check_tail(5.0, 1e-10)
