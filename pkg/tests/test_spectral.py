import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steplike_ist.spectral import (
    BELOW,
    COMPLEX,
    LOWER,
    OFF_AXIS,
    SIGMA1,
    SIGMA2,
    UPPER,
    classify,
    lift,
    momentum,
)


def test_branch_point_gives_zero_momentum():
    p = lift(1.0, UPPER, c_plus=1.0, c_minus=0.0)
    assert p.k_plus == 0.0
    assert p.k_minus == pytest.approx(1.0)


def test_side_convention_on_the_cut():
    up = lift(5.0, UPPER, c_plus=1.0, c_minus=0.0)
    lo = lift(5.0, LOWER, c_plus=1.0, c_minus=0.0)
    assert up.k_plus == pytest.approx(2.0)
    assert lo.k_plus == pytest.approx(-2.0)


def test_below_spectrum_momentum_is_positive_imaginary():
    for side in (UPPER, LOWER):
        p = lift(-1.0, side, c_plus=0.0, c_minus=0.0)
        assert p.k_plus == pytest.approx(1j)
        assert p.k_minus == pytest.approx(1j)


def test_classification_examples():
    assert lift(2.0, UPPER, 1.0, 0.0).region == SIGMA2
    assert lift(0.5, UPPER, 1.0, 0.0).region == SIGMA1
    assert lift(-1.0, UPPER, 1.0, 0.0).region == BELOW
    assert lift(0.5 + 1j, OFF_AXIS, 1.0, 0.0).region == COMPLEX


def test_on_axis_side_rejects_complex_lambda():
    with pytest.raises(ValueError):
        lift(1 + 1j, UPPER, 0.0, 0.0)


@settings(max_examples=80, deadline=None)
@given(
    st.floats(min_value=-50, max_value=50),
    st.floats(min_value=-5, max_value=5),
)
def test_round_trip_identity(lam, c):
    for side in (UPPER, LOWER):
        k = complex(momentum(lam, c, side))
        scale = max(abs(lam), abs(c), abs(k) ** 2, 1e-30)
        assert abs(k * k + c - lam) <= 4 * np.finfo(float).eps * scale


@settings(max_examples=80, deadline=None)
@given(
    st.floats(min_value=-20, max_value=20),
    st.floats(min_value=-20, max_value=20),
    st.floats(min_value=-5, max_value=5),
)
def test_off_axis_maps_into_upper_half_plane(re, im, c):
    lam = complex(re, im)
    k = complex(momentum(lam, c, OFF_AXIS))
    assert k.imag >= -1e-15
    scale = max(abs(lam), abs(c), abs(k) ** 2, 1e-30)
    assert abs(k * k + c - lam) <= 8 * np.finfo(float).eps * scale


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-3, max_value=50), st.floats(min_value=-2, max_value=2))
def test_schwarz_reflection_between_sides(lam, c):
    # boundary values on the two sides of the cut are related by
    # k(upper) = -conj(k(lower)); below the branch point they coincide
    ku = complex(momentum(lam, c, UPPER))
    kl = complex(momentum(lam, c, LOWER))
    assert ku == pytest.approx(-np.conj(kl), abs=1e-14)


def test_monotone_momentum_above_background():
    lams = np.linspace(1.5, 30.0, 50)
    ks = momentum(lams, 1.0, UPPER).real
    assert np.all(np.diff(ks) > 0)


def test_momentum_vectorized_matches_scalar():
    lams = np.array([-2.0, 0.0, 0.5, 3.0])
    ks = momentum(lams, 0.5, UPPER)
    for lam, k in zip(lams, ks):
        assert complex(momentum(lam, 0.5, UPPER)) == pytest.approx(complex(k))
