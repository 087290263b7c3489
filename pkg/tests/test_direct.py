import numpy as np
import pytest

from steplike_ist.config import NumericsConfig
from steplike_ist.direct import (
    Sweep,
    classify_resonance,
    compute_coefficients,
    compute_jost,
    compute_norming_constants,
    compute_wronskian,
    find_bound_states,
)
from steplike_ist.errors import EigenpairError
from steplike_ist.potentials import (
    BargmannPotential,
    CompositePotential,
    ExpressionPotential,
    FreePotential,
    Sech2Potential,
    StepPotential,
)
from steplike_ist.spectral import UPPER, lift

CFG = NumericsConfig()


# -- closed-form oracles -----------------------------------------------------


def soliton_T(k):
    # reflectionless well -2 sech^2 x: T(k) = (k + i)/(k - i)
    return (k + 1j) / (k - 1j)


def soliton_W(k):
    # from 2ik T^{-1} = W
    return 2j * k * (k - 1j) / (k + 1j)


def step_quantities(lam, c_minus=0.0, c_plus=1.0):
    kp = np.sqrt(complex(lam - c_plus))
    if kp.imag < 0:
        kp = -kp
    km = np.sqrt(complex(lam - c_minus))
    W = 1j * (kp + km)
    T_minus = 2 * km / (kp + km)
    R_minus = (km - kp) / (km + kp)
    return W, T_minus, R_minus


# -- Jost solutions ----------------------------------------------------------


def test_free_jost_is_plane_wave():
    q = FreePotential()
    pt = lift(2.56, UPPER, 0.0, 0.0)
    for side in (+1, -1):
        ev = compute_jost(q, pt, side, 0.7)
        k = pt.momentum(side)
        assert ev.phi == pytest.approx(np.exp(1j * side * k * 0.7), abs=1e-12)
        assert ev.reduced == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("k", [0.3, 1.0, 4.2])
@pytest.mark.parametrize("x", [-1.4, 0.0, 2.1])
def test_soliton_jost_closed_form(k, x):
    # phi_+(k, x) = e^{ikx} (k + i tanh x)/(k + i)
    q = Sech2Potential()
    pt = lift(k**2, UPPER, 0.0, 0.0)
    ev = compute_jost(q, pt, +1, x)
    want = np.exp(1j * k * x) * (k + 1j * np.tanh(x)) / (k + 1j)
    assert ev.phi == pytest.approx(want, abs=1e-9)
    dwant = 1j * k * want + np.exp(1j * k * x) * (1j / np.cosh(x) ** 2) / (k + 1j)
    assert ev.phi_prime == pytest.approx(dwant, abs=1e-9)


def test_step_jost_by_interface_matching():
    # for x <= 0: phi_+ = alpha e^{i k_- x} + beta e^{-i k_- x} with C^1 match
    q = StepPotential()
    lam = 5.0
    kp, km = np.sqrt(lam - 1), np.sqrt(lam)
    alpha, beta = (km + kp) / (2 * km), (km - kp) / (2 * km)
    pt = lift(lam, UPPER, 1.0, 0.0)
    for x in (-0.5, -2.2):
        ev = compute_jost(q, pt, +1, x)
        want = alpha * np.exp(1j * km * x) + beta * np.exp(-1j * km * x)
        assert ev.phi == pytest.approx(want, abs=1e-9)


# -- Wronskian ---------------------------------------------------------------


def test_free_wronskian():
    q = FreePotential()
    pt = lift(4.0, UPPER, 0.0, 0.0)
    assert compute_wronskian(q, pt) == pytest.approx(4j, abs=1e-10)


@pytest.mark.parametrize("k", [0.5, 1.7, 3.0])
def test_soliton_wronskian_closed_form(k):
    q = Sech2Potential()
    pt = lift(k**2, UPPER, 0.0, 0.0)
    assert compute_wronskian(q, pt) == pytest.approx(soliton_W(k), abs=1e-9)


@pytest.mark.parametrize("lam", [1.5, 3.0, 9.0])
def test_step_wronskian_closed_form(lam):
    q = StepPotential()
    pt = lift(lam, UPPER, 1.0, 0.0)
    W, _, _ = step_quantities(lam)
    assert compute_wronskian(q, pt) == pytest.approx(W, abs=1e-9)


def test_wronskian_independent_of_matching_point():
    q = CompositePotential(StepPotential(), [Sech2Potential(center=-1.0)])
    pt = lift(3.7, UPPER, 1.0, 0.0)
    vals = [compute_wronskian(q, pt, x_m=xm) for xm in (-1.5, 0.0, 2.0)]
    for v in vals[1:]:
        assert abs(v - vals[0]) <= 1e-6 * abs(vals[0])


# -- coefficients ------------------------------------------------------------


def test_free_coefficients():
    q = FreePotential()
    pt = lift(2.0, UPPER, 0.0, 0.0)
    cs = compute_coefficients(q, pt)
    assert cs.T_plus == pytest.approx(1.0, abs=1e-10)
    assert cs.T_minus == pytest.approx(1.0, abs=1e-10)
    assert cs.R_plus == pytest.approx(0.0, abs=1e-10)
    assert cs.R_minus == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("lam", [1.3, 2.0, 6.5, 26.0])
def test_step_coefficients_closed_form(lam):
    q = StepPotential()
    pt = lift(lam, UPPER, 1.0, 0.0)
    cs = compute_coefficients(q, pt)
    _, T_minus, R_minus = step_quantities(lam)
    assert cs.T_minus == pytest.approx(T_minus, abs=1e-9)
    assert cs.R_minus == pytest.approx(R_minus, abs=1e-9)


def test_step_sigma1_full_reflection():
    # inside the multiplicity-one band the low-side reflection is unimodular
    q = StepPotential()
    pt = lift(0.5, UPPER, 1.0, 0.0)
    cs = compute_coefficients(q, pt)
    assert cs.R_plus is None  # k_+ imaginary there
    assert abs(cs.R_minus) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("k", [0.4, 1.1, 2.8])
def test_soliton_is_reflectionless(k):
    q = Sech2Potential()
    pt = lift(k**2, UPPER, 0.0, 0.0)
    cs = compute_coefficients(q, pt)
    assert abs(cs.R_plus) < 1e-9
    assert abs(cs.R_minus) < 1e-9
    assert cs.T_plus == pytest.approx(soliton_T(k), abs=1e-9)


# -- bound states ------------------------------------------------------------


def test_free_has_no_bound_states():
    assert len(find_bound_states(FreePotential(), cfg=CFG)) == 0


def test_step_has_no_bound_states():
    assert len(find_bound_states(StepPotential(), cfg=CFG)) == 0


def test_soliton_eigenvalue():
    ev = find_bound_states(Sech2Potential(), cfg=CFG)
    assert len(ev) == 1
    assert ev[0] == pytest.approx(-1.0, abs=1e-8)


def test_two_soliton_eigenvalues():
    q = BargmannPotential([1.0, 2.0], [2.0, 12.0])
    ev = find_bound_states(q, cfg=CFG)
    assert len(ev) == 2
    np.testing.assert_allclose(ev, [-4.0, -1.0], atol=1e-8)


def test_soliton_norming_constants():
    q = Sech2Potential()
    gp, gm, mu, resid = compute_norming_constants(q, -1.0, cfg=CFG)
    assert gp == pytest.approx(2.0, abs=1e-8)
    assert gm == pytest.approx(2.0, abs=1e-8)
    assert mu == pytest.approx(1.0, abs=1e-9)
    assert resid < 1e-4


def test_translated_soliton_norming_constants():
    a = 0.7
    q = Sech2Potential(center=a)
    ev = find_bound_states(q, cfg=CFG)
    gp, gm, mu, _ = compute_norming_constants(q, ev[0], cfg=CFG)
    assert gp == pytest.approx(2 * np.exp(2 * a), rel=1e-7)
    assert gm == pytest.approx(2 * np.exp(-2 * a), rel=1e-7)
    assert gp * gm == pytest.approx(4.0, rel=1e-7)


def test_residue_identity_value():
    # dW/dlambda at the soliton eigenvalue is 1/2, so (dW/dlambda)^-2 = 4
    q = Sech2Potential()
    h = 1e-5
    Wp = compute_wronskian(q, lift(-1.0 + h, UPPER, 0.0, 0.0))
    Wm = compute_wronskian(q, lift(-1.0 - h, UPPER, 0.0, 0.0))
    dW = (Wp.real - Wm.real) / (2 * h)
    assert dW == pytest.approx(0.5, abs=1e-6)


def test_norming_rejects_non_eigenvalue():
    with pytest.raises(EigenpairError):
        compute_norming_constants(Sech2Potential(), -0.37, cfg=CFG)


# -- resonance ---------------------------------------------------------------


def test_free_potential_is_resonant_with_gamma_2():
    resonant, gamma, resid = classify_resonance(FreePotential(), cfg=CFG)
    assert resonant
    assert gamma == pytest.approx(2.0, abs=0.05)


def test_soliton_is_resonant_with_gamma_minus_2():
    # W(k) = 2ik(k-i)/(k+i) -> W/(i k) -> -2 as k -> 0
    resonant, gamma, resid = classify_resonance(Sech2Potential(), cfg=CFG)
    assert resonant
    assert gamma == pytest.approx(-2.0, abs=0.05)


def test_step_is_not_resonant():
    resonant, gamma, resid = classify_resonance(StepPotential(), cfg=CFG)
    assert not resonant
    # |W(c_low)| = sqrt(c_high - c_low) = 1 here
    assert resid > 0.1


# -- symmetry and unitarity on sweeps ---------------------------------------


@pytest.mark.parametrize(
    "make",
    [
        lambda: StepPotential(),
        lambda: Sech2Potential(),
        lambda: CompositePotential(StepPotential(), [Sech2Potential(center=-2.0)]),
    ],
)
def test_unitarity_and_cross_relation(make):
    q = make()
    lams = q.c_high + np.linspace(0.3, 6.0, 15) ** 2
    sw = Sweep(q, lams, cfg=CFG)
    kp, km = sw.k_plus.real, sw.k_minus.real
    Tp, Tm = sw.transmission(+1), sw.transmission(-1)
    Rp, Rm = sw.reflection(+1), sw.reflection(-1)
    assert np.max(np.abs(1 - np.abs(Rp) ** 2 - (km / kp) * np.abs(Tp) ** 2)) < 1e-6
    assert np.max(np.abs(1 - np.abs(Rm) ** 2 - (kp / km) * np.abs(Tm) ** 2)) < 1e-6
    assert np.max(np.abs(np.conj(Rp) * Tp + Rm * np.conj(Tp))) < 1e-6
    # analytic continuation consistency: both sides give one Wronskian
    W_from_plus = 2j * sw.k_plus / Tp
    W_from_minus = 2j * sw.k_minus / Tm
    assert np.max(np.abs(W_from_plus - W_from_minus) / np.abs(W_from_plus)) < 1e-9
