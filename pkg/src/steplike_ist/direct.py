"""Direct scattering: Jost solutions, Wronskian, coefficients, bound states,
norming constants, and the resonance classification at the lower band edge.

Everything is computed from the reduced Jost functions integrated inward
from the two ends of the truncation window; the Wronskian is evaluated at a
matching point where no exponential factors appear.
"""

from dataclasses import dataclass

import numpy as np

from . import jost, spectral
from .config import DEFAULTS
from .errors import EdgeFitError, EigenpairError, SearchError, WindowError, WronskianZeroError
from .scattering_data import EdgeLadder, ScatteringData
from .spectral import UPPER, lift, momentum


@dataclass
class JostEvaluation:
    """One Jost solution at one spectral point and position."""

    point: spectral.SpectralPoint
    side: int
    x: float
    phi: complex
    phi_prime: complex
    reduced: complex
    reduced_prime: complex


@dataclass
class CoefficientSet:
    """Scattering coefficients at one spectral point (None where undefined)."""

    lam: complex
    wronskian: complex
    T_plus: complex
    T_minus: complex
    R_plus: complex
    R_minus: complex


def compute_jost(potential, point, side, x, cfg=DEFAULTS):
    """Jost solution phi_side(lambda, x) via the reduced ODE."""
    k = point.momentum(side)
    h, hp = jost.reduced_at(
        potential, side, k, x, x_inf=cfg.x_inf, rtol=cfg.ode_rtol, atol=cfg.ode_atol
    )
    osc = np.exp(1j * side * k * x)
    return JostEvaluation(
        point=point,
        side=side,
        x=x,
        phi=h * osc,
        phi_prime=(hp + 1j * side * k * h) * osc,
        reduced=h,
        reduced_prime=hp,
    )


class Sweep:
    """Reduced Jost data for an array of energies at the matching point,
    with the scattering coefficients assembled on demand."""

    def __init__(self, potential, lam, side=UPPER, cfg=DEFAULTS, rtol=None):
        lam = np.atleast_1d(np.asarray(lam))
        self.lam = lam
        self.side = side
        self.potential = potential
        self.x_m = cfg.x_match
        rtol = cfg.ode_rtol if rtol is None else rtol
        self.k_plus = np.asarray(momentum(lam, potential.c_plus, side), dtype=complex)
        self.k_minus = np.asarray(momentum(lam, potential.c_minus, side), dtype=complex)
        kw = dict(x_inf=cfg.x_inf, rtol=rtol, atol=cfg.ode_atol)
        self.h_plus, self.hp_plus = jost.reduced_at(potential, +1, self.k_plus, self.x_m, **kw)
        self.h_minus, self.hp_minus = jost.reduced_at(potential, -1, self.k_minus, self.x_m, **kw)

        osc_p = np.exp(1j * self.k_plus * self.x_m)
        osc_m = np.exp(-1j * self.k_minus * self.x_m)
        self.phi_plus = self.h_plus * osc_p
        self.dphi_plus = (self.hp_plus + 1j * self.k_plus * self.h_plus) * osc_p
        self.phi_minus = self.h_minus * osc_m
        self.dphi_minus = (self.hp_minus - 1j * self.k_minus * self.h_minus) * osc_m

    @property
    def wronskian(self):
        return self.phi_minus * self.dphi_plus - self.phi_plus * self.dphi_minus

    def transmission(self, side):
        k = self.k_plus if side > 0 else self.k_minus
        return 2j * k / self.wronskian

    def reflection(self, side):
        """R_side where k_side is real (NaN elsewhere)."""
        W = self.wronskian
        if side > 0:
            num = -(self.phi_minus * np.conj(self.dphi_plus) - np.conj(self.phi_plus) * self.dphi_minus)
            k = self.k_plus
        else:
            num = self.phi_plus * np.conj(self.dphi_minus) - np.conj(self.phi_minus) * self.dphi_plus
            k = self.k_minus
        vals = num / W
        vals = np.where(np.abs(k.imag) == 0, vals, np.nan + 0j)
        return vals


def compute_wronskian(potential, point, x_m=None, cfg=DEFAULTS):
    """W(lambda) = W(phi_-, phi_+) evaluated at the matching point."""
    if x_m is not None and x_m != cfg.x_match:
        cfg = cfg.with_overrides(x_match=x_m)
    sw = Sweep(potential, np.array([point.lam]), side=point.side, cfg=cfg)
    return complex(sw.wronskian[0])


def compute_coefficients(potential, point, cfg=DEFAULTS):
    """Transmission and reflection coefficients at one spectral point.

    On the multiplicity-one band only the reflection whose momentum is real
    is emitted; both transmissions always follow from the Wronskian.
    """
    sw = Sweep(potential, np.array([point.lam]), side=point.side, cfg=cfg)
    W = complex(sw.wronskian[0])
    scale = max(abs(point.k_plus), abs(point.k_minus), 1.0)
    if abs(W) < 1e-12 * scale:
        lam_r = point.lam.real
        near_edge = abs(lam_r - min(potential.c_plus, potential.c_minus)) < 1e-8
        if not near_edge:
            raise WronskianZeroError(
                f"spurious Wronskian zero at lambda = {point.lam}: |W| = {abs(W):.2e}"
            )
    T_plus = complex(sw.transmission(+1)[0])
    T_minus = complex(sw.transmission(-1)[0])
    r_plus = sw.reflection(+1)[0]
    r_minus = sw.reflection(-1)[0]
    return CoefficientSet(
        lam=point.lam,
        wronskian=W,
        T_plus=T_plus,
        T_minus=T_minus,
        R_plus=None if np.isnan(r_plus) else complex(r_plus),
        R_minus=None if np.isnan(r_minus) else complex(r_minus),
    )


# ---------------------------------------------------------------------------
# discrete spectrum


def _wronskian_below(potential, lams, cfg):
    """Real Wronskian samples below the continuous spectrum."""
    sw = Sweep(potential, np.asarray(lams, dtype=float), cfg=cfg)
    return sw.wronskian.real


def find_bound_states(potential, lambda_floor=None, cfg=DEFAULTS):
    """All zeros of the Wronskian below the lower background.

    Sign-change scan plus bisection; an oscillation-count oracle guards
    against missed zeros (the count of sign changes of the left Jost
    solution at the top of the search interval equals the number of
    eigenvalues below it).
    """
    c_low = min(potential.c_plus, potential.c_minus)
    if lambda_floor is None:
        qmin = potential.min_value(cfg.x_inf)
        lambda_floor = qmin - 0.05 * (1.0 + abs(qmin))
    top = c_low - cfg.delta_edge
    if lambda_floor >= top:
        return np.empty(0)

    lams = np.linspace(lambda_floor, top, cfg.n_scan)
    W = _wronskian_below(potential, lams, cfg)

    brackets = []
    for i in range(len(lams) - 1):
        if W[i] == 0.0:
            brackets.append((lams[i], lams[i]))
        elif W[i] * W[i + 1] < 0:
            brackets.append((lams[i], lams[i + 1]))

    roots = []
    for a, b in brackets:
        if a == b:
            roots.append(a)
            continue
        wa = _wronskian_below(potential, [a], cfg)[0]
        while b - a > cfg.eps_lambda:
            mid = 0.5 * (a + b)
            wm = _wronskian_below(potential, [mid], cfg)[0]
            if wm == 0.0:
                a = b = mid
                break
            if wa * wm < 0:
                b = mid
            else:
                a, wa = mid, wm
        roots.append(0.5 * (a + b))

    expected = jost.count_nodes(potential, top, x_inf=cfg.x_inf)
    if expected != len(roots):
        raise SearchError(
            f"eigenvalue search incomplete, refine scan: oscillation count {expected} "
            f"but {len(roots)} sign changes found"
        )
    return np.array(sorted(roots))


def compute_norming_constants(potential, eigenvalue, cfg=DEFAULTS, zavis_tol=1e-3):
    """Norming constants and the proportionality constant at one eigenvalue.

    The squared-eigenfunction integral is split at the matching point and
    each half is computed on its own stable side; the derivative identity
    (dW/dlambda)^-2 = gamma_+ gamma_- cross-checks the eigenpair.
    """
    lam = float(eigenvalue)
    c_low = min(potential.c_plus, potential.c_minus)
    if lam >= c_low:
        raise EigenpairError("eigenvalues must lie below the lower background")
    kappa_p = np.sqrt(potential.c_plus - lam)
    kappa_m = np.sqrt(potential.c_minus - lam)
    x_m = cfg.x_match
    kw = dict(x_inf=cfg.x_inf, rtol=cfg.ode_rtol, atol=cfg.ode_atol, quadrature=True)
    h_p, hp_p, z_p = jost.reduced_at(potential, +1, 1j * kappa_p, x_m, **kw)
    h_m, hp_m, z_m = jost.reduced_at(potential, -1, 1j * kappa_m, x_m, **kw)

    # window-truncation bound on the missing tails of int phi^2
    tail_p = np.exp(-2 * kappa_p * (cfg.x_inf - abs(x_m))) / (2 * kappa_p)
    tail_m = np.exp(-2 * kappa_m * (cfg.x_inf - abs(x_m))) / (2 * kappa_m)

    phi_p = h_p * np.exp(-kappa_p * x_m)
    phi_m = h_m * np.exp(kappa_m * x_m)
    I_plus = z_p.real
    I_minus = z_m.real
    if abs(phi_m) < 1e-12:
        raise EigenpairError("matching point sits on a node of the left eigenfunction")
    mu = (phi_p / phi_m).real

    total_plus = I_plus + mu**2 * I_minus  # int phi_+^2 over the line
    if min(I_plus, I_minus) <= 0:
        raise EigenpairError("eigenfunction normalization integral is not positive")
    if tail_p + mu**2 * tail_m > 1e-8 * total_plus:
        raise WindowError(
            f"window too small: truncated eigenfunction mass near eigenvalue {lam:.6g}"
        )
    gamma_plus = 1.0 / total_plus
    gamma_minus = mu**2 * gamma_plus

    # residue identity as an eigenpair consistency check
    h = cfg.dw_step * max(1.0, abs(lam))
    Wm, Wp = _wronskian_below(potential, [lam - h, lam + h], cfg)
    dW = (Wp - Wm) / (2 * h)
    resid = abs(dW ** (-2) - gamma_plus * gamma_minus) / (gamma_plus * gamma_minus)
    if resid > zavis_tol:
        raise EigenpairError(
            f"inconsistent eigenpair at lambda = {lam:.8g}: residue identity off by {resid:.2e}"
        )
    return gamma_plus, gamma_minus, mu, resid


# ---------------------------------------------------------------------------
# resonance classification


def classify_resonance(potential, cfg=DEFAULTS):
    """Detect a vanishing Wronskian at the lower band edge.

    Resonant case: least-squares fit of W(lambda) / (i sqrt(lambda - c_low))
    over a geometric ladder; the intercept estimates the edge coefficient.
    Returns (resonant, gamma_res_or_None, fit_or_scale_residual).
    """
    c_low = min(potential.c_plus, potential.c_minus)
    sw = Sweep(potential, np.array([c_low, c_low + 1.0]), cfg=cfg)
    W0, W1 = sw.wronskian
    scale = abs(W1)
    if scale == 0:
        raise WronskianZeroError("Wronskian vanished at the reference point above the edge")
    if abs(W0) >= cfg.eps_resonance * scale:
        return False, None, abs(W0) / scale

    eps = cfg.edge_ladder_start * 2.0 ** -np.arange(cfg.edge_ladder_rungs)
    lams = c_low + eps
    W = Sweep(potential, lams, cfg=cfg).wronskian
    vals = W / (1j * np.sqrt(eps))
    # the limit of W/(i sqrt(lambda - c_low)) is a real constant; absorb the
    # leading corrections into complex sqrt(eps) and eps slopes and require
    # a real intercept
    design = np.column_stack([np.ones_like(eps), np.sqrt(eps), eps]).astype(complex)
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    gamma = float(coef[0].real)
    resid = float(np.linalg.norm(design @ coef - vals) / max(abs(gamma), 1e-30))
    if abs(coef[0].imag) > 0.05 * max(abs(gamma), 1e-30):
        raise EdgeFitError("edge behavior not sqrt-type: edge coefficient is not real")
    if resid > 0.1 or gamma == 0.0:
        raise EdgeFitError(f"edge behavior not sqrt-type: fit residual {resid:.2e}")
    return True, gamma, resid


# ---------------------------------------------------------------------------
# full data assembly


def _fourier_grid(cfg):
    n = int(np.ceil(cfg.k_max / cfg.dk))
    if n % 2:
        n += 1
    return np.linspace(0.0, n * cfg.dk, n + 1)


def _edge_ladder(potential, side, cfg):
    c_side = potential.background(side)
    eps = cfg.edge_ladder_start * 2.0 ** -np.arange(18)
    lams = c_side + eps
    sw = Sweep(potential, lams, cfg=cfg)
    return EdgeLadder(
        lam=lams, R=sw.reflection(side), T=sw.transmission(side), W=sw.wronskian.copy()
    )


def build_scattering_data(potential, cfg=DEFAULTS, progress=None):
    """Run the whole direct problem and package the results."""

    def say(msg):
        if progress:
            progress(msg)

    potential.check_tail(cfg.x_inf, cfg.eps_tail)
    c_plus, c_minus = potential.c_plus, potential.c_minus
    c_low, c_high = min(c_plus, c_minus), max(c_plus, c_minus)
    data = ScatteringData(c_plus=c_plus, c_minus=c_minus)
    data.meta = {
        "x_inf": cfg.x_inf,
        "k_max": cfg.k_max,
        "dk": cfg.dk,
        "x_match": cfg.x_match,
        "ode_rtol": cfg.ode_rtol,
    }

    # reflection samples on uniform momentum grids (k = 0 slot evaluated just
    # off the edge where the defining formula is 0/0)
    say("sweeping reflection coefficients")
    k_grid = _fourier_grid(cfg)
    k_eval = k_grid.copy()
    k_eval[0] = 1e-5
    same_background = c_plus == c_minus
    sweep_plus = Sweep(potential, c_plus + k_eval**2, cfg=cfg)
    data.k_plus = k_grid
    data.R_plus_k = sweep_plus.reflection(+1)
    if same_background:
        data.k_minus = k_grid
        data.R_minus_k = sweep_plus.reflection(-1)
    else:
        sweep_minus = Sweep(potential, c_minus + k_eval**2, cfg=cfg)
        data.k_minus = k_grid
        data.R_minus_k = sweep_minus.reflection(-1)

    # common check grid on the multiplicity-two band plus a high-energy ladder
    say("sampling the multiplicity-two band")
    k_common = np.linspace(cfg.k_sigma2_min, cfg.k_sigma2_max, cfg.n_sigma2)
    lam_common = np.concatenate(
        [c_high + k_common**2, np.geomspace(cfg.lambda_ladder_lo, cfg.lambda_ladder_hi, cfg.n_ladder)]
    )
    lam_common = np.unique(lam_common[lam_common > c_high])
    sw2 = Sweep(potential, lam_common, cfg=cfg)
    data.lam_sigma2 = lam_common
    data.T_plus = sw2.transmission(+1)
    data.T_minus = sw2.transmission(-1)
    data.R_plus = sw2.reflection(+1)
    data.R_minus = sw2.reflection(-1)

    # multiplicity-one block at the square-root-substitution quadrature
    # nodes: lambda = c_low + t^2 absorbs the |k|^{-1} endpoint singularity
    # and t = b sin(phi) smooths the sqrt(b^2 - t^2) exponent at the top,
    # so Gauss-Legendre in phi converges spectrally; the stored (t, w)
    # pairs remain a plain quadrature rule for integrals dt over [0, b]
    if not same_background:
        say("sampling the multiplicity-one band")
        b = np.sqrt(c_high - c_low)
        phi_nodes, phi_weights = np.polynomial.legendre.leggauss(cfg.n_sigma1)
        phi = 0.25 * np.pi * (phi_nodes + 1.0)
        t = b * np.sin(phi)
        w = b * np.cos(phi) * 0.25 * np.pi * phi_weights
        sw1 = Sweep(potential, c_low + t**2, cfg=cfg)
        low = -1 if c_minus <= c_plus else +1
        data.sigma1_t = t
        data.sigma1_w = w
        data.sigma1_T_low = sw1.transmission(low)
        data.sigma1_R_low = sw1.reflection(low)

    # discrete spectrum
    say("locating bound states")
    data.eigenvalues = find_bound_states(potential, cfg=cfg)
    gp, gm, mus = [], [], []
    for lam_j in data.eigenvalues:
        g_plus, g_minus, mu, _ = compute_norming_constants(potential, lam_j, cfg=cfg)
        gp.append(g_plus)
        gm.append(g_minus)
        mus.append(mu)
    data.gamma_plus = np.array(gp)
    data.gamma_minus = np.array(gm)
    data.mu = np.array(mus)

    say("classifying the band edge")
    data.resonant, data.gamma_res, edge_resid = classify_resonance(potential, cfg=cfg)
    data.meta["edge_residual"] = edge_resid

    data.edge = {s: _edge_ladder(potential, s, cfg) for s in (1, -1)}

    # lower-side subsample for the conjugation-symmetry check
    say("sampling the lower boundary side")
    sub = lam_common[:: max(1, len(lam_common) // 24)]
    swl = Sweep(potential, sub, side=spectral.LOWER, cfg=cfg)
    data.lower = {
        "lam": sub,
        "T_plus": swl.transmission(+1),
        "T_minus": swl.transmission(-1),
        "R_plus": swl.reflection(+1),
        "R_minus": swl.reflection(-1),
    }

    # unitarity summary on the common grid
    kp, km = sw2.k_plus.real, sw2.k_minus.real
    resid_p = np.abs(1 - np.abs(data.R_plus) ** 2 - (km / kp) * np.abs(data.T_plus) ** 2)
    resid_m = np.abs(1 - np.abs(data.R_minus) ** 2 - (kp / km) * np.abs(data.T_minus) ** 2)
    data.meta["unitarity_residual"] = float(max(resid_p.max(), resid_m.max()))
    return data
