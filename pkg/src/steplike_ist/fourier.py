"""Oscillatory Fourier quadrature for reflection coefficients.

The reflection part of the Marchenko kernel is a half-line Fourier integral
of a sampled coefficient.  Plain Newton-Cotes rules lose accuracy once
x * dk is no longer small, so the band integral uses Filon's method: on each
pair of panels the sampled function is replaced by a quadratic and the
oscillation integrated exactly.  The band is completed by an analytic tail
from a 1/k + 1/k^2 fit at the top of the band.
"""

import numpy as np
from scipy.special import sici

from .errors import TailFitError

_THETA_SMALL = 1e-2


def _filon_weights(theta):
    """Filon alpha, beta, gamma with a series branch for small theta."""
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < _THETA_SMALL
    t = np.where(small, 1.0, theta)  # placeholder to avoid 0/0
    s, c = np.sin(t), np.cos(t)
    t3 = t**3
    alpha = (t**2 + t * s * c - 2 * s**2) / t3
    beta = 2 * (t * (1 + c**2) - 2 * s * c) / t3
    gamma = 4 * (s - t * c) / t3

    th2 = theta**2
    alpha_s = theta**3 * (2 / 45 + th2 * (-2 / 315 + th2 / 4725 * 2))
    beta_s = 2 / 3 + th2 * (2 / 15 + th2 * (-4 / 105 + th2 * (2 / 567)))
    gamma_s = 4 / 3 + th2 * (-2 / 15 + th2 * (1 / 210 - th2 / 11340))
    return (
        np.where(small, alpha_s, alpha),
        np.where(small, beta_s, beta),
        np.where(small, gamma_s, gamma),
    )


def filon_exp_integral(k, f, x, chunk=512):
    """integral of f(k) e^{i k x} dk over the sampled band, for each x.

    ``k`` must be uniform with an even number of panels; ``f`` may be
    complex.  Exact for quadratics between samples times the oscillation.
    """
    k = np.asarray(k, dtype=float)
    f = np.asarray(f, dtype=complex)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(k) - 1
    if n < 2 or n % 2:
        raise ValueError("Filon rule needs an even number of panels >= 2")
    h = k[1] - k[0]
    if not np.allclose(np.diff(k), h, rtol=1e-12, atol=1e-12):
        raise ValueError("Filon rule needs a uniform grid")

    even = np.zeros(len(k))
    even[0::2] = 1.0
    odd = 1.0 - even

    out = np.empty(len(x), dtype=complex)
    for start in range(0, len(x), chunk):
        xs = x[start : start + chunk]
        # the cos/sin Filon rules recombine into one complex formula:
        # h [ i alpha (f_0 e^{ixk_0} - f_N e^{ixk_N}) + beta E + gamma O ]
        # with E, O the endpoint-corrected even/odd phase sums
        alpha, beta, gamma = _filon_weights(xs * h)
        phase = np.exp(1j * np.outer(xs, k))
        end_a = f[0] * phase[:, 0]
        end_b = f[-1] * phase[:, -1]
        e_sum = phase @ (f * even) - 0.5 * (end_a + end_b)
        o_sum = phase @ (f * odd)
        out[start : start + chunk] = h * (
            1j * alpha * (end_a - end_b) + beta * e_sum + gamma * o_sum
        )
    return out


def fit_inverse_power_tail(k, f, fraction=0.2, n_terms=4):
    """Least-squares sum of a_p / k^p (p = 1..n_terms) on the top
    ``fraction`` of the band.

    The extra powers keep curvature from leaking into the leading 1/k
    coefficient, which controls the extrapolated tail.  Returns
    (coefficients, relative_residual).
    """
    k = np.asarray(k, dtype=float)
    f = np.asarray(f, dtype=complex)
    lo = k[-1] * (1 - fraction)
    sel = k >= lo
    kk = k[sel]
    design = np.column_stack([kk ** (-p) for p in range(1, n_terms + 1)])
    coef, *_ = np.linalg.lstsq(design, f[sel], rcond=None)
    resid = design @ coef - f[sel]
    scale = np.linalg.norm(f[sel])
    rel = float(np.linalg.norm(resid) / scale) if scale > 0 else 0.0
    return coef, rel


def tail_exp_integral(k_max, coef, x):
    """integral_{k_max}^inf sum_p coef[p-1] k^{-p} e^{i k x} dk per x.

    The 1/k part is conditionally convergent and evaluated as an improper
    Riemann integral via sine/cosine integrals; higher powers follow by
    integration by parts.  At x = 0 the 1/k term is log-divergent and
    dropped (a consistent integrable coefficient has coef[0] ~ 0, so this
    only matters for malformed data).
    """
    coef = np.atleast_1d(np.asarray(coef, dtype=complex))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(len(x), dtype=complex)

    nz = x != 0
    xa = np.abs(x[nz])
    si, ci = sici(k_max * xa)
    t = -ci + 1j * np.sign(x[nz]) * (np.pi / 2 - si)
    ph = np.exp(1j * k_max * x[nz])
    acc = coef[0] * t
    for p in range(1, len(coef)):
        # T_{p+1} = e^{i k_max x}/(p k_max^p) + (i x / p) T_p
        t = ph / (p * k_max**p) + (1j * x[nz] / p) * t
        acc = acc + coef[p] * t
    out[nz] = acc
    out[~nz] = sum(coef[p] / (p * k_max**p) for p in range(1, len(coef)))
    return out


def reflection_transform(k, R, x, *, tail_fraction=0.2, tail_warn=0.1):
    """(1/2 pi) integral over the full line of R(k) e^{i k x} dk folded onto
    k >= 0 via R(-k) = conj R(k), with an analytic inverse-power tail.

    Returns (values, tail_fit_relative_residual).  The fold makes the result
    exactly real.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    band = filon_exp_integral(k, R, x)
    coef, rel = fit_inverse_power_tail(k, R, fraction=tail_fraction)
    tail = tail_exp_integral(k[-1], coef, x)
    vals = (band + tail).real / np.pi
    return vals, rel


def check_tail_fit(rel, context=""):
    if rel > 0.1:
        raise TailFitError(
            f"insufficient k_max: tail fit residual {rel:.1%} exceeds 10% {context}".strip()
        )
