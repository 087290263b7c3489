"""Marchenko kernel assembly from scattering data.

The kernel on each side is a sum of three parts: the Fourier transform of
the reflection coefficient over its momentum grid, a finite sum of
exponentials from the bound states, and (only on the side whose background
is the higher one) an integral over the multiplicity-one band whose
endpoint square-root singularity is removed by the substitution
lambda = c_low + t^2.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .config import DEFAULTS
from .errors import DataError, WindowError
from .fourier import reflection_transform


@dataclass
class GLMKernel:
    """Assembled kernel F on one side, sampled and evaluable.

    The reflection and band parts are cubic-interpolated from their samples;
    the discrete part keeps its closed form so the exponentially large
    values far on the non-decaying side stay accurate in relative terms.
    """

    side: int
    x_grid: np.ndarray
    F_r: np.ndarray
    F_d: np.ndarray
    F_chi: np.ndarray
    F_total: np.ndarray
    F_prime: np.ndarray
    tail_fit_residual: float
    gammas: np.ndarray
    kappas: np.ndarray
    _spline_r: CubicSpline = field(repr=False, default=None)
    _spline_chi: CubicSpline = field(repr=False, default=None)

    def __post_init__(self):
        if self._spline_r is None:
            self._spline_r = CubicSpline(self.x_grid, self.F_r)
        if self._spline_chi is None:
            self._spline_chi = CubicSpline(self.x_grid, self.F_chi)

    def discrete_part(self, u):
        u = np.asarray(u, dtype=float)
        if len(self.gammas) == 0:
            return np.zeros_like(u)
        return np.einsum(
            "j,j...->...", self.gammas, np.exp(-np.outer(self.kappas, self.side * u))
        )

    def evaluate(self, u):
        """F(u) with cubic interpolation of the sampled parts."""
        u = np.asarray(u, dtype=float)
        if np.any(u < self.x_grid[0] - 1e-9) or np.any(u > self.x_grid[-1] + 1e-9):
            raise WindowError(
                "window too small: Marchenko kernel queried outside its sampled range"
            )
        return self._spline_r(u) + self._spline_chi(u) + self.discrete_part(u)

    def f_hat(self, x):
        """Rescaled kernel 2 F(2x)."""
        return 2.0 * self.evaluate(2.0 * np.asarray(x, dtype=float))

    def decay_cutoff(self, rel=1e-12):
        """Position on the decaying side beyond which |F| stays below
        rel * max(1, sup |F| over the decaying half-line)."""
        decaying = self.x_grid * self.side >= 0
        mag = np.abs(self.F_total[decaying])
        xs = self.x_grid[decaying]
        cut = rel * max(1.0, mag.max() if len(mag) else 1.0)
        keep = mag >= cut
        if not np.any(keep):
            return 0.0
        idx = np.flatnonzero(keep)[-1 if self.side > 0 else 0]
        return xs[idx]


def derivative_4th(f, h):
    """Fourth-order first derivative on a uniform grid, one-sided ends."""
    f = np.asarray(f, dtype=float)
    n = len(f)
    if n < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return out


def assemble_reflection_part(data, side, x_grid):
    """Fourier transform of the reflection coefficient onto the x grid.

    Folded onto k >= 0 using the conjugation symmetry, which makes the
    result exactly real; an inverse-power tail completes the band.
    """
    k, R = data.side_k_grid(side)
    if k is None or R is None:
        raise DataError("scattering data has no reflection samples for this side")
    sign = 1.0 if side > 0 else -1.0
    vals, rel = reflection_transform(k, R, sign * np.asarray(x_grid, dtype=float))
    return vals, rel


def assemble_discrete_part(data, side, x_grid):
    """Exact exponential sum over the bound states."""
    x_grid = np.asarray(x_grid, dtype=float)
    if len(data.eigenvalues) == 0:
        return np.zeros_like(x_grid)
    gammas = data.gamma_plus if side > 0 else data.gamma_minus
    c_side = data.c_plus if side > 0 else data.c_minus
    kappas = np.sqrt(c_side - np.asarray(data.eigenvalues))
    return np.einsum("j,j...->...", gammas, np.exp(-np.outer(kappas, side * x_grid)))


def assemble_multiplicity_one_part(data, side, x_grid):
    """Band integral over the multiplicity-one spectrum (high side only).

    After lambda = c_low + t^2 the integrand is smooth: the |k|^{-1}
    endpoint singularity cancels against the Jacobian, leaving
    (1/2 pi) int_0^b |T_low|^2 exp(-side * sqrt(b^2 - t^2) * x) dt
    evaluated with the stored Gauss-Legendre nodes.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    c_side = data.c_plus if side > 0 else data.c_minus
    if not data.has_sigma1 or c_side == data.c_low:
        return np.zeros_like(x_grid)
    if data.sigma1_t is None:
        raise DataError("scattering data lacks the multiplicity-one block")
    t = data.sigma1_t
    w = data.sigma1_w
    T2 = np.abs(data.sigma1_T_low) ** 2
    if not np.all(np.isfinite(T2)):
        raise DataError("invalid transmission samples on the multiplicity-one band")
    b2 = data.c_high - data.c_low
    decay = np.sqrt(np.maximum(b2 - t**2, 0.0))
    kernel = np.exp(-np.outer(decay, side * x_grid))
    return (w * T2) @ kernel / (2 * np.pi)


def assemble(data, side, x_grid=None, cfg=DEFAULTS):
    """Build the full kernel F_side = F_r + F_d + F_chi on a sample grid."""
    if x_grid is None:
        span = 2 * cfg.x_inf
        n = int(round(2 * span / cfg.f_grid_spacing)) + 1
        x_grid = np.linspace(-span, span, n)
    x_grid = np.asarray(x_grid, dtype=float)
    F_r, tail_rel = assemble_reflection_part(data, side, x_grid)
    F_d = assemble_discrete_part(data, side, x_grid)
    F_chi = assemble_multiplicity_one_part(data, side, x_grid)
    F_total = F_r + F_d + F_chi
    h = x_grid[1] - x_grid[0]
    F_prime = derivative_4th(F_total, h)

    gammas = (data.gamma_plus if side > 0 else data.gamma_minus).astype(float)
    c_side = data.c_plus if side > 0 else data.c_minus
    kappas = (
        np.sqrt(c_side - np.asarray(data.eigenvalues, dtype=float))
        if len(data.eigenvalues)
        else np.empty(0)
    )
    spline_r = CubicSpline(x_grid, F_r)
    spline_chi = CubicSpline(x_grid, F_chi)
    return GLMKernel(
        side=side,
        x_grid=x_grid,
        F_r=F_r,
        F_d=F_d,
        F_chi=F_chi,
        F_total=F_total,
        F_prime=F_prime,
        tail_fit_residual=tail_rel,
        gammas=gammas,
        kappas=kappas,
        _spline_r=spline_r,
        _spline_chi=spline_chi,
    )


def weighted_derivative_norm(kernel, m, window):
    """(1+|x|^m)-weighted L1 norm of F' over the decaying half-line [0, window]."""
    xs = kernel.x_grid
    sel = (xs * kernel.side >= 0) & (np.abs(xs) <= window)
    x = xs[sel]
    fp = np.abs(kernel.F_prime[sel])
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    val = trapezoid((1 + np.abs(x) ** m) * fp, x)
    return float(abs(val))


def synthetic_kernel(side, gammas, kappas, x_lo=-60.0, x_hi=60.0, n=6001):
    """Kernel with only a discrete part, from explicit bound-state data.

    Handy for exercising the Marchenko solver against separable closed
    forms without running the direct problem.
    """
    x_grid = np.linspace(x_lo, x_hi, n)
    gammas = np.asarray(gammas, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    F_d = np.einsum("j,j...->...", gammas, np.exp(-np.outer(kappas, side * x_grid)))
    zero = np.zeros_like(x_grid)
    return GLMKernel(
        side=side,
        x_grid=x_grid,
        F_r=zero,
        F_d=F_d,
        F_chi=zero,
        F_total=F_d,
        F_prime=derivative_4th(F_d, x_grid[1] - x_grid[0]),
        tail_fit_residual=0.0,
        gammas=gammas,
        kappas=kappas,
    )


def write_kernel_csv(kernel, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "F_r", "F_d", "F_chi", "F_total"])
        for i, x in enumerate(kernel.x_grid):
            writer.writerow(
                [
                    format(x, ".17g"),
                    format(kernel.F_r[i], ".17g"),
                    format(kernel.F_d[i], ".17g"),
                    format(kernel.F_chi[i], ".17g"),
                    format(kernel.F_total[i], ".17g"),
                ]
            )
