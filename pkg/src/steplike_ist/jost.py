"""Reduced Jost solutions by ODE integration.

The Jost solution on side s (s = +1 or -1) is written phi = h e^{i s k x};
the reduced function h solves

    h'' + s 2ik h' = (q - c_s) h,     h -> 1, h' -> 0 at s * infinity,

which keeps every quantity O(1) along the integration and avoids the
exp(Im k * x) overflow of phi itself.  Integration always starts at the far
end of the truncation window on the same side, so contamination by the
growing mode never builds up.

Sweeps over many spectral parameters stack the systems into one vector ODE,
chunked by oscillation frequency so slowly-oscillating components do not pay
for the smallest step of the fastest one.
"""

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError

_CHUNK_EDGES = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, np.inf)
_MAX_CHUNK = 1024
_BLOWUP = 1e120


def _segments(x_start, x_end, breakpoints):
    """Integration nodes from x_start to x_end, split at interior jumps."""
    lo, hi = min(x_start, x_end), max(x_start, x_end)
    inner = sorted({float(b) for b in breakpoints if lo < b < hi})
    if x_start > x_end:
        inner = inner[::-1]
    return [x_start] + inner + [x_end]


def _integrate_chunk(potential, side, k, x_start, x_end, rtol, atol, quadrature):
    n = len(k)
    c_side = potential.background(side)
    two_ik = side * 2j * k

    if quadrature:
        def rhs(x, y):
            h, hp = y[:n], y[n : 2 * n]
            q = potential(x) - c_side
            phi = h * np.exp(1j * side * k * x)
            return np.concatenate([hp, q * h - two_ik * hp, -side * phi * phi])
        y = np.concatenate([np.ones(n, complex), np.zeros(n, complex), np.zeros(n, complex)])
    else:
        def rhs(x, y):
            h, hp = y[:n], y[n:]
            q = potential(x) - c_side
            return np.concatenate([hp, q * h - two_ik * hp])
        y = np.concatenate([np.ones(n, complex), np.zeros(n, complex)])

    for a, b in zip(*(lambda s: (s[:-1], s[1:]))(_segments(x_start, x_end, potential.breakpoints))):
        if a == b:
            continue
        sol = solve_ivp(rhs, (a, b), y, method="RK45", rtol=rtol, atol=atol, dense_output=False)
        if not sol.success:
            raise IntegrationError(f"integration overflow: solver failed on [{a}, {b}]: {sol.message}")
        y = sol.y[:, -1]
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > _BLOWUP:
            raise IntegrationError(
                "integration overflow: reduced Jost solution blew up; check the truncation window"
            )
    if quadrature:
        return y[:n], y[n : 2 * n], y[2 * n :]
    return y[:n], y[n:], None


def reduced_at(potential, side, k_values, x_end, *, x_inf=30.0, rtol=1e-10, atol=1e-12,
               quadrature=False):
    """Reduced Jost h and h' (and optionally int phi^2 over [x_end, s*x_inf])
    at a single position, vectorized over the momentum array."""
    k = np.atleast_1d(np.asarray(k_values, dtype=complex))
    scalar = np.ndim(k_values) == 0
    x_start = side * float(x_inf)
    h = np.empty_like(k)
    hp = np.empty_like(k)
    z = np.empty_like(k) if quadrature else None

    freq = np.abs(k.real)
    for lo, hi in zip(_CHUNK_EDGES[:-1], _CHUNK_EDGES[1:]):
        sel = np.flatnonzero((freq >= lo) & (freq < hi))
        for start in range(0, len(sel), _MAX_CHUNK):
            idx = sel[start : start + _MAX_CHUNK]
            if len(idx) == 0:
                continue
            hc, hpc, zc = _integrate_chunk(
                potential, side, k[idx], x_start, float(x_end), rtol, atol, quadrature
            )
            h[idx], hp[idx] = hc, hpc
            if quadrature:
                z[idx] = zc

    if scalar:
        out = (complex(h[0]), complex(hp[0]))
        return out + ((complex(z[0]),) if quadrature else ())
    return (h, hp) + ((z,) if quadrature else ())


def reduced_dense(potential, side, k, x_targets, *, x_inf=30.0, rtol=1e-10, atol=1e-12):
    """Reduced Jost h, h' for one momentum on an array of positions (one
    sweep from the far end, solutions read off at the targets)."""
    k = complex(k)
    c_side = potential.background(side)
    two_ik = side * 2j * k

    def rhs(x, y):
        q = potential(x) - c_side
        return [y[1], q * y[0] - two_ik * y[1]]

    x_targets = np.asarray(x_targets, dtype=float)
    order = np.argsort(x_targets)
    if side > 0:
        order = order[::-1]
    xs = x_targets[order]
    x_start = side * float(x_inf)
    x_end = float(xs[-1])

    h = np.empty(len(xs), complex)
    hp = np.empty(len(xs), complex)
    y = np.array([1.0 + 0j, 0.0 + 0j])
    pos = 0
    for a, b in zip(*(lambda s: (s[:-1], s[1:]))(_segments(x_start, x_end, potential.breakpoints))):
        if a == b:
            continue
        t_eval = [x for x in xs[pos:] if min(a, b) <= x <= max(a, b)]
        appended_end = bool(t_eval) and t_eval[-1] != b
        if appended_end:
            t_eval.append(b)  # always land on the segment end to chain state
        sol = solve_ivp(
            rhs, (a, b), y, method="RK45", rtol=rtol, atol=atol,
            t_eval=t_eval if t_eval else None,
        )
        if not sol.success:
            raise IntegrationError(f"integration overflow: solver failed on [{a}, {b}]")
        if t_eval:
            n_hit = len(t_eval) - (1 if appended_end else 0)
            h[pos : pos + n_hit] = sol.y[0, :n_hit]
            hp[pos : pos + n_hit] = sol.y[1, :n_hit]
            pos += n_hit
        y = sol.y[:, -1]
    out_h = np.empty_like(h)
    out_hp = np.empty_like(hp)
    out_h[order] = h
    out_hp[order] = hp
    return out_h, out_hp


def count_nodes(potential, trial_lambda, *, x_inf=30.0, rtol=1e-8, atol=1e-10, npts=3001):
    """Oscillation count of the left Jost solution at a real energy below the
    spectrum; equals the number of eigenvalues below that energy."""
    gap = potential.c_minus - trial_lambda
    if gap <= 0:
        raise ValueError("trial energy must lie strictly below the left background")
    k = 1j * np.sqrt(gap)
    xs = np.linspace(-x_inf, x_inf, npts)
    h, _ = reduced_dense(potential, -1, k, xs, x_inf=x_inf, rtol=rtol, atol=atol)
    vals = h.real
    sign = np.sign(vals)
    sign = sign[sign != 0]
    return int(np.sum(sign[1:] * sign[:-1] < 0))
