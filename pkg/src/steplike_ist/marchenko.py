"""Nystrom solver for the Marchenko equations and potential recovery.

For each reconstruction point x the integral equation

    K(x, y) + F(x + y) + side * int_x^{side inf} K(x, s) F(s + y) ds = 0

is discretized with composite Gauss-Legendre panels on the decaying side and
solved as a dense symmetric system (similarity-weighted by sqrt of the
quadrature weights, so singular values witness the operator spectrum).  The
minus-side problem is mapped onto the plus orientation by reflecting the
kernel.

The recovered potential trace is q_side(x) = -side * 2 d/dx K(x, x), which
reproduces q(x) - c_side.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, thread_count
from .errors import NearSingularError
from .glm import derivative_4th


class _ReflectedKernel:
    """View of a minus-side kernel as a plus-orientation one."""

    def __init__(self, kernel):
        self._kernel = kernel

    def evaluate(self, u):
        return self._kernel.evaluate(-np.asarray(u, dtype=float))

    def decay_cutoff(self, rel=1e-12):
        return -self._kernel.decay_cutoff(rel)


def _panel_nodes(a, b, n_quad, nodes_per_panel):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    n_panels = max(1, int(round(n_quad / nodes_per_panel)))
    edges = np.linspace(a, b, n_panels + 1)
    base_x, base_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


@dataclass
class MarchenkoSolution:
    """Solved kernel row at one reconstruction point (plus orientation)."""

    x: float
    nodes: np.ndarray
    weights: np.ndarray
    K_nodes: np.ndarray
    condition: float
    sigma_min: float
    _eval_f: callable = field(repr=False, default=None)

    def kernel_at(self, y):
        """Nystrom interpolation of K(x, y)."""
        scalar = np.ndim(y) == 0
        y = np.atleast_1d(np.asarray(y, dtype=float))
        F = self._eval_f(self.nodes[:, None] + y[None, :])
        correction = (self.weights * self.K_nodes) @ F
        out = -self._eval_f(self.x + y) - correction
        return float(out[0]) if scalar else out

    @property
    def diagonal(self):
        return self.kernel_at(self.x)


def _orient(kernel, side=None):
    side = kernel.side if side is None else side
    return kernel if side > 0 else _ReflectedKernel(kernel)


def _build_system(kernel_eval, x, y_max, n_quad, nodes_per_panel):
    nodes, weights = _panel_nodes(x, y_max, n_quad, nodes_per_panel)
    F = kernel_eval(np.add.outer(nodes, nodes))
    s = np.sqrt(weights)
    A = np.eye(len(nodes)) + (s[:, None] * F) * s[None, :]
    rhs = -s * kernel_eval(x + nodes)
    return nodes, weights, s, A, rhs


def solve_marchenko_at(kernel, x, cfg=DEFAULTS, n_quad=None, raise_near_singular=True):
    """Solve for K(x, .) at one point; returns a MarchenkoSolution.

    The solution is computed in the plus orientation; for a minus-side
    kernel pass x in the reflected coordinate (callers normally go through
    recover_potential, which handles the bookkeeping).
    """
    n_quad = cfg.n_quad if n_quad is None else n_quad
    oriented = _orient(kernel)
    x_ref = x if kernel.side > 0 else -x
    y_max = min(max(oriented.decay_cutoff(cfg.f_cut_rel), x_ref + 2.0), cfg.x_inf)
    nodes, weights, s, A, rhs = _build_system(
        oriented.evaluate, x_ref, y_max, n_quad, cfg.nodes_per_panel
    )
    eig = np.linalg.eigvalsh(A)
    sigma_min = float(np.min(np.abs(eig)))
    condition = float(np.max(np.abs(eig)) / max(sigma_min, 1e-300))
    if raise_near_singular and condition > cfg.cond_limit:
        raise NearSingularError(
            f"GLM operator near-singular at x = {x:.6g}: condition {condition:.3e}"
        )
    z = np.linalg.solve(A, rhs)
    return MarchenkoSolution(
        x=x_ref,
        nodes=nodes,
        weights=weights,
        K_nodes=z / s,
        condition=condition,
        sigma_min=sigma_min,
        _eval_f=oriented.evaluate,
    )


def check_homogeneous_uniqueness(kernel, x, cfg=DEFAULTS, n_quad=None):
    """Smallest singular value of the discretized I + F operator at x:
    a numerical witness of unique solvability."""
    sol = solve_marchenko_at(kernel, x, cfg=cfg, n_quad=n_quad, raise_near_singular=False)
    return sol.sigma_min


@dataclass
class TransformKernel:
    """Solved transformation kernel on one side with the recovered trace."""

    side: int
    x_grid: np.ndarray
    K_diag: np.ndarray
    q_recovered: np.ndarray
    condition_numbers: np.ndarray
    failed: np.ndarray  # boolean mask of near-singular points

    def b_kernel(self, solution, y):
        """Kernel of the momentum-shift representation: 2 K(x, x + 2y).

        ``solution`` lives in the plus orientation; for the minus side the
        offset flips with the reflection.
        """
        y_eff = np.asarray(y, dtype=float) * (1.0 if self.side > 0 else -1.0)
        return 2.0 * solution.kernel_at(solution.x + 2.0 * y_eff)


def recover_potential(kernel, x_grid=None, cfg=DEFAULTS, n_quad=None):
    """Solve the Marchenko equation on a grid and differentiate the diagonal.

    Near-singular points (conditioning beyond the configured limit) are
    masked out instead of aborting the sweep; they are reported in the
    ``failed`` mask and excluded from the derivative stencil window.
    """
    if x_grid is None:
        x_grid = np.linspace(cfg.recon_lo, cfg.recon_hi, cfg.recon_n)
    x_grid = np.asarray(x_grid, dtype=float)
    h = x_grid[1] - x_grid[0]
    if not np.allclose(np.diff(x_grid), h, rtol=1e-9, atol=1e-12):
        raise ValueError("reconstruction grid must be uniform")

    diag = np.full(len(x_grid), np.nan)
    cond = np.full(len(x_grid), np.nan)

    def work(i):
        try:
            sol = solve_marchenko_at(kernel, x_grid[i], cfg=cfg, n_quad=n_quad)
        except NearSingularError:
            return i, np.nan, np.nan
        return i, sol.diagonal, sol.condition

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, d, c in pool.map(work, range(len(x_grid))):
                diag[i], cond[i] = d, c
    else:
        for i in range(len(x_grid)):
            _, diag[i], cond[i] = work(i)

    ok = np.isfinite(diag)
    q = np.full(len(x_grid), np.nan)
    if ok.sum() >= 5:
        # differentiate on the largest contiguous healthy block
        blocks = _contiguous_blocks(ok)
        for lo, hi in blocks:
            if hi - lo >= 5:
                q[lo:hi] = -kernel.side * 2.0 * derivative_4th(diag[lo:hi], h)
    return TransformKernel(
        side=kernel.side,
        x_grid=x_grid,
        K_diag=diag,
        q_recovered=q,
        condition_numbers=cond,
        failed=~ok,
    )


def _contiguous_blocks(mask):
    blocks = []
    i = 0
    n = len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j < n and mask[j]:
                j += 1
            blocks.append((i, j))
            i = j
        else:
            i += 1
    return blocks


def verify_two_sided_consistency(plus, minus, c_plus, c_minus, window=None, tol=1e-3):
    """Compare the two one-sided recoveries of the full potential.

    Both sides must reproduce the same q(x): the report carries the sup and
    L1 norms of (q_minus + c_minus) - (q_plus + c_plus) over the common
    healthy window.
    """
    if window is None:
        window = (
            max(plus.x_grid[0], minus.x_grid[0]),
            min(plus.x_grid[-1], minus.x_grid[-1]),
        )
    lo, hi = window
    grid = plus.x_grid
    qm = np.interp(grid, minus.x_grid, minus.q_recovered)
    sel = (grid >= lo) & (grid <= hi)
    diff = (qm[sel] + c_minus) - (plus.q_recovered[sel] + c_plus)
    good = np.isfinite(diff)
    if not np.any(good):
        return {"sup": np.inf, "l1": np.inf, "window": [lo, hi], "passed": False, "tolerance": tol}
    sup = float(np.max(np.abs(diff[good])))
    h = grid[1] - grid[0]
    l1 = float(np.sum(np.abs(diff[good])) * h)
    return {
        "sup": sup,
        "l1": l1,
        "window": [float(lo), float(hi)],
        "n_points": int(good.sum()),
        "tolerance": tol,
        "passed": bool(sup < tol),
    }


def diagonal_identity_residual(kernel, potential, solution):
    """|K(x,x) - side/2 * tail integral of (q - c_side)| at one solved point.

    The solved diagonal must match half the remaining potential mass beyond
    x; a direct quadrature of the potential provides the oracle.
    """
    side = kernel.side
    x = solution.x if side > 0 else -solution.x
    c_side = potential.background(side)
    xs = np.linspace(x, side * 40.0, 4001) if side > 0 else np.linspace(side * 40.0, x, 4001)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    mass = trapezoid(potential(xs) - c_side, xs)
    want = side * 0.5 * mass
    got = solution.diagonal
    return abs(got - want)
