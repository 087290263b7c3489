"""Steplike potential models.

A potential here is a function q(x) tending to constants c- and c+ on the two
half-axes, evaluable pointwise together with a declared number of derivatives.
Closed forms evaluate exactly; sampled grids go through a cubic spline.

The decay diagnostics (iterated absolute-tail integrals and weighted moment
norms) quantify how fast q approaches its backgrounds and power the class
membership checks used elsewhere in the pipeline.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .errors import DataError, MomentError, SmoothnessError

_KINDS = {}


def _register(kind):
    def deco(cls):
        _KINDS[kind] = cls
        cls.kind = kind
        return cls

    return deco


class Potential:
    """Base class: steplike profile with backgrounds c_minus, c_plus.

    Subclasses implement ``_eval(x, order)`` for vectorized evaluation of
    q^(order)(x).  ``m`` and ``n`` declare the moment/smoothness class the
    profile is asserted to belong to; derivative requests above ``n`` raise.
    """

    kind = "abstract"

    def __init__(self, c_minus, c_plus, m=1, n=0, breakpoints=()):
        if m < 1:
            raise DataError("at least one finite moment (m >= 1) is required")
        self.c_minus = float(c_minus)
        self.c_plus = float(c_plus)
        self.m = int(m)
        self.n = int(n)
        self.breakpoints = tuple(float(b) for b in breakpoints)

    # -- evaluation ------------------------------------------------------

    def __call__(self, x, order=0):
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order > self.max_derivative_order():
            raise SmoothnessError(
                f"insufficient smoothness: order {order} requested, "
                f"{self.kind} potential supports {self.max_derivative_order()}"
            )
        x = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(x), order)
        return out[0] if x.ndim == 0 else out

    def max_derivative_order(self):
        return self.n

    def _eval(self, x, order):  # pragma: no cover - abstract
        raise NotImplementedError

    def background(self, side):
        return self.c_plus if side > 0 else self.c_minus

    def offset(self, x, side, order=0):
        """q^(order)(x) minus the side background (for order 0)."""
        val = self(x, order)
        if order == 0:
            return val - self.background(side)
        return val

    @property
    def c_low(self):
        return min(self.c_minus, self.c_plus)

    @property
    def c_high(self):
        return max(self.c_minus, self.c_plus)

    # -- validation ------------------------------------------------------

    def check_tail(self, x_inf, eps_tail):
        for side in (-1, 1):
            gap = abs(self(side * x_inf) - self.background(side))
            if gap >= eps_tail:
                raise DataError(
                    f"potential does not settle onto its background: "
                    f"|q({side * x_inf:+g}) - c| = {gap:.3e} >= {eps_tail:g}"
                )

    def min_value(self, x_inf, npts=4001):
        xs = np.linspace(-x_inf, x_inf, npts)
        return float(np.min(self(xs)))

    # -- serialization ---------------------------------------------------

    def to_dict(self):
        d = {
            "kind": self.kind,
            "c_minus": self.c_minus,
            "c_plus": self.c_plus,
            "m": self.m,
            "n": self.n,
        }
        d.update(self._params())
        return d

    def _params(self):
        return {}


def _common_background(background, c_minus, c_plus, default=0.0):
    """Merge the schema's c_minus/c_plus keys with a single-background kind."""
    candidates = {float(v) for v in (background, c_minus, c_plus) if v is not None}
    if len(candidates) > 1:
        raise DataError("this potential kind requires equal backgrounds on both sides")
    return candidates.pop() if candidates else default


@_register("free")
class FreePotential(Potential):
    """Constant potential q(x) = c (both backgrounds equal)."""

    def __init__(self, c=None, c_minus=None, c_plus=None, m=10, n=10):
        c = _common_background(c, c_minus, c_plus)
        super().__init__(c, c, m=m, n=n)
        self.c = float(c)

    def max_derivative_order(self):
        return 1000

    def _eval(self, x, order):
        if order == 0:
            return np.full_like(x, self.c)
        return np.zeros_like(x)

    def _params(self):
        return {"c": self.c}


@_register("step")
class StepPotential(Potential):
    """Pure step: q = c_minus for x < x_jump, c_plus for x >= x_jump."""

    def __init__(self, c_minus=0.0, c_plus=1.0, x_jump=0.0, m=10, n=0):
        if n != 0:
            raise DataError("the step potential is admitted with n = 0 only")
        super().__init__(c_minus, c_plus, m=m, n=0, breakpoints=(x_jump,))
        self.x_jump = float(x_jump)

    def _eval(self, x, order):
        if order == 0:
            return np.where(x < self.x_jump, self.c_minus, self.c_plus)
        return np.zeros_like(x)

    def _params(self):
        return {"x_jump": self.x_jump}


@_register("sech2-soliton")
class Sech2Potential(Potential):
    """Reflectionless well q(x) = c - 2 kappa^2 sech^2(kappa (x - center)).

    Derivatives of any order are exact: q is a polynomial in
    t = tanh(kappa(x - center)) and d/dx maps polynomials in t to
    polynomials in t via t' = kappa (1 - t^2).
    """

    def __init__(self, kappa=1.0, center=0.0, background=None, c_minus=None, c_plus=None, m=10, n=10):
        background = _common_background(background, c_minus, c_plus)
        super().__init__(background, background, m=m, n=n)
        if kappa <= 0:
            raise DataError("soliton width parameter kappa must be positive")
        self.kappa = float(kappa)
        self.center = float(center)
        # q = c - 2k^2 + 2k^2 t^2 as coefficients in t
        self._polys = [np.array([self.background(1) - 2 * self.kappa**2, 0.0, 2 * self.kappa**2])]

    def max_derivative_order(self):
        return 1000

    def _poly(self, order):
        while len(self._polys) <= order:
            p = self._polys[-1]
            dp = npoly.polyder(p)
            # chain rule: d/dx P(t) = P'(t) * kappa * (1 - t^2)
            nxt = self.kappa * npoly.polymul(dp, np.array([1.0, 0.0, -1.0]))
            self._polys.append(np.atleast_1d(nxt))
        return self._polys[order]

    def _eval(self, x, order):
        t = np.tanh(self.kappa * (x - self.center))
        return npoly.polyval(t, self._poly(order))

    def _params(self):
        return {"kappa": self.kappa, "center": self.center, "background": self.c_plus}

    @property
    def eigenvalue(self):
        return self.c_plus - self.kappa**2


@_register("bargmann-N-soliton")
class BargmannPotential(Potential):
    """Reflectionless N-soliton profile from its bound-state data.

    Built from decay rates kappa_j and right norming constants gamma_j via
    q(x) = c - 2 (log det A(x))'' with
    A_ij = delta_ij + b_i b_j exp(-(kappa_i+kappa_j) x) / (kappa_i+kappa_j),
    b_j = sqrt(gamma_j).  Derivatives up to order 2 use the exact trace
    formulas for log-determinant derivatives.
    """

    def __init__(self, kappas, gammas, background=None, c_minus=None, c_plus=None, m=10, n=2):
        background = _common_background(background, c_minus, c_plus)
        super().__init__(background, background, m=m, n=min(n, 2))
        kappas = np.asarray(kappas, dtype=float)
        gammas = np.asarray(gammas, dtype=float)
        if kappas.ndim != 1 or kappas.shape != gammas.shape:
            raise DataError("kappas and gammas must be 1-D arrays of equal length")
        if np.any(kappas <= 0) or np.any(gammas <= 0):
            raise DataError("decay rates and norming constants must be positive")
        if len(np.unique(kappas)) != len(kappas):
            raise DataError("decay rates must be distinct")
        order = np.argsort(kappas)
        self.kappas = kappas[order]
        self.gammas = gammas[order]
        b = np.sqrt(self.gammas)
        self._coef = np.outer(b, b) / np.add.outer(self.kappas, self.kappas)
        self._rate = np.add.outer(self.kappas, self.kappas)

    def _logdet_derivs(self, x, upto):
        """Derivatives of f(x) = log det A(x) up to order `upto` (<= 4)."""
        E = self._coef * np.exp(-self._rate * x)
        A = np.eye(len(self.kappas)) + E
        Ainv = np.linalg.inv(A)
        T = [None] + [Ainv @ (E * (-self._rate) ** j) for j in range(1, upto + 1)]
        out = []
        if upto >= 1:
            out.append(np.trace(T[1]))
        if upto >= 2:
            out.append(np.trace(T[2]) - np.trace(T[1] @ T[1]))
        if upto >= 3:
            out.append(
                np.trace(T[3]) - 3 * np.trace(T[1] @ T[2]) + 2 * np.trace(T[1] @ T[1] @ T[1])
            )
        if upto >= 4:
            T11 = T[1] @ T[1]
            out.append(
                np.trace(T[4])
                - 4 * np.trace(T[1] @ T[3])
                - 3 * np.trace(T[2] @ T[2])
                + 12 * np.trace(T11 @ T[2])
                - 6 * np.trace(T11 @ T11)
            )
        return out

    def _eval(self, x, order):
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            d = self._logdet_derivs(float(xi), order + 2)
            out[i] = -2.0 * d[order + 1]
        if order == 0:
            out += self.c_plus
        return out

    def _params(self):
        return {
            "kappas": list(self.kappas),
            "gammas": list(self.gammas),
            "background": self.c_plus,
        }

    @property
    def eigenvalues(self):
        return self.c_plus - self.kappas[::-1] ** 2


@_register("user-expression")
class ExpressionPotential(Potential):
    """Potential given as a symbolic expression in x.

    Derivatives come from symbolic differentiation, so any order the
    expression supports is exact.  Expressions containing Heaviside steps
    must declare n = 0 and list their jump points in ``breakpoints``.
    """

    def __init__(self, expression, c_minus, c_plus, m=1, n=0, breakpoints=()):
        super().__init__(c_minus, c_plus, m=m, n=n, breakpoints=breakpoints)
        import sympy as sp

        self._sp = sp
        self.expression = str(expression)
        x = sp.Symbol("x", real=True)
        try:
            expr = sp.sympify(self.expression, locals={"x": x})
        except (sp.SympifyError, SyntaxError) as exc:
            raise DataError(f"cannot parse potential expression: {exc}") from None
        self._x = x
        self._exprs = [expr]
        self._funcs = [sp.lambdify(x, expr, modules="numpy")]
        if expr.has(sp.Heaviside) and self.n > 0:
            raise DataError("expressions with Heaviside jumps must declare n = 0")

    def _func(self, order):
        sp = self._sp
        while len(self._funcs) <= order:
            nxt = sp.diff(self._exprs[-1], self._x)
            if nxt.has(sp.DiracDelta):
                raise SmoothnessError(
                    "insufficient smoothness: expression derivative is distributional"
                )
            self._exprs.append(nxt)
            self._funcs.append(sp.lambdify(self._x, nxt, modules="numpy"))
        return self._funcs[order]

    def _eval(self, x, order):
        val = self._func(order)(x)
        return np.broadcast_to(np.asarray(val, dtype=float), x.shape).copy()

    def _params(self):
        return {"expression": self.expression, "breakpoints": list(self.breakpoints)}


@_register("sampled-grid")
class GridPotential(Potential):
    """Sampled potential: cubic interpolation inside the grid, clamped to the
    backgrounds outside it.  Derivatives up to 3 via the spline."""

    def __init__(self, grid_x, grid_q, c_minus, c_plus, m=1, n=0):
        grid_x = np.asarray(grid_x, dtype=float)
        grid_q = np.asarray(grid_q, dtype=float)
        if grid_x.ndim != 1 or grid_x.shape != grid_q.shape or len(grid_x) < 4:
            raise DataError("grid needs matching 1-D abscissae/values, length >= 4")
        if not np.all(np.diff(grid_x) > 0):
            raise DataError("grid abscissae must be strictly increasing")
        if not np.all(np.isfinite(grid_q)):
            raise DataError("grid values must be finite")
        super().__init__(c_minus, c_plus, m=m, n=min(n, 3), breakpoints=(grid_x[0], grid_x[-1]))
        self.grid_x = grid_x
        self.grid_q = grid_q
        self._spline = CubicSpline(grid_x, grid_q, bc_type="natural")

    def max_derivative_order(self):
        return min(self.n, 3)

    def _eval(self, x, order):
        inside = (x >= self.grid_x[0]) & (x <= self.grid_x[-1])
        out = np.zeros_like(x)
        out[inside] = self._spline(x[inside], nu=order)
        if order == 0:
            out[x < self.grid_x[0]] = self.c_minus
            out[x > self.grid_x[-1]] = self.c_plus
        return out

    def _params(self):
        return {"grid_x": list(self.grid_x), "grid_q": list(self.grid_q)}


class CompositePotential(Potential):
    """Sum of a base steplike profile and smooth localized bumps.

    Only the base contributes backgrounds; the bumps must decay.  Used for
    test families like a soliton sitting next to a step.  Not a JSON kind of
    its own: serialize via an equivalent user expression when needed.
    """

    kind = "composite"

    def __init__(self, base, bumps, m=None, n=None):
        bps = tuple(base.breakpoints) + tuple(b for p in bumps for b in p.breakpoints)
        super().__init__(
            base.c_minus,
            base.c_plus,
            m=base.m if m is None else m,
            n=(min([base.n] + [p.n for p in bumps]) if n is None else n),
            breakpoints=bps,
        )
        for p in bumps:
            if p.c_minus != 0.0 or p.c_plus != 0.0:
                raise DataError("composite bumps must have zero background")
        self.base = base
        self.bumps = tuple(bumps)

    def max_derivative_order(self):
        return min([self.base.max_derivative_order()] + [p.max_derivative_order() for p in self.bumps])

    def _eval(self, x, order):
        out = self.base._eval(x, order)
        for p in self.bumps:
            out = out + p._eval(x, order)
        return out

    def to_dict(self):
        raise DataError("composite potentials have no JSON form; use user-expression")


def potential_from_dict(d):
    kind = d.get("kind")
    if kind not in _KINDS:
        raise DataError(f"unknown potential kind {kind!r}; known: {sorted(_KINDS)}")
    d = dict(d)
    d.pop("kind")
    cls = _KINDS[kind]
    try:
        return cls(**d)
    except TypeError as exc:
        raise DataError(f"bad parameters for potential kind {kind!r}: {exc}") from None


def load_potential(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return potential_from_dict(d)


def save_potential(potential, path):
    with open(path, "w") as fh:
        json.dump(potential.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# decay diagnostics


@dataclass
class MomentDiagnostics:
    """Tail integrals sigma_i, their iterates, and weighted moment norms.

    ``sigma[side][i]`` samples the absolute-tail integral of the i-th
    derivative of q minus its side background; ``sigma_hat`` its iterate.
    ``moment_norm[side][j]`` holds the (1+|x|^j)-weighted L1 norm over the
    half-line, for j = 0..m.
    """

    x: np.ndarray
    sigma: dict = field(default_factory=dict)
    sigma_hat: dict = field(default_factory=dict)
    moment_norm: dict = field(default_factory=dict)

    def sigma_fn(self, side, i):
        xs = self.x
        vals = self.sigma[side][i]
        return lambda x: np.interp(x, xs, vals)


def _half_line_samples(potential, side, x_inf, npts):
    if side > 0:
        xs = np.linspace(0.0, x_inf, npts)
    else:
        xs = np.linspace(-x_inf, 0.0, npts)
    return xs


def _midpoints(xs):
    return (xs[:-1] + xs[1:]) / 2.0, float(xs[1] - xs[0])


def _tail_cumulative(xs, vals, side):
    """F(x) = integral from x to the side infinity of vals (nonnegative)."""
    total = cumulative_trapezoid(vals, xs, initial=0.0)
    if side > 0:
        return total[-1] - total
    return total


def compute_moments(potential, m=None, n=None, x_inf=30.0, npts=6001, growth_limit=1.5):
    """Tabulate decay diagnostics on both half-lines.

    Moment norms are computed on the window and re-computed on a doubled
    window; growth beyond ``growth_limit`` flags a violated moment
    condition (the integrand is not settling).
    """
    m = potential.m if m is None else m
    n = potential.n if n is None else n
    n = min(n, potential.max_derivative_order())
    diag = MomentDiagnostics(x=np.linspace(-x_inf, x_inf, 2 * npts - 1))

    for side in (-1, 1):
        xs = _half_line_samples(potential, side, x_inf, npts)
        sigmas, hats = [], []
        for i in range(n + 1):
            vals = np.abs(potential.offset(xs, side, order=i))
            sig = _tail_cumulative(xs, vals, side)
            hat = _tail_cumulative(xs, sig, side)
            sigmas.append(np.interp(diag.x, xs, sig, left=sig[0], right=sig[-1]))
            hats.append(np.interp(diag.x, xs, hat, left=hat[0], right=hat[-1]))
        diag.sigma[side] = sigmas
        diag.sigma_hat[side] = hats

        norms = {}
        # midpoint rule keeps declared jump points (cell edges) out of the sums
        xm1, h1 = _midpoints(xs)
        base = np.abs(potential.offset(xm1, side))
        xs2 = _half_line_samples(potential, side, 2 * x_inf, npts)
        xm2, h2 = _midpoints(xs2)
        base2 = np.abs(potential.offset(xm2, side))
        for j in range(m + 1):
            w1 = float(np.sum((1 + np.abs(xm1) ** j) * base) * h1)
            w2 = float(np.sum((1 + np.abs(xm2) ** j) * base2) * h2)
            if not np.isfinite(w2) or w2 > 1e12:
                raise MomentError(
                    f"moment condition violated: weight-{j} integral overflows on side {side:+d}"
                )
            if w2 > growth_limit * max(w1, 1e-300) and w2 > 1e-8:
                raise MomentError(
                    f"moment condition violated: weight-{j} integral grows "
                    f"{w2 / max(w1, 1e-300):.2f}x under window doubling on side {side:+d}"
                )
            norms[j] = float(w1)
        diag.moment_norm[side] = norms
    return diag


def moment_norm_against(potential, side, background, j, x_inf=30.0, npts=6001):
    """Weighted tail integral of |q - background| against an arbitrary
    constant; lets callers probe what happens with a mismatched background."""
    xs = _half_line_samples(potential, side, x_inf, npts)
    xm, h = _midpoints(xs)
    vals = np.abs(potential(xm) - background)
    return float(np.sum((1 + np.abs(xm) ** j) * vals) * h)
