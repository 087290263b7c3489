"""Energy plane and side-dependent momenta.

The momenta k = sqrt(lambda - c) map the plane cut along [c, oo) onto the
closed upper half plane.  Boundary values on the cut are tagged explicitly:
the upper side carries k >= 0, the lower side k <= 0.  The side is never
inferred from the sign of a vanishing imaginary part.
"""

from dataclasses import dataclass

import numpy as np

UPPER = "upper"
LOWER = "lower"
OFF_AXIS = "off-axis"

SIGMA2 = "Sigma2"
SIGMA1 = "Sigma1"
BELOW = "below_spectrum"
COMPLEX = "complex"


def momentum(lam, c, side=UPPER):
    """Principal momentum sqrt(lam - c) mapped into the closed upper half
    plane, with explicit boundary-side handling on the cut [c, oo)."""
    lam = np.asarray(lam)
    if side == OFF_AXIS:
        w = np.sqrt(lam.astype(complex) - c)
        return np.where(w.imag < 0, -w, w)
    if np.any(np.abs(np.imag(lam)) != 0):
        raise ValueError("on-axis side requested for lambda with Im != 0")
    r = np.real(lam) - c
    above = r >= 0
    k_real = np.sqrt(np.where(above, r, 0.0))
    k_imag = np.sqrt(np.where(above, 0.0, -r))
    sign = 1.0 if side == UPPER else -1.0
    return np.where(above, sign * k_real + 0j, 1j * k_imag)


@dataclass(frozen=True)
class SpectralPoint:
    """One spectral parameter with both side momenta attached."""

    lam: complex
    side: str
    c_plus: float
    c_minus: float
    k_plus: complex
    k_minus: complex

    @property
    def c_low(self):
        return min(self.c_plus, self.c_minus)

    @property
    def c_high(self):
        return max(self.c_plus, self.c_minus)

    def momentum(self, sign):
        return self.k_plus if sign > 0 else self.k_minus

    @property
    def region(self):
        return classify(self)


def lift(lam, side, c_plus, c_minus):
    """Construct a SpectralPoint with branch-correct momenta."""
    if side not in (UPPER, LOWER, OFF_AXIS):
        raise ValueError(f"unknown side {side!r}")
    lam = complex(lam)
    if side != OFF_AXIS and lam.imag != 0:
        raise ValueError("on-axis side requested for lambda with Im != 0")
    k_plus = complex(momentum(lam, c_plus, side))
    k_minus = complex(momentum(lam, c_minus, side))
    return SpectralPoint(
        lam=lam, side=side, c_plus=c_plus, c_minus=c_minus, k_plus=k_plus, k_minus=k_minus
    )


def classify(point):
    if point.side == OFF_AXIS and point.lam.imag != 0:
        return COMPLEX
    x = point.lam.real
    if x >= point.c_high:
        return SIGMA2
    if x >= point.c_low:
        return SIGMA1
    return BELOW
