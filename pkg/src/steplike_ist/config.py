"""Numerical defaults and the run configuration shared by the pipeline."""

import math
import os
from dataclasses import dataclass, field, replace


@dataclass
class NumericsConfig:
    """All tunable knobs of the pipeline in one place.

    The defaults are sized for desk-scale potentials that settle onto their
    background constants well inside ``|x| <= x_inf``.
    """

    # truncation window for all half-line integrals
    x_inf: float = 30.0
    eps_tail: float = 1e-10

    # reduced-Jost ODE integration
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12

    # matching point for Wronskians and coefficients
    x_match: float = 0.0

    # uniform momentum grid feeding the reflection Fourier transform;
    # dk * x_inf <= pi/8 keeps a margin of >= 16 samples per oscillation
    # at the largest spatial argument in routine use
    k_max: float = 40.0

    # common energy grid on the multiplicity-two spectrum used for checks
    n_sigma2: int = 160
    k_sigma2_min: float = 0.1
    k_sigma2_max: float = 8.0

    # high-energy ladder (rate fits)
    lambda_ladder_lo: float = 1e2
    lambda_ladder_hi: float = 1e4
    n_ladder: int = 12

    # Gauss-Legendre nodes for the multiplicity-one integral after the
    # square-root substitution
    n_sigma1: int = 200

    # discrete-spectrum search
    n_scan: int = 400
    delta_edge: float = 1e-6
    eps_lambda: float = 1e-10

    # resonance classification at the lower spectral edge
    eps_resonance: float = 1e-4
    edge_ladder_start: float = 0.1
    edge_ladder_rungs: int = 8

    # derivative step for dW/dlambda
    dw_step: float = 1e-5

    # sampling grid for assembled Marchenko kernels
    f_grid_spacing: float = 0.02

    # Nystrom discretization of the Marchenko equation
    n_quad: int = 256
    nodes_per_panel: int = 8
    cond_limit: float = 1e8
    f_cut_rel: float = 1e-12

    # potential reconstruction grid
    recon_lo: float = -10.0
    recon_hi: float = 10.0
    recon_n: int = 801

    def __post_init__(self):
        if self.x_inf <= 0 or self.k_max <= 0 or self.n_quad <= 0:
            raise ValueError("numeric overrides must be positive")

    @property
    def dk(self):
        return math.pi / (8.0 * self.x_inf)

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


DEFAULTS = NumericsConfig()


def thread_count():
    """Parallelism cap, controlled by STEPLIKE_IST_THREADS (default 1)."""
    raw = os.environ.get("STEPLIKE_IST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class RunConfig:
    """Parsed CLI invocation: command, paths and numeric overrides."""

    command: str
    input_path: str
    out_dir: str = "out"
    force: bool = False
    order: int = 2
    verbosity: int = 1
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    tolerance_overrides: dict = field(default_factory=dict)
