"""Direct and inverse scattering for 1-D Schrodinger operators with
steplike potentials: Jost solutions, scattering coefficients, bound states,
Marchenko kernels and potential reconstruction, plus consistency checks on
the scattering data."""

from .config import DEFAULTS, NumericsConfig, RunConfig
from .potentials import (
    BargmannPotential,
    CompositePotential,
    ExpressionPotential,
    FreePotential,
    GridPotential,
    Potential,
    Sech2Potential,
    StepPotential,
    compute_moments,
    load_potential,
    potential_from_dict,
    save_potential,
)
from .spectral import SpectralPoint, classify, lift

__version__ = "0.1.0"
