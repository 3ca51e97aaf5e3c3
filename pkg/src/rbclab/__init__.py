"""Three-model laboratory for 2-D Rayleigh-Benard convection.

Models: the classic Lorenz equations, the generalized spectral expansion at
arbitrary truncation (L, M), and a pseudospectral DNS of the underlying PDEs,
with shared projection operators, energy diagnostics, and an
attractor-classification harness.
"""

from .params import Params, make_params
from .state import (
    LorenzState,
    ModeIndex,
    PhysicalFields,
    SpectralState,
    zero_state,
)
from .stepping import BlowUpError, StepperConfig
from .trajectory import Trajectory

__all__ = [
    "Params",
    "make_params",
    "LorenzState",
    "ModeIndex",
    "PhysicalFields",
    "SpectralState",
    "zero_state",
    "BlowUpError",
    "StepperConfig",
    "Trajectory",
]

__version__ = "0.1.0"
