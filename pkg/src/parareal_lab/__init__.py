"""Laboratory for IMEX Runge-Kutta Parareal on non-diffusive problems.

The package provides the additive Runge-Kutta tableaus, the block
matrix formulation of the Parareal iteration, stability/convergence/
accuracy maps on the (z1, z2) plane, a theoretical cost model and a
pseudospectral nonlinear Schroedinger driver, plus a command-line
surface binding them together.
"""

from .cost import CostModel, default_step_costs, efficiency, speedup, speedup_table
from .dahlquist import PropagatorFactors, propagator_factors, rk_amp
from .parareal_matrix import (
    build_matrices,
    e_norm_inf_closed,
    e_norm_two,
    parareal_amp,
    parareal_amp_recursive,
)
from .pde import (
    NLSProblem,
    PararealRunConfig,
    SpectralState,
    parareal_integrate,
    relative_error,
    serial_integrate,
)
from .regions import (
    MethodPairSpec,
    RegionGrid,
    accuracy_grid,
    classify,
    compute_grid,
    imexrk_amplitude_grid,
    scaled_parareal_amp,
)
from .tableaux import IMEXTableau, builtin_tableau, load_tableau, validate

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "IMEXTableau",
    "MethodPairSpec",
    "NLSProblem",
    "PararealRunConfig",
    "PropagatorFactors",
    "RegionGrid",
    "SpectralState",
    "accuracy_grid",
    "build_matrices",
    "builtin_tableau",
    "classify",
    "compute_grid",
    "default_step_costs",
    "e_norm_inf_closed",
    "e_norm_two",
    "efficiency",
    "imexrk_amplitude_grid",
    "load_tableau",
    "parareal_amp",
    "parareal_amp_recursive",
    "parareal_integrate",
    "propagator_factors",
    "relative_error",
    "rk_amp",
    "scaled_parareal_amp",
    "serial_integrate",
    "speedup",
    "speedup_table",
    "validate",
]
