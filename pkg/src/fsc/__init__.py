"""Flow-driven spectral chaos for second-order stochastic dynamical systems."""

__version__ = "0.1.0"

from .integrate import DivergenceError, TimeGrid, rk4_step
from .models import (Axis, CapabilityError, ForcedSDOF, ForcingRangeError, FreeSDOF, GroundMotion,
                     NonlinearSDOF, ShearBuilding)
from .probability import Distribution, RandomDomain, density, moments, sample
from .quadrature import QuadratureGrid, gauss_rule, inner, tensor_grid
from .rfs import Basis, DegenerateBasisError, GridFunction, gpc_basis, gram_schmidt, mean_var, project
from .galerkin import ProjectedSystem, project_system
from .scheme import FscConfig, FscResult, ModalState, run_fsc, transfer_modes
from .series import MomentSeries
from .validate import ExactSDOFReference, errors, exact_moments, forced_sdof_reference, monte_carlo

__all__ = [
    "Axis", "Basis", "CapabilityError", "DegenerateBasisError", "Distribution", "DivergenceError",
    "ExactSDOFReference", "ForcedSDOF", "ForcingRangeError", "FreeSDOF", "FscConfig", "FscResult",
    "GridFunction", "GroundMotion", "ModalState", "MomentSeries", "NonlinearSDOF", "ProjectedSystem",
    "QuadratureGrid", "RandomDomain", "ShearBuilding", "TimeGrid", "density", "errors",
    "exact_moments", "forced_sdof_reference", "gauss_rule", "gpc_basis", "gram_schmidt", "inner",
    "mean_var", "moments", "monte_carlo", "project", "project_system", "rk4_step", "run_fsc",
    "sample", "tensor_grid", "transfer_modes",
]
