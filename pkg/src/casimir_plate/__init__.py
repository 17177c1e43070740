"""Casimir-Polder potentials for two atoms above a perfectly conducting plate."""
from .atoms import AtomSpec, StaticAtom, Transition, alpha_dynamic, alpha_imag, alpha_static, far_zone, load_atom
from .correlations import CorrelationDensity, CorrelationGrid, correlation_density, correlation_scan, polarization_sum
from .errors import CasimirPlateError, NumericalError, ValidationError
from .geometry import SIGMA, PlateGeometry, build_geometry, from_axes, reflect
from .potential import (
    FREE_SPACE_COEFFICIENT,
    PotentialResult,
    compare_methods,
    cp_far_zone_plate,
    cp_free_space,
    cp_plate_correlation,
    cp_plate_double_integral_far,
    evaluate,
    far_zone_terms,
)
from .quadrature import QuadratureConfig
from .tensors import angular_oracle_tau, dipole_kernel, dipole_kernel_plate, fd_oracle_dipole, tau, tau_plate

__version__ = "0.1.0"

__all__ = [
    "AtomSpec", "StaticAtom", "Transition", "alpha_dynamic", "alpha_imag", "alpha_static", "far_zone",
    "load_atom", "CorrelationDensity", "CorrelationGrid", "correlation_density", "correlation_scan",
    "polarization_sum", "CasimirPlateError", "NumericalError", "ValidationError", "SIGMA", "PlateGeometry",
    "build_geometry", "from_axes", "reflect", "FREE_SPACE_COEFFICIENT", "PotentialResult", "compare_methods",
    "cp_far_zone_plate", "cp_free_space", "cp_plate_correlation", "cp_plate_double_integral_far", "evaluate",
    "far_zone_terms", "QuadratureConfig", "angular_oracle_tau", "dipole_kernel", "dipole_kernel_plate",
    "fd_oracle_dipole", "tau", "tau_plate", "__version__",
]
