"""Symmetric Arnold multi-well potentials and their quantum spectra."""
__all__ = [
    "ArnoldError", "BoundaryLeakError", "DivisibilityError", "NoCatastropheError",
    "NotMultiWellError", "NumericalError", "ValidationError", "PUBLISHED_WEIGHTS",
    "WeightCandidate", "check_divisibility", "coupling_formulas", "default_weights",
    "minimal_weights", "ArnoldPotential", "ShiftParameters", "build_potential",
    "couplings_to_shifts", "evaluate", "extrema", "taylor_at", "GridSpec", "SpectralResult",
    "auto_grid", "convergence_study", "solve", "FamilyPath", "critical_root", "gap",
    "locus_curve", "relocalization_scan", "parse_config",
]
from .errors import (ArnoldError, BoundaryLeakError, DivisibilityError, NoCatastropheError,
                     NotMultiWellError, NumericalError, ValidationError)
from .diophantine import (PUBLISHED_WEIGHTS, WeightCandidate, check_divisibility, coupling_formulas,
                          default_weights, minimal_weights)
from .potential import (ArnoldPotential, ShiftParameters, build_potential, couplings_to_shifts,
                        evaluate, extrema, taylor_at)
from .spectral import GridSpec, SpectralResult, auto_grid, convergence_study, solve
from .catastrophe import FamilyPath, critical_root, gap, locus_curve, relocalization_scan
from .config import parse_config

__version__ = "0.1.0"
