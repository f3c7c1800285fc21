"""Subspace-protected matrix editing toolkit.

Filters matrix updates so they cannot disturb the dominant singular subspace
of the matrix being edited, measures spectral drift across editing
trajectories, and simulates long sequential-editing runs on synthetic
matrices.
"""

from .basis import SpectralCoefficients, decompose, recompose, verify_basis_orthonormality
from .exceptions import (
    DegenerateMatrixError,
    MatrixFileError,
    NotFittedError,
    NumericalError,
    UndefinedMetricError,
)
from .filtering import DominantSubspaceFilter, FilterOutcome, apply_edit, filter_update, filter_with_basis
from .linalg import SvdFactorization, frobenius_inner, reconstruct, svd
from .metrics import (
    SpectralReport,
    SsRow,
    analyze_trajectory,
    low_rank_similarity,
    singular_vector_similarity,
)
from .perturb import PerturbationSpec, SweepEntry, generate, sweep
from .simulate import (
    EditSample,
    SimulationConfig,
    SimulationResult,
    generate_edit,
    power_law_spectrum,
    run,
    run_many,
    synthesize_base,
)
from .subspace import DEFAULT_TAU, DominantSubspace, EnergyShare, energy_groups, energy_of, select_k

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TAU",
    "DegenerateMatrixError",
    "DominantSubspace",
    "DominantSubspaceFilter",
    "EditSample",
    "EnergyShare",
    "FilterOutcome",
    "MatrixFileError",
    "NotFittedError",
    "NumericalError",
    "PerturbationSpec",
    "SimulationConfig",
    "SimulationResult",
    "SpectralCoefficients",
    "SpectralReport",
    "SsRow",
    "SvdFactorization",
    "SweepEntry",
    "UndefinedMetricError",
    "analyze_trajectory",
    "apply_edit",
    "decompose",
    "energy_groups",
    "energy_of",
    "filter_update",
    "filter_with_basis",
    "frobenius_inner",
    "generate",
    "generate_edit",
    "low_rank_similarity",
    "power_law_spectrum",
    "recompose",
    "reconstruct",
    "run",
    "run_many",
    "select_k",
    "singular_vector_similarity",
    "svd",
    "sweep",
    "synthesize_base",
    "verify_basis_orthonormality",
    "__version__",
]
