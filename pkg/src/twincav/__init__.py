"""Double-cavity optomechanics simulator: steady states, mean-field plus
covariance dynamics, and dynamic entanglement transfer diagnostics."""

from ._backend import BACKEND
from .model import (
    CavityParams,
    DerivedParams,
    MeanState,
    MechanicalParams,
    PhysicalParams,
    derive_params,
    diffusion_matrix,
    drift_matrix,
)
from .dynamics import (
    DivergenceError,
    TrajectoryConfig,
    TrajectorySample,
    integrate,
    mean_field_rhs,
)
from .entanglement import (
    NegativitySeries,
    Pair,
    TransferReport,
    log_negativity,
    negativity_series,
    submatrix,
    symplectic_eigenvalues_pt,
    transfer_report,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CavityParams",
    "DerivedParams",
    "DivergenceError",
    "MeanState",
    "MechanicalParams",
    "NegativitySeries",
    "Pair",
    "PhysicalParams",
    "TrajectoryConfig",
    "TrajectorySample",
    "TransferReport",
    "derive_params",
    "diffusion_matrix",
    "drift_matrix",
    "integrate",
    "log_negativity",
    "mean_field_rhs",
    "negativity_series",
    "submatrix",
    "symplectic_eigenvalues_pt",
    "transfer_report",
    "__version__",
]
