"""q-deformed boson calculus, q-coherent states and the diagonal representation
of density matrices, with numerical verification of the underlying identities."""

from .coherent import (
    CoherentState,
    MeasureCalibration,
    QuadratureGrid,
    calibrate_measure,
    coherent_state,
    eigen_residual,
    overlap,
    projector,
    resolution_of_unity,
)
from .errors import (
    CalibrationError,
    ConvergenceError,
    CutoffError,
    DensityMatrixError,
    DomainError,
    GridError,
    QBosonError,
)
from .fock import (
    DensityMatrix,
    FockOperator,
    FockTruncation,
    algebra_residuals,
    build_annihilator,
    build_creator,
    build_number,
    density_from_coeffs,
)
from .kernels import (
    KernelEvaluator,
    hermiticity_check,
    kernel_K,
    kernel_Ktilde,
    reproducing_check,
    rho_function,
    rho_tilde,
    semigroup_check,
)
from .qcalc import (
    DeformationParam,
    RadialSeries,
    jackson_integral,
    q_derivative_series,
    q_exp_first_zero,
    q_exponential,
    q_factorial,
    q_number,
    series_eval_at_zero,
)
from .representations import (
    DiagonalRepresentation,
    NormalOrderCoeffs,
    PFunction,
    diagonal_representation,
    fock_dyad,
    normal_order_coeffs,
    normal_order_oracle,
    q_poisson,
    rho_from_pfunction,
    theta_projected_series,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "CoherentState",
    "ConvergenceError",
    "CutoffError",
    "DeformationParam",
    "DensityMatrix",
    "DensityMatrixError",
    "DiagonalRepresentation",
    "DomainError",
    "FockOperator",
    "FockTruncation",
    "GridError",
    "KernelEvaluator",
    "MeasureCalibration",
    "NormalOrderCoeffs",
    "PFunction",
    "QBosonError",
    "QuadratureGrid",
    "RadialSeries",
    "algebra_residuals",
    "build_annihilator",
    "build_creator",
    "build_number",
    "calibrate_measure",
    "coherent_state",
    "density_from_coeffs",
    "diagonal_representation",
    "eigen_residual",
    "fock_dyad",
    "hermiticity_check",
    "jackson_integral",
    "kernel_K",
    "kernel_Ktilde",
    "normal_order_coeffs",
    "normal_order_oracle",
    "overlap",
    "projector",
    "q_derivative_series",
    "q_exp_first_zero",
    "q_exponential",
    "q_factorial",
    "q_number",
    "q_poisson",
    "reproducing_check",
    "resolution_of_unity",
    "rho_from_pfunction",
    "rho_function",
    "rho_tilde",
    "semigroup_check",
    "series_eval_at_zero",
    "theta_projected_series",
    "__version__",
]
