"""Image deblurring with graph Laplacian regularization.

The pipeline has two stages. A Tikhonov reconstruction with a periodic
first-difference penalty, with its parameter picked by generalized cross
validation, weights a pixel graph; the normalized Laplacian of that graph
is then used as the sparsifying operator in a non-negative l2-l1 problem
solved by ADMM.
"""

from .admm import (
    METHODS,
    AdmmConfig,
    AdmmState,
    AdmmTrace,
    MethodResult,
    admm_deblur,
    project_nonneg,
    run_method,
    soft_threshold,
)
from .core import Objective, as_image, evaluate_objective, lex_index, lex_unindex
from .errors import (
    ConfigurationError,
    DegenerateGCVError,
    DegenerateGraphError,
    DivergenceError,
    GraphDeblurError,
    NumericIntegrityError,
    SingularityError,
    UndefinedMetricError,
)
from .graph import (
    GraphConfig,
    build_adjacency,
    build_graph_laplacian,
    build_laplacian,
    build_oracle_laplacian,
    laplacian_apply,
    read_matrix_market,
    write_matrix_market,
)
from .lsqr import LsqrReport, lsqr_solve
from .metrics import MetricsReport, compute_metrics, psnr, rre, ssim
from .reference import GcvResult, compute_reference, gcv_minimize, gcv_value
from .spectral import Psf, bccb_apply, bccb_solve_filtered, psf_to_spectrum
from .synthetic import add_noise, average_psf, gaussian_psf, motion_psf, phantom
from .tv import TvOperator, build_tv, tv_apply, tv_matrix

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "AdmmConfig",
    "AdmmState",
    "AdmmTrace",
    "MethodResult",
    "admm_deblur",
    "project_nonneg",
    "run_method",
    "soft_threshold",
    "Objective",
    "as_image",
    "evaluate_objective",
    "lex_index",
    "lex_unindex",
    "ConfigurationError",
    "DegenerateGCVError",
    "DegenerateGraphError",
    "DivergenceError",
    "GraphDeblurError",
    "NumericIntegrityError",
    "SingularityError",
    "UndefinedMetricError",
    "GraphConfig",
    "build_adjacency",
    "build_graph_laplacian",
    "build_laplacian",
    "build_oracle_laplacian",
    "laplacian_apply",
    "read_matrix_market",
    "write_matrix_market",
    "LsqrReport",
    "lsqr_solve",
    "MetricsReport",
    "compute_metrics",
    "psnr",
    "rre",
    "ssim",
    "GcvResult",
    "compute_reference",
    "gcv_minimize",
    "gcv_value",
    "Psf",
    "bccb_apply",
    "bccb_solve_filtered",
    "psf_to_spectrum",
    "add_noise",
    "average_psf",
    "gaussian_psf",
    "motion_psf",
    "phantom",
    "TvOperator",
    "build_tv",
    "tv_apply",
    "tv_matrix",
]
