"""Group heterogeneity scanning for multilevel model structure discovery.

Fits a Gaussian-process surrogate to tabular data with integer-coded
grouping columns, ranks predictor-grouping interactions with analytic
KL-divergence curvature measures, and recommends a multilevel model
formula.
"""

from hetscan.data import (
    BERNOULLI,
    GAUSSIAN,
    DataError,
    Dataset,
    EncodedDesign,
    StandardizationParams,
    encode_groups,
    load_csv,
    standardize,
    write_csv,
)
from hetscan.gp import (
    CholeskyError,
    ConvergenceError,
    ExactPosterior,
    LaplacePosterior,
    PredictiveDerivatives,
    PredictiveDistribution,
    fit_exact,
    fit_laplace,
    predict_exact,
    predict_exact_with_derivatives,
    predict_laplace,
    predict_laplace_with_derivatives,
)
from hetscan.heterogeneity import (
    HeterogeneityReport,
    Selection,
    assess,
    choose_grouping,
    recommend_formula,
    report_to_dict,
    select_top_t,
)
from hetscan.kernel import Hyperparameters, kernel_eval, kernel_input_derivatives
from hetscan.sensitivity import (
    finite_difference_kl_oracle,
    fisher_at_coincidence,
    kl_diff,
    kl_diff2,
)
from hetscan.benchmark import (
    BenchmarkError,
    CellResult,
    RocPoint,
    auc_of_points,
    default_grid,
    results_to_csv,
    run_benchmark,
)
from hetscan.simulate import GroundTruth, SimConfig, generate, score_selection
from hetscan.tuning import OptConfig, OptimizationError, log_marginal_likelihood, optimize
from hetscan.verify import VerificationResult, verify_derivatives

__version__ = "0.1.0"

__all__ = [
    "BERNOULLI",
    "GAUSSIAN",
    "BenchmarkError",
    "CellResult",
    "CholeskyError",
    "ConvergenceError",
    "DataError",
    "Dataset",
    "EncodedDesign",
    "ExactPosterior",
    "GroundTruth",
    "HeterogeneityReport",
    "Hyperparameters",
    "LaplacePosterior",
    "OptConfig",
    "OptimizationError",
    "PredictiveDerivatives",
    "PredictiveDistribution",
    "RocPoint",
    "Selection",
    "SimConfig",
    "StandardizationParams",
    "VerificationResult",
    "assess",
    "auc_of_points",
    "choose_grouping",
    "default_grid",
    "encode_groups",
    "finite_difference_kl_oracle",
    "fisher_at_coincidence",
    "fit_exact",
    "fit_laplace",
    "generate",
    "kernel_eval",
    "kernel_input_derivatives",
    "kl_diff",
    "kl_diff2",
    "load_csv",
    "log_marginal_likelihood",
    "optimize",
    "predict_exact",
    "predict_exact_with_derivatives",
    "predict_laplace",
    "predict_laplace_with_derivatives",
    "recommend_formula",
    "results_to_csv",
    "run_benchmark",
    "report_to_dict",
    "score_selection",
    "select_top_t",
    "verify_derivatives",
    "standardize",
    "write_csv",
]
