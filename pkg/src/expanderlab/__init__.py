"""Monte Carlo laboratory for random tensor-sum superoperators.

The package samples Haar unitaries and Ginibre matrices, assembles
tensor-sum superoperators acting on Hilbert-Schmidt space, estimates
the twirling channel and its traceless-subspace eigenvalue, and runs
seeded experiments that probe moment-domination inequalities and
operator-norm bounds for quantum-expander style channels.
"""

from .sampling import (
    RankDeficiencyError,
    SeedStream,
    polar_decompose,
    sample_ginibre,
    sample_haar_unitary,
)
from .superop import (
    TensorSumOperator,
    apply,
    apply_adjoint,
    apply_adjoint_block,
    apply_block,
    build_double_sum_operator,
    build_gaussian_operator,
    build_uu_operator,
    densify,
    from_descriptor,
    hs_inner,
    project_traceless,
    to_descriptor,
)
from .spectral import (
    NormRequest,
    PowerIterationError,
    operator_norm_matrix,
    schatten_norm,
    trace_moment,
    trace_norm_matrix,
)
from .chi import (
    ChiEstimate,
    check_polar_factorization,
    check_rotational_invariance,
    estimate_chi_entrywise,
    estimate_chi_limit,
    estimate_chi_spectral,
    estimate_chi_trace_formula,
)
from .experiments import (
    EstimateResult,
    ExperimentConfig,
    run_concentration_probe,
    run_decoupling_check,
    run_double_sum_sweep,
    run_gaussian_moment_bound,
    run_lemma_comparison,
    run_matrix_coeff_sweep,
    run_theorem_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ChiEstimate",
    "EstimateResult",
    "ExperimentConfig",
    "NormRequest",
    "PowerIterationError",
    "RankDeficiencyError",
    "SeedStream",
    "TensorSumOperator",
    "apply",
    "apply_adjoint",
    "apply_adjoint_block",
    "apply_block",
    "build_double_sum_operator",
    "build_gaussian_operator",
    "build_uu_operator",
    "check_polar_factorization",
    "check_rotational_invariance",
    "densify",
    "estimate_chi_entrywise",
    "estimate_chi_limit",
    "estimate_chi_spectral",
    "estimate_chi_trace_formula",
    "from_descriptor",
    "hs_inner",
    "operator_norm_matrix",
    "polar_decompose",
    "project_traceless",
    "run_concentration_probe",
    "run_decoupling_check",
    "run_double_sum_sweep",
    "run_gaussian_moment_bound",
    "run_lemma_comparison",
    "run_matrix_coeff_sweep",
    "run_theorem_sweep",
    "sample_ginibre",
    "sample_haar_unitary",
    "schatten_norm",
    "to_descriptor",
    "trace_moment",
    "trace_norm_matrix",
]
