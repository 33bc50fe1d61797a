"""Nonlinear acceleration of gradient-descent iterate sequences.

Extrapolates windows of optimizer iterates into better points, either by
driving the combined residual to zero (RNA) or by directly minimizing a
linearized model of the objective (the DNA family), plus Anderson mixing
for generic fixed-point maps.  Includes benchmark problems, acceleration
schedules with convergence traces, and executable quadratic-case theory.
"""

from .base import ParamsMixin
from .extrapolators import (
    DNA,
    DNA1,
    DNA2,
    DNA3,
    RNA,
    ExtrapolationResult,
    Extrapolator,
    IterateWindow,
    LastIterate,
    ResidualMatrices,
    anderson_run,
    anderson_step,
    build_residuals,
    dna1_coefficients,
    dna2_coefficients,
    dna3_coefficients,
    dna_coefficients,
    extrapolate_point,
    make_extrapolator,
    rna_coefficients,
)
from .io import (
    LibsvmDataset,
    LibsvmParseError,
    format_libsvm,
    load_libsvm,
    parse_libsvm,
    read_trace,
    write_libsvm,
    write_summary,
    write_trace,
)
from .linalg import (
    SolveReport,
    SyntheticSpec,
    condition_number,
    geometric_spectrum,
    make_conditioned_matrix,
    solve_square,
    svd,
    weighted_norms,
)
from .problems import (
    ConvergenceError,
    LeastSquaresProblem,
    LogisticProblem,
    OptimumUnavailableError,
    Problem,
    RidgeProblem,
    grad_at_origin,
    numerical_optimum,
)
from .schemes import (
    AcceleratedGD,
    ConvergenceTrace,
    DivergenceError,
    SchemeConfig,
    TraceEvent,
    gd_run,
    run_offline,
    run_online1,
    run_online2,
    run_plain_gd,
    run_scheme,
)
from .theory import (
    ClosedFormValues,
    PinvIdentityReport,
    QuadraticCase,
    RatioBounds,
    TheoryCase,
    closed_form_values,
    gd_quadratic_iterates,
    kantorovich_ratio,
    pinv_identity_check,
    random_spd,
    rate_bound,
    ratio_and_bounds,
    spd_sqrt,
    theory_corpus,
)

__version__ = "0.1.0"
