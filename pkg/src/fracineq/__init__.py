"""Riemann-Liouville fractional integrals and numerical checks of
Hermite-Hadamard type inequalities for prequasiinvex functions."""

from .dual import DualValue
from .expr import (
    DomainError,
    Expr,
    ExprError,
    ParseError,
    evaluate,
    evaluate_array,
    evaluate_dual,
    kink_points,
    parse,
    to_text,
)
from .explorer import (
    FAMILIES,
    Family,
    ReductionReport,
    ScanPlan,
    ScanRow,
    SearchBudget,
    SearchOutcome,
    alpha_scan,
    counterexample_search,
    parse_alpha_grid,
    parse_family,
    reduction_sweep,
)
from .fracint import (
    FracOrder,
    QuadratureError,
    frac_trapezoid_mean,
    left_integral,
    monomial_oracle,
    right_integral,
)
from .invexity import (
    DEFAULT_SEED,
    CertReport,
    EtaMap,
    Interval,
    SamplingPlan,
    Witness,
    certify_preinvex,
    certify_prequasiinvex,
    certify_quasiconvex,
    check_condition_c,
    check_eq_1_5,
    check_invex_set,
    linear_eta,
    make_eta,
)
from .quadrature import QuadratureConfig, QuadResult, integrate
from .special import gamma_fn
from .verify import (
    THEOREMS,
    ExponentPair,
    HypothesisRangeError,
    InequalityCase,
    NotDifferentiableError,
    VerificationResult,
    kernel_abs_integral,
    kernel_pow_integral,
    lemma_identity_residual,
    trapezoid_defect,
    verify,
    verify_hh_classical,
    verify_lemma,
    verify_remark_variants,
    verify_thm_1_2,
    verify_thm_1_3,
    verify_thm_1_4,
    verify_thm_1_5,
    verify_thm_2_1,
    verify_thm_2_2,
    verify_thm_2_4,
    verify_thm_2_5,
)

__version__ = "0.1.0"
