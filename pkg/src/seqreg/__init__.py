"""Regularization toolkit for weight sequences.

Convex minorants of log-scale sequences, associated weight functions,
trace functions, and stripe-limited regularization driven by a
regularizing function, with exact rational arithmetic wherever the
inputs allow it.
"""

from .errors import (
    AxiomViolation,
    InconsistentDeclaration,
    InfiniteEntryUnsupported,
    InfinityAtZero,
    NonFiniteEntry,
    NotComparable,
    NotLogConvex,
    OutOfDomain,
    ParseError,
    RegimeMismatch,
    SeqRegError,
    TruncatedTail,
    Unbounded,
    UnknownAIota,
    WindowTooShort,
)
from .extreal import NEG_INF, ONE, POS_INF, ZERO, ExtReal, ext, log_of_fraction
from .tails import (
    LOG,
    WEIGHT,
    AffineLog,
    ExplicitOnly,
    Expression,
    FactorialPower,
    Geometric,
    compile_formula,
    tail_from_json,
)
from .sequences import (
    CASE1,
    CASE2,
    DEFAULT_WINDOW,
    INDETERMINATE,
    STANDARD,
    ConvexityReport,
    GrowthIndicators,
    LimitComparison,
    NormalizeResult,
    RegimeClassification,
    SequenceSpec,
    classify_regime,
    growth_indicators,
    is_log_convex,
    limit_comparison,
    normalize_sequence,
    quotients,
    require_regime,
    resolve_window,
    to_log_scale,
    to_weight_scale,
)
from .piecewise import (
    EMPTY_INTERVAL,
    REAL_LINE,
    Breakpoint,
    ConjugateValue,
    Interval,
    PiecewiseLinearFn,
    StepFunction,
)
from .minorant import (
    Case2LimitReport,
    MinorantResult,
    SupportLine,
    case1_regularize,
    case2_limit_check,
    case2_regularize,
    convex_minorant,
    log_convex_minorant,
    reconstruct_from_trace,
    support_line,
    trace_function,
)
from .weights import (
    OmegaValue,
    counting_function,
    omega_direct,
    omega_double_tilde,
    omega_integral,
    omega_piecewise,
    omega_tilde,
    phi_omega,
    underline_sequence,
    young_conjugate,
)
from .phireg import (
    ComparisonReport,
    PhiInterval,
    PhiRegResult,
    PhiSegment,
    RegularizingFunction,
    compare_regularizations,
    counting_m_phi,
    make_phi,
    recover_sequence,
    regularize_with_phi,
    trace_A_phi,
    trace_invariance_check,
)
from .oracles import (
    OracleReport,
    SweepResult,
    brute_minorant,
    brute_omega,
    brute_phi_sweep,
    compare_values,
)

__version__ = "0.1.0"

__all__ = [
    "AffineLog",
    "AxiomViolation",
    "Breakpoint",
    "CASE1",
    "CASE2",
    "Case2LimitReport",
    "ComparisonReport",
    "ConjugateValue",
    "ConvexityReport",
    "DEFAULT_WINDOW",
    "EMPTY_INTERVAL",
    "ExplicitOnly",
    "Expression",
    "ExtReal",
    "FactorialPower",
    "Geometric",
    "GrowthIndicators",
    "INDETERMINATE",
    "InconsistentDeclaration",
    "InfiniteEntryUnsupported",
    "InfinityAtZero",
    "Interval",
    "LOG",
    "LimitComparison",
    "MinorantResult",
    "NEG_INF",
    "NonFiniteEntry",
    "NormalizeResult",
    "NotComparable",
    "NotLogConvex",
    "ONE",
    "OmegaValue",
    "OracleReport",
    "OutOfDomain",
    "POS_INF",
    "ParseError",
    "PhiInterval",
    "PhiRegResult",
    "PhiSegment",
    "PiecewiseLinearFn",
    "REAL_LINE",
    "RegimeClassification",
    "RegimeMismatch",
    "RegularizingFunction",
    "STANDARD",
    "SeqRegError",
    "SequenceSpec",
    "StepFunction",
    "SupportLine",
    "SweepResult",
    "TruncatedTail",
    "Unbounded",
    "UnknownAIota",
    "WEIGHT",
    "WindowTooShort",
    "ZERO",
    "brute_minorant",
    "brute_omega",
    "brute_phi_sweep",
    "case1_regularize",
    "case2_limit_check",
    "case2_regularize",
    "classify_regime",
    "compare_regularizations",
    "compare_values",
    "compile_formula",
    "convex_minorant",
    "counting_function",
    "counting_m_phi",
    "ext",
    "growth_indicators",
    "is_log_convex",
    "limit_comparison",
    "log_convex_minorant",
    "log_of_fraction",
    "make_phi",
    "normalize_sequence",
    "omega_direct",
    "omega_double_tilde",
    "omega_integral",
    "omega_piecewise",
    "omega_tilde",
    "phi_omega",
    "quotients",
    "reconstruct_from_trace",
    "recover_sequence",
    "regularize_with_phi",
    "require_regime",
    "resolve_window",
    "support_line",
    "tail_from_json",
    "to_log_scale",
    "to_weight_scale",
    "trace_A_phi",
    "trace_function",
    "trace_invariance_check",
    "underline_sequence",
    "young_conjugate",
]
