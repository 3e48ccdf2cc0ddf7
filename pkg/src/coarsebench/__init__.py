"""Desk-scale workbench for doubled-space metrics, their concatenation
semigroup, band-operator support masks, and finite inverse-semigroup checks."""

from .compare import (
    EQUIVALENT,
    INCONCLUSIVE,
    NOT_EQUIVALENT,
    ComparisonConfig,
    CoarseVerdict,
    ControlFunction,
    WitnessPair,
    coarse_compare,
    compare_leveled,
    distortion_profile,
)
from .doubles import (
    DoubleMetric,
    NestedFamily,
    compare_doubles,
    concat,
    constant_double,
    flip,
    idempotent_from_family,
    matrix_double,
    minplus,
    portal_double,
    random_portal_double,
    semigroup_probe,
    standard_double,
    translation_double,
    unit_double,
    validate_double,
    validate_family,
    witness_nonequivalence,
    zero_double,
)
from .exact import Cx, as_q, exact_sqrt, q_str
from .operators import (
    BandOperator,
    SupportMask,
    adjoint,
    base_mask,
    block_average_operator,
    col_sum_bound,
    compose,
    concat_mask_cover,
    elementary,
    ghost_profile,
    identity_operator,
    inner_left,
    inner_right,
    mask_compose,
    mask_contains_operator,
    mask_inclusion,
    mask_transpose,
    metric_mask,
    operator_support,
    pair_sum_operator,
    propagation,
    row_sum_bound,
)
from .semigroups import (
    MulTable,
    PartialBijection,
    check_inverse,
    check_regular,
    ideal_product,
    natural_partial_order,
    pb_compose,
    pb_count,
    pb_empty,
    pb_enumerate,
    pb_from_mask,
    pb_identity,
    pb_inverse,
    pb_support_correspondence,
    table_natural_partial_order,
)
from .spaces import (
    InputError,
    MetricTower,
    ball,
    bounded_geometry_profile,
    metric_fn,
    tower_from_generator,
    tower_from_matrix,
    validate_metric,
)

__version__ = "0.1.0"
