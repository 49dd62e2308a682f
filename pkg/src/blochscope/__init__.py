"""blochscope: Bloch-type norms on the unit disk and essential-norm bounds
for composition operators.

Library surface in one import:

>>> import blochscope as bs
>>> est = bs.bloch_seminorm(bs.parse_symbol("identity"), bs.StandardWeight(1.0))
>>> round(est.value, 6)
1.0
"""

from .disk import (
    DiskGrid,
    DiskPoint,
    ParameterError,
    RefinementTrace,
    make_geometric_grid,
    refine_near,
)
from .estimators import (
    BoundaryScan,
    CriteriaComparison,
    EssentialNormBounds,
    PowerCriterionResult,
    ScanSettings,
    UnsupportedWeightError,
    criteria_compare,
    essential_bounds,
    mobius_scan,
    power_criterion_estimate,
    sigma_scan,
)
from .norms import (
    BlochNorm,
    NonFiniteError,
    SearchSettings,
    SeminormEstimate,
    bloch_norm,
    bloch_seminorm,
    composition_norm,
    composition_seminorm,
    dilate_and_norm,
)
from .sigma_family import (
    DomainError,
    SigmaFamily,
    check_derivative_lower_bound,
    check_uniform_vanishing,
    sigma_derivative,
    sigma_eval,
    sigma_norm_cap,
)
from .symbols import (
    AnalyticMap,
    NotSelfMapError,
    SelfMapCertificate,
    SymbolParameterError,
    SymbolSyntaxError,
    certify_self_map,
    evaluate,
    evaluate_derivative,
    parse_symbol,
    print_symbol,
)
from .weights import (
    CustomRadialWeight,
    LogWeight,
    ScaledWeight,
    StandardWeight,
    Weight,
    check_dilation_inequality,
    parse_weight,
    weight_at,
)

__version__ = "0.1.0"
