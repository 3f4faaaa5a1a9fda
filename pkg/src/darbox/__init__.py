"""darbox: bracketing Darboux integration over hyperrectangles.

Lower/upper Darboux sums from rigorous or sampled bound oracles, adaptive
bracket refinement, Fubini-style iterated integration, oscillation-based
discontinuity scanning, and Riemann-sum evaluation of series limits.
"""

from .bounds import (
    BoundOracle,
    CustomOracle,
    Enclosure,
    LipschitzOracle,
    MockOracle,
    SampledOracle,
    SupportOracle,
    lipschitz_enclosure,
    mock_oracle,
    sample_enclosure,
)
from .darboux import (
    Bracket,
    IntegrateResult,
    adaptive_integrate,
    bracket_for_partition,
    integrate_with_support,
    lower_sum,
    upper_sum,
)
from .errors import (
    ExprDimensionError,
    ExprDomainError,
    ExprSyntaxError,
    SectionFailureError,
    UnboundedFunctionError,
)
from .expr import Expr, IntervalOracle, eval_point, interval_eval, interval_oracle, parse
from .fubini import (
    AxisOrder,
    CrosscheckReport,
    IteratedResult,
    SectionFunction,
    fubini_crosscheck,
    inner_section_integral,
    iterated_integrate,
)
from .geometry import (
    GridPartition,
    MultiIndex,
    Rectangle,
    common_refinement,
    is_refinement,
    split_axis,
    subrectangles,
    uniform_partition,
)
from .intervals import Interval
from .oscillation import (
    DiscontinuityReport,
    OscillationEstimate,
    OscillationProfile,
    cover_volume,
    discontinuity_scan,
    oscillation_at_scale,
    oscillation_limit,
)
from .riemann1d import (
    Quad1DResult,
    SeriesLimitResult,
    TaggedPartition,
    adaptive_1d,
    bronstein_integral,
    bronstein_product,
    darboux_sums_1d,
    mesh_norm,
    riemann_sum,
    right_endpoint_sum,
    series_limit,
)

__version__ = "0.1.0"

__all__ = [
    "AxisOrder",
    "BoundOracle",
    "Bracket",
    "CrosscheckReport",
    "CustomOracle",
    "DiscontinuityReport",
    "Enclosure",
    "Expr",
    "ExprDimensionError",
    "ExprDomainError",
    "ExprSyntaxError",
    "GridPartition",
    "IntegrateResult",
    "Interval",
    "IntervalOracle",
    "IteratedResult",
    "LipschitzOracle",
    "MockOracle",
    "MultiIndex",
    "OscillationEstimate",
    "OscillationProfile",
    "Quad1DResult",
    "Rectangle",
    "SampledOracle",
    "SectionFailureError",
    "SectionFunction",
    "SeriesLimitResult",
    "SupportOracle",
    "TaggedPartition",
    "UnboundedFunctionError",
    "adaptive_1d",
    "adaptive_integrate",
    "bracket_for_partition",
    "bronstein_integral",
    "bronstein_product",
    "common_refinement",
    "cover_volume",
    "darboux_sums_1d",
    "discontinuity_scan",
    "eval_point",
    "fubini_crosscheck",
    "inner_section_integral",
    "integrate_with_support",
    "interval_eval",
    "interval_oracle",
    "is_refinement",
    "iterated_integrate",
    "lipschitz_enclosure",
    "lower_sum",
    "mesh_norm",
    "mock_oracle",
    "oscillation_at_scale",
    "oscillation_limit",
    "parse",
    "riemann_sum",
    "right_endpoint_sum",
    "sample_enclosure",
    "series_limit",
    "split_axis",
    "subrectangles",
    "uniform_partition",
    "upper_sum",
]
