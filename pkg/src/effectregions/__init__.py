"""Joint confidence regions for (baseline, treatment effect) measures on binary outcomes.

One logistic model is fitted to grouped data, its parameters are simulated from
the normal approximation, and each draw is standardized over the covariate
distribution to give (R0, O0, OR, RD, RR, AF).
"""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    CellCount,
    GroupedDataset,
    covariate_distribution,
    format_dataset,
    load_hpylori,
    parse_dataset,
    read_dataset,
)
from .design import DesignMatrix, ModelFormula, build_design, format_formula, parse_formula  # noqa: E402
from .measures import (  # noqa: E402
    MeasureSet,
    RiskPair,
    conditional_risk,
    measures_from_risks,
    point_measures,
    risks_from_odds,
    standardized_risk,
)
from .mle import FitResult, fit_logistic, observed_information  # noqa: E402
from .regions import (  # noqa: E402
    Ellipse,
    IntervalReport,
    MeasureDraws,
    RegionPolyline,
    chi2_quantile_df2,
    ellipse_boundary,
    log_odds_ellipse,
    map_region,
    quantile_intervals,
    simulate_measures,
    unmap_region,
)
from .sampler import RandomSource, cholesky, sample_mvn  # noqa: E402

HPYLORI_FORMULA = "z + x1 + x2 + x3 + x4 + z:x2 + z:x3"
