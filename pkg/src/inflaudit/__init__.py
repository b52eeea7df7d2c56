"""Exact subset influence for linear regression, with extreme-value tests.

The library computes the exact influence of data subsets on a regression
coefficient, finds most-influential sets, and tests whether their influence
is statistically excessive under an extreme value null estimated from block
maxima.
"""

from .audit import (
    AuditConfig,
    AuditReport,
    TailDiagnostics,
    block_maxima_null,
    select_regime,
    significance_thresholds,
    test_influence,
)
from .data import Dataset, load_csv
from .evt import (
    EvdModel,
    correct_block_location,
    correct_block_scale_frechet,
    evd_cdf,
    evd_quantile,
    fit_gev_mle,
    fit_gumbel_mle,
    hill_tail_index,
)
from .influence import (
    InfluenceSet,
    first_order_influence,
    influence_set,
    influence_single,
    refit_influence_oracle,
    update_after_removal,
)
from .model import RegressionFit, fit_ols, partial_out
from .search import (
    SearchSpec,
    exhaustive_most_influential,
    greedy_most_influential,
)
from .sim import (
    SimConfig,
    generate_synthetic,
    gumbel_estimation_study,
    illustration_scenario,
    shape_study,
)

__version__ = "0.1.0"

__all__ = [
    "AuditConfig",
    "AuditReport",
    "Dataset",
    "EvdModel",
    "InfluenceSet",
    "RegressionFit",
    "SearchSpec",
    "SimConfig",
    "TailDiagnostics",
    "block_maxima_null",
    "correct_block_location",
    "correct_block_scale_frechet",
    "evd_cdf",
    "evd_quantile",
    "exhaustive_most_influential",
    "first_order_influence",
    "fit_gev_mle",
    "fit_gumbel_mle",
    "fit_ols",
    "generate_synthetic",
    "greedy_most_influential",
    "gumbel_estimation_study",
    "hill_tail_index",
    "illustration_scenario",
    "influence_set",
    "influence_single",
    "load_csv",
    "partial_out",
    "refit_influence_oracle",
    "select_regime",
    "shape_study",
    "significance_thresholds",
    "test_influence",
    "update_after_removal",
]
