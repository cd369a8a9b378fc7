"""Revenue-maximizing product ranking under cascade browsing with random attention spans."""

from .backend import BACKEND_NAME
from .bestx import BestXResult, best_x, clairvoyant_bound, greedy_fill, ratio_audit
from .errors import (
    BudgetExceededError,
    InvalidInputError,
    RankCascadeError,
    TiedScoreError,
)
from .fixed_span import FixedSpanSolution, assort_opt, build_dp_table, solve_fixed_span
from .instances import (
    Catalog,
    Product,
    Ranking,
    SpanDistribution,
    index_catalog,
    make_span_distribution,
    revenue_fixed_span,
    revenue_random_span,
    validate_ifr,
)
from .multi_purchase import (
    GeneralCatalog,
    GeneralProduct,
    best_x_general,
    order_general,
    revenue_general,
    revenue_general_random,
    solve_general_fixed_span,
)
from .oracle import brute_force_general, brute_force_optimal, enumeration_count
from .special import geometric_rank, prefix_condition

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "BestXResult",
    "BudgetExceededError",
    "Catalog",
    "FixedSpanSolution",
    "GeneralCatalog",
    "GeneralProduct",
    "InvalidInputError",
    "Product",
    "Ranking",
    "RankCascadeError",
    "SpanDistribution",
    "TiedScoreError",
    "assort_opt",
    "best_x",
    "best_x_general",
    "brute_force_general",
    "brute_force_optimal",
    "build_dp_table",
    "clairvoyant_bound",
    "enumeration_count",
    "geometric_rank",
    "greedy_fill",
    "index_catalog",
    "make_span_distribution",
    "order_general",
    "prefix_condition",
    "ratio_audit",
    "revenue_fixed_span",
    "revenue_general",
    "revenue_general_random",
    "revenue_random_span",
    "solve_fixed_span",
    "solve_general_fixed_span",
    "validate_ifr",
    "__version__",
]
