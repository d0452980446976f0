from .checks import (
    CheckResult,
    check_degenerate_invariance,
    check_invariant_leaf,
    check_regular_equivalence,
    structural_checks,
)
from .equilibria import (
    EquilibriumReport,
    EquilibriumSearch,
    classify,
    classify_stability,
    default_seeds,
    find_equilibria,
)
from .integrate import (
    IntegrationError,
    IntegratorConfig,
    TrajectoryRecord,
    TrajectorySummary,
    integrate,
    rk4_step,
)

__all__ = [
    "CheckResult",
    "EquilibriumReport",
    "EquilibriumSearch",
    "IntegrationError",
    "IntegratorConfig",
    "TrajectoryRecord",
    "TrajectorySummary",
    "check_degenerate_invariance",
    "check_invariant_leaf",
    "check_regular_equivalence",
    "classify",
    "classify_stability",
    "default_seeds",
    "find_equilibria",
    "integrate",
    "rk4_step",
    "structural_checks",
]
