"""예산 제약 정책 솔버"""

from vortex.solver.index import (
    ActionSelection,
    IndexPolicy,
    IndexTable,
    ShapedRewardTable,
    compute_indices,
    compute_whittle_indices,
    select_actions,
    solve_policy,
    top_b,
)
from vortex.solver.oracle import (
    OracleResult,
    PolicyEvaluation,
    ScalarizedOptimum,
    brute_force_optimal,
    evaluate_policy_exact,
    scalarized_optima,
)

__all__ = [
    "ActionSelection", "IndexPolicy", "IndexTable", "ShapedRewardTable",
    "compute_indices", "compute_whittle_indices", "select_actions", "solve_policy", "top_b",
    "OracleResult", "PolicyEvaluation", "ScalarizedOptimum",
    "brute_force_optimal", "evaluate_policy_exact", "scalarized_optima",
]
