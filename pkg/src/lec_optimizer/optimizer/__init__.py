"""Left-deep join-order optimizers over uncertain run-time parameters."""

from .algorithms import (
    Algorithm,
    candidate_memories,
    evaluate_under,
    lec_a_candidates,
    lec_b_candidates,
    optimize,
    optimize_lec_a,
    optimize_lec_b,
    optimize_lec_c,
    optimize_lec_c_dynamic,
    optimize_lec_d,
    optimize_lsc,
    rank_plans,
)
from .dp import DPResult, PlanTableEntry, run_dp
from .plan import Plan, PlanError, load_plan, render_plan_tree
from .problem import OptimizerUsageError, Problem, evaluate_plan, phase_memories, point_memories
from .topc import TopCMerge, top_c_merge

__all__ = [
    "Algorithm",
    "DPResult",
    "OptimizerUsageError",
    "Plan",
    "PlanError",
    "PlanTableEntry",
    "Problem",
    "TopCMerge",
    "candidate_memories",
    "evaluate_plan",
    "evaluate_under",
    "lec_a_candidates",
    "lec_b_candidates",
    "load_plan",
    "optimize",
    "optimize_lec_a",
    "optimize_lec_b",
    "optimize_lec_c",
    "optimize_lec_c_dynamic",
    "optimize_lec_d",
    "optimize_lsc",
    "phase_memories",
    "point_memories",
    "rank_plans",
    "render_plan_tree",
    "run_dp",
    "top_c_merge",
]
