"""Aggregation problems on weighted trees: online algorithms, exact
offline baselines, transforms between cost models, and the half-line
special case."""

from .config import EPS_TIME
from .deadline import DeadlineAlgorithm, growth_bound, is_ratio_decreasing
from .engine import EngineTrace, OnlineAlgorithm, run_online, urgent_select
from .errors import (
    AlgorithmStall,
    BadParams,
    InfeasibleSchedule,
    InvariantViolation,
    MissingGap,
    MlapError,
    NonMonotoneSamples,
    OracleTooLarge,
    OverflowGuard,
    UnstabbableInterval,
    UnsupportedCostKind,
)
from .io import load_instance, save_instance
from .line import (
    LineInstance,
    LineRequest,
    adaptive_adversary,
    bidding_optimal_ratio,
    brute_force_line_opt,
    dline_run,
    gen_lb_mlapd,
    gen_lb_mlapl,
    line_opt_expiring,
)
from .maturity import (
    MaturityAlgorithm,
    core_subtree,
    ripeness,
    set_ripeness,
    surplus_envelopes,
)
from .model import (
    ROOT,
    CostReport,
    DeadlineCost,
    Instance,
    LinearCost,
    PwlCost,
    Request,
    Service,
    WeightedTree,
    cost_of_schedule,
    normalize_schedule,
)
from .offline import (
    OracleLimits,
    brute_force_opt,
    hitting_set_min,
    lbl_schedule,
    oracle_grid,
)
from .pwl import MonotonePwl
from .single_phase import (
    DoublingRun,
    SinglePhaseInstance,
    check_optimality,
    doubling_plan,
    doubling_sweep,
    max_covered,
    nested_phase_embed,
    opt_curve,
    opt_single_phase,
)
from .transforms import (
    ReducedAlgorithm,
    ReducedTree,
    embed_discrete,
    encode_deadlines,
    lift_bound,
    lift_service,
    stretch,
    to_ratio_decreasing,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
