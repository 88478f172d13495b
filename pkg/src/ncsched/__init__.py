"""Co-design of channel schedules and deadbeat inputs for bandwidth-limited NCSs.

Given N single-input linear plants sharing a channel that serves at most M of
them per step, the package constructs a per-step access schedule and the
matching control inputs so that every plant's nonzero initial state reaches
zero within a given horizon. Construction routes: sequential block/lane
deadbeat plans, a per-plant minimum-l1 relaxation with exhaustive
restricted-isometry certificates, and an exact brute-force search at desk
scale; a simulator verifies every produced schedule.
"""

from .core import (
    TERMINAL_RTOL,
    ZERO_RTOL,
    ControlLogic,
    NcsInstance,
    PlantDynamics,
    SchedulingLogic,
    is_reachable,
    lifted_matrix,
    mat_pow,
    open_loop_hit_time,
    reach_matrix,
)
from .deadbeat import DeadbeatWindow, deadbeat_inputs, make_window, windowed_inputs
from .errors import (
    CapacityViolationError,
    HorizonTooShortError,
    IllConditionedWarning,
    NcsError,
    NonFiniteError,
    NoSolutionFoundError,
    NotReachableError,
    RejectionBudgetError,
    SchemaError,
    SolverStallError,
    TooLargeError,
    WindowOverflowError,
)
from .instances import (
    InstanceFile,
    generate_instance,
    read_instance,
    spectral_radius,
    write_instance,
)
from .pipeline import solve_instance
from .planner import (
    BlockPlan,
    LanePlan,
    block_plan_from_lanes,
    build_from_block_plan,
    build_from_lane_plan,
    check_necessary,
    exhaustive_block_plan,
    exhaustive_lane_plan,
    find_block_plan,
    find_lane_plan,
    split_open_loop,
)
from .report import SolveReport, export_plots, read_report, write_report
from .sim import SimulationResult, extract_schedule, rollout, simulate, verify_logic
from .sparse import (
    RelaxationResult,
    RipReport,
    SparsitySolution,
    group_by_capacity,
    l0_feasible_bruteforce,
    l1_min_inputs,
    measure_sparsity,
    min_l1,
    rip_delta,
    solve_via_relaxation,
    support_set,
)

__version__ = "0.1.0"

__all__ = [
    "TERMINAL_RTOL",
    "ZERO_RTOL",
    "BlockPlan",
    "CapacityViolationError",
    "ControlLogic",
    "DeadbeatWindow",
    "HorizonTooShortError",
    "IllConditionedWarning",
    "InstanceFile",
    "LanePlan",
    "NcsError",
    "NcsInstance",
    "NoSolutionFoundError",
    "NonFiniteError",
    "NotReachableError",
    "PlantDynamics",
    "RejectionBudgetError",
    "RelaxationResult",
    "RipReport",
    "SchedulingLogic",
    "SchemaError",
    "SimulationResult",
    "SolveReport",
    "SolverStallError",
    "SparsitySolution",
    "TooLargeError",
    "WindowOverflowError",
    "block_plan_from_lanes",
    "build_from_block_plan",
    "build_from_lane_plan",
    "check_necessary",
    "deadbeat_inputs",
    "exhaustive_block_plan",
    "exhaustive_lane_plan",
    "export_plots",
    "extract_schedule",
    "find_block_plan",
    "find_lane_plan",
    "generate_instance",
    "group_by_capacity",
    "is_reachable",
    "l0_feasible_bruteforce",
    "l1_min_inputs",
    "lifted_matrix",
    "make_window",
    "mat_pow",
    "measure_sparsity",
    "min_l1",
    "open_loop_hit_time",
    "read_instance",
    "read_report",
    "reach_matrix",
    "rip_delta",
    "rollout",
    "simulate",
    "solve_instance",
    "solve_via_relaxation",
    "spectral_radius",
    "split_open_loop",
    "support_set",
    "verify_logic",
    "windowed_inputs",
    "write_instance",
    "write_report",
]
