"""topoforge: cost-optimal clustering of weighted planar users around shared
stations, by recursive rotating-line bipartition, iterative station location,
Fibonacci search over the separating angle, and a dynamic program over the
partition tree."""

from .bipartition import (
    PolarUser,
    SplitResult,
    SweepProfile,
    bipartition_cluster,
    candidate_angles,
    cluster_cost,
    is_circular_bimodal,
    polar_fold,
    range_ratio,
    refine,
    split_at_angle,
    split_cost,
    sweep_minimize,
)
from .estimator import StationClustering
from .fibsearch import SearchResult, fibonacci, minimize_periodic_bimodal, pad_to_fibonacci
from .instance import (
    FIBONACCI_IF_BIMODAL,
    FULL_SCAN,
    CostModel,
    Instance,
    InstanceError,
    SolverConfig,
    Thresholds,
    User,
    generate_instance,
    load_config,
    load_instance,
    save_instance,
)
from .tree import (
    PartitionTree,
    Solution,
    TreeNode,
    bottom_up_labels,
    grow_tree,
    load_cost_tree,
    load_cost_tree_file,
    mark_flags,
    optimal_frontier,
    solve_topology,
    verify_growth_inequalities,
)
from .weber import (
    WeberResult,
    centroid_seed,
    solve_weber,
    weber_gradient,
    weber_objective,
    weiszfeld_map,
)

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "FIBONACCI_IF_BIMODAL",
    "FULL_SCAN",
    "Instance",
    "InstanceError",
    "PartitionTree",
    "PolarUser",
    "SearchResult",
    "Solution",
    "SolverConfig",
    "SplitResult",
    "StationClustering",
    "SweepProfile",
    "Thresholds",
    "TreeNode",
    "User",
    "WeberResult",
    "bipartition_cluster",
    "bottom_up_labels",
    "candidate_angles",
    "centroid_seed",
    "cluster_cost",
    "fibonacci",
    "generate_instance",
    "grow_tree",
    "is_circular_bimodal",
    "load_config",
    "load_cost_tree",
    "load_cost_tree_file",
    "load_instance",
    "mark_flags",
    "minimize_periodic_bimodal",
    "optimal_frontier",
    "pad_to_fibonacci",
    "polar_fold",
    "range_ratio",
    "refine",
    "save_instance",
    "solve_topology",
    "solve_weber",
    "split_at_angle",
    "split_cost",
    "sweep_minimize",
    "verify_growth_inequalities",
    "weber_gradient",
    "weber_objective",
    "weiszfeld_map",
]
