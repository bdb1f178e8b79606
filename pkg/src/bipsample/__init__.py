"""Uniform sampling of bipartite graphs with prescribed degrees and pinned
edges/non-edges: feasibility tests, structural analysis of the pinned set,
four Markov chains, and a brute-force verification suite."""

from .analysis import (
    AnalysisReport,
    FGraph,
    analyze,
    chord_cycle,
    chord_cycle_valid,
    find_coprime_odd_t,
    has_cycle_of_length,
    is_forest,
    max_matching_at_least,
)
from .chains import (
    STAY,
    ChainConfig,
    CircleTradeProposal,
    Stay,
    TradeProposal,
    enumerate_trades,
    propose_bounded_cycle_swap,
    propose_circle_trade,
    propose_swap,
    propose_trade,
    run,
    step,
)
from .core import (
    FORCED_EDGE,
    FORCED_NON_EDGE,
    FREE,
    DegreeSequence,
    FixedCellViolation,
    FixedSet,
    Infeasible,
    Instance,
    InstanceMismatch,
    InvalidMove,
    MoveSet,
    NotRealizable,
    NoUsableBound,
    PolarityConflict,
    Realization,
    SymDiff,
    TooLarge,
    apply_cycle_swap,
    symmetric_difference,
)
from .oracle import (
    StateGraph,
    VerificationResult,
    build_state_graph,
    check_connectivity,
    check_distance_bound,
    check_static_set,
    components_isomorphic,
    enumerate_realizations,
    run_verification,
    search_split_masks,
    uniformity_report,
)
from .realizability import (
    StaticSet,
    gale_ryser_realizable,
    initial_realization,
    partition_fixed_set,
    static_set,
    static_set_pruned,
)

__all__ = [name for name in dir() if not name.startswith("_")]
