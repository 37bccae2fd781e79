"""Exact solver workbench for the Bipartite Influence scoring game."""

__version__ = "0.1.0"

from .graphs import (
    BLACK,
    WHITE,
    GroundGraph,
    Position,
    RemovalSet,
    VertexColor,
    apply_move,
    build_cylinder,
    build_grid,
    build_hypercube,
    build_segment,
    build_torus,
    canonical_key,
    components,
    graph_from_json,
    legal_moves,
    load_graph,
    removal_closure,
    segment_value,
    strip_isolated,
    twin_classes,
)
from .solver import (
    ScorePair,
    SearchBudgetError,
    Solver,
    gift_bounds_check,
    milnor_audit,
    prune_dominated,
)
from .games import (
    Game,
    add,
    add_all,
    audit_universe,
    dominates,
    equivalent,
    format_game,
    from_position,
    leaf_values,
    length,
    ls,
    negate,
    node,
    number,
    parse_game,
    repeated,
    rs,
    simplify,
)
from .thermo import (
    PiecewiseLinear,
    Thermograph,
    cooled_score_bounds_check,
    mean,
    mean_by_repetition,
    sum_temperature_check,
    thermograph,
)
from .segments import (
    SegmentEngine,
    SegmentSum,
    canonicalize,
    normal_form,
    periodicity_scan,
    rewrite_42,
    segment_scores,
    segment_table,
    segment_union_tree,
    sum_bound_check,
)
from .symmetry import (
    CertifyReport,
    SearchOutcome,
    bw_condition_report,
    certify_draw,
    find_bw,
    mirror_strategy_audit,
    verify_bw,
)
from .reduction import (
    PosCnf,
    gadget_graph,
    parse_pos_cnf,
    pos_cnf_winner,
    reduction_soundness_check,
)
