"""stublab: a laboratory for stubborn-set partial-order reduction.

Build reduced state spaces of labelled transition systems and Petri nets
under configurable side-condition sets, check every condition with decision
procedures or bounded-exhaustive oracles, and verify stutter- and weak-trace
preservation against brute-force enumeration.
"""

from .lsts import (
    EVENTUALLY_CONSTANT,
    EVENTUALLY_EMPTY,
    FINITE,
    PERIODIC,
    Lasso,
    Lsts,
    NoStutterTrace,
    Path,
    VisWord,
    enabled_actions,
    is_deterministic,
    lsts_from_json,
    lsts_to_json,
    nostut_trace,
    stutter_equivalent,
    validate_lsts,
    vis_projection,
    weak_equivalent,
)
from .oracle import (
    CompleteWitness,
    EnumLimits,
    LimitsExceeded,
    check_consistent_labelling,
    check_deadlock_preservation,
    check_reachable_labellings,
    check_stutter_trace_equivalence,
    check_weak_trace_equivalence,
    detect_q_relapse,
    enumerate_complete_witnesses,
    find_matching_complete_path,
)
from .petri import (
    CapExceeded,
    PetriNet,
    build_lsts,
    build_lsts_report,
    fire,
    net_from_json,
    net_to_json,
    pn_enabled,
    transition_delta,
)
from .props import (
    AtomicProp,
    InvisibilityFlags,
    MultiPoly,
    PLAIN,
    classify_invisibility,
    encode_fireable,
    eval_prop,
    poly_eval,
    shift_difference,
)
from .stubborn import (
    LeadstoGraph,
    ReducedLsts,
    ReductionFunction,
    check_condition,
    check_L,
    compute_stubborn_pn,
    explore_with_por,
    key_actions,
    reduce,
    stubborn_closure,
    subgraph_view,
    widened_stubborn_pn,
)
from .verdict import BOUNDED, FAILS, HOLDS, Verdict

__version__ = "0.1.0"
