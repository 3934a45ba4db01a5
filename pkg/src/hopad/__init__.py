"""Deterministic higher-order pushdown automata over data words, with
run classification, a run-descriptor type system, and brute-force
verification harnesses."""

from .core import (
    NO_DATA,
    Atom,
    Automaton,
    CollapseUnavailable,
    Configuration,
    Diagnostic,
    IllFormed,
    InvalidAutomaton,
    Op,
    Outcome,
    Run,
    StackError,
    Step,
    Stuck,
    Transition,
    apply_operation,
    automaton_diagnostics,
    collapse,
    decollapse,
    execute_word,
    initial_configuration,
    is_well_formed,
    pop,
    project_word,
    push,
    recompose,
    replay,
    spine,
    step,
    top_atom,
    top_stack,
    validate_automaton,
)
from .monoid import (
    FiniteMonoid,
    classify_word,
    monoid_by_name,
    phi_of_run,
    presence_monoid,
    shape_monoid,
    trivial_monoid,
    validate_monoid,
)
from .ulang import (
    UMembershipReport,
    build_u_recognizer,
    decorate_distinct,
    gen_w,
    in_u,
)
from .lineage import (
    ClassificationTable,
    DecompositionTree,
    LineageRun,
    classification_table,
    decompose_return,
    decompose_upper,
    instrument_lineage,
    is_k_return,
    is_k_upper,
    is_normalized,
    remark_k_return,
)
from .typesys import (
    NE,
    CheckReport,
    Goal,
    Level0TypeTable,
    ResourceCapExceeded,
    RunDescriptor,
    StackTyping,
    Universe,
    agrees,
    atom_typing,
    check_composer,
    check_idv,
    check_run2type,
    combine_types,
    goal_space,
    saturate_level0,
    stack_typing,
    type_of_stack,
)
from .srcsets import (
    ProvenanceNode,
    SrcResult,
    check_idv_upper,
    check_origin,
    compute_src,
)
from .harness import (
    DEFAULT_BOUNDS,
    SUITE_NAMES,
    EnumerationSpace,
    SuiteReport,
    enumerate_runs,
    find_agreeing_runs,
    run_suites,
)
