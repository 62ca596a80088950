"""justsem: rule-system semantics via justifications and graph games.

Build complementary frames from ground programs, compute supported values
under pluggable branch evaluations, check consistency, enumerate models, and
extract justification explanations, cross-validated against classical
logic-programming oracles.
"""

from .core import (
    FALSE,
    TRUE,
    UNKNOWN,
    BudgetExceededError,
    Fact,
    Interpretation,
    Literal,
    Logical,
    SignMap,
    TruthValue,
    all_interpretations,
    complement,
    fact_text,
    parse_fact,
    truth_glb,
    truth_lub,
)
from .frame import (
    Frame,
    Rule,
    complementation,
    format_frame,
    is_complementary,
    parse_frame,
    selection_functions,
    superset_close,
    validate_frame,
)
from .branches import (
    BUILTINS,
    FUNCTIONAL,
    KRIPKE_KLEENE,
    STABLE,
    SUPPORTED,
    WELL_FOUNDED,
    Bounds,
    Branch,
    BranchEvaluation,
    Finite,
    Lasso,
    branch_text,
    check_consistent_evaluation,
    eval_branch,
    falsify_monotonicity,
    falsify_selectivity,
    negate_branch,
    parse_branch,
)
from .justif import (
    JustificationGraph,
    JustificationTree,
    branch_value_facts,
    has_root,
    is_locally_complete,
    justification_dot,
    justification_value,
    tree_value,
    unroll,
)
from .game import (
    GameGraph,
    Play,
    build_game_graph,
    find_optimal_pair_bruteforce,
    game_dot,
    justification_of_body_choice,
    justification_of_rule_choice,
    maximin_value,
    minimax_value,
    play,
    play_to_branch,
    solve_by_splitting,
)
from .lp import (
    Program,
    fitting_lfp,
    parse_program,
    program_to_frame,
    stable_models_total,
    supported_models,
    well_founded_model,
)
from .semantics import (
    ConsistencyReport,
    Explanation,
    JustificationSystem,
    TreeValueResult,
    check_consistency,
    enumerate_models,
    explain,
    format_models,
    parse_models,
    support_operator,
    supported_value_graph,
    supported_value_tree,
    supported_values_all,
)

__version__ = "0.1.0"
