"""Model checking of reactive LTL and CTL judgements over labelled transition
systems with concurrency, with CCS and Petri net frontends."""

from .ccs import explore_ccs, load_ccs, parse_ccs, sos_step
from .checker import Verdict, check, check_ctl, check_ltl, exists_complete_path_satisfying
from .criteria import (
    BlockSet, CompletenessCriterion, TaskSet, b_deadlock_states, cycle_complete, obligations_update,
    tasks_by_label,
)
from .gba import ltl_to_gba
from .logic import desugar, eval_ltl_finite, eval_ltl_lasso, parse_formula
from .lts import (
    TAU, Lasso, Ltsc, LtsPath, Transition, dv_translate, enumerate_lassos, load_ltsc, validate_ltsc,
)
from .oracle import oracle_check
from .petri import Multiset, PetriNet, explore_net, fire_step, load_net, validate_structural_conflict

__all__ = [
    "explore_ccs", "load_ccs", "parse_ccs", "sos_step", "Verdict", "check", "check_ctl",
    "check_ltl", "exists_complete_path_satisfying", "BlockSet", "CompletenessCriterion", "TaskSet",
    "b_deadlock_states", "cycle_complete", "obligations_update", "tasks_by_label", "ltl_to_gba",
    "desugar", "eval_ltl_finite", "eval_ltl_lasso", "parse_formula", "TAU", "Lasso", "Ltsc",
    "LtsPath", "Transition", "dv_translate", "enumerate_lassos", "load_ltsc", "validate_ltsc",
    "oracle_check", "Multiset", "PetriNet", "explore_net", "fire_step", "load_net",
    "validate_structural_conflict",
]

__version__ = "0.1.0"
