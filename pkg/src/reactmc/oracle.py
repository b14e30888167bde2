"""Bounded brute-force oracle.

Enumerates every finite path and every lasso within the bounds, decides
completeness by applying the path definitions of justness and fairness
literally to each position, and evaluates the formula with the direct
semantics. Shares nothing with the checker beyond the data types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .criteria import JUSTNESS, STRONG_FAIRNESS, TOP, WEAK_FAIRNESS, CompletenessCriterion
from .logic import Formula, eval_ltl_finite, eval_ltl_lasso
from .lts import Lasso, Ltsc, LtsPath, enumerate_lassos, lasso_word, path_word


@dataclass(frozen=True)
class OracleResult:
    holds: bool  # no violation within the bounds
    witness: LtsPath | Lasso | None
    examined: int


def _unblocked(ltsc: Ltsc, b, state: int) -> list[int]:
    return [t for t in ltsc.outgoing(state) if ltsc.transitions[t].label not in b]


def _enabled(ltsc: Ltsc, b, state: int, task) -> bool:
    return any(t in task for t in _unblocked(ltsc, b, state))


def finite_path_complete(ltsc: Ltsc, path: LtsPath, cc: CompletenessCriterion, b) -> bool:
    if cc.kind == TOP:
        return True
    states = path.states(ltsc)
    if _unblocked(ltsc, b, states[-1]):
        return False
    steps = path.steps
    if cc.kind == JUSTNESS:
        for i, s in enumerate(states):
            rest = steps[i:]
            for t in _unblocked(ltsc, b, s):
                if not any(not ltsc.concurrent(t, u) for u in rest):
                    return False
    if cc.kind in (WEAK_FAIRNESS, STRONG_FAIRNESS):
        for i in range(len(states)):
            for _, task in cc.tasks:
                enabled = [_enabled(ltsc, b, s, task) for s in states[i:]]
                # a finite suffix enables a task relentlessly iff it does so at its last state
                trigger = all(enabled) if cc.kind == WEAK_FAIRNESS else enabled[-1]
                if trigger and not any(t in task for t in steps[i:]):
                    return False
    return True


def lasso_complete(ltsc: Ltsc, lasso: Lasso, cc: CompletenessCriterion, b) -> bool:
    if cc.kind not in (JUSTNESS, WEAK_FAIRNESS, STRONG_FAIRNESS):
        return True
    pre_states = lasso.prefix.states(ltsc)[:-1]
    cyc_states = lasso.cycle_states(ltsc)
    steps = list(lasso.prefix.steps)
    cycle = list(lasso.cycle)
    # positions of one unfolding: prefix positions, then cycle positions
    positions = [(s, steps[i:] + cycle, pre_states[i:] + cyc_states) for i, s in enumerate(pre_states)]
    positions += [(s, cycle, cyc_states) for s in cyc_states]
    for s, later, later_states in positions:
        if cc.kind == JUSTNESS:
            for t in _unblocked(ltsc, b, s):
                if not any(not ltsc.concurrent(t, u) for u in later):
                    return False
        else:
            for _, task in cc.tasks:
                if any(t in task for t in later):
                    continue
                if cc.kind == WEAK_FAIRNESS:
                    if all(_enabled(ltsc, b, x, task) for x in later_states):
                        return False
                elif any(_enabled(ltsc, b, x, task) for x in cyc_states):
                    return False
    return True


def is_complete(ltsc: Ltsc, witness: LtsPath | Lasso, cc: CompletenessCriterion, b) -> bool:
    if isinstance(witness, LtsPath):
        return finite_path_complete(ltsc, witness, cc, b)
    if witness.is_finite:
        return finite_path_complete(ltsc, witness.prefix, cc, b)
    return lasso_complete(ltsc, witness, cc, b)


def _word(ltsc: Ltsc, witness: LtsPath | Lasso):
    if isinstance(witness, LtsPath):
        return tuple(path_word(ltsc, witness)), None
    prefix, cycle = lasso_word(ltsc, witness)
    return tuple(prefix), tuple(cycle)


def _eval_word(word, phi: Formula) -> bool:
    prefix, cycle = word
    if cycle is None:
        return eval_ltl_finite(prefix, phi)
    return eval_ltl_lasso(prefix, cycle, phi)


def satisfies(ltsc: Ltsc, witness: LtsPath | Lasso, phi: Formula) -> bool:
    if isinstance(witness, Lasso) and witness.is_finite:
        witness = witness.prefix
    return _eval_word(_word(ltsc, witness), phi)


def _walk_counts(ltsc: Ltsc, start: int, length: int) -> int:
    layer = [0] * ltsc.num_states
    layer[start] = 1
    total = 1
    for _ in range(length):
        nxt = [0] * ltsc.num_states
        for t in ltsc.transitions:
            nxt[t.target] += layer[t.source]
        layer = nxt
        total += sum(layer)
    return total


def enumeration_cost(ltsc: Ltsc, bound: int) -> int:
    """Upper estimate of the number of candidate lassos with both bounds ``bound``."""
    prefixes = _walk_counts(ltsc, ltsc.initial, bound)
    cycles = max(_walk_counts(ltsc, s, bound) for s in range(ltsc.num_states))
    return prefixes * cycles


def fitting_bound(ltsc: Ltsc, bound: int, budget: int = 200_000) -> int:
    """Largest ``k <= bound`` whose enumeration cost stays within ``budget``."""
    k = bound
    while k > 1 and enumeration_cost(ltsc, k) > budget:
        k -= 1
    return k


def oracle_check(
    ltsc: Ltsc, phi: Formula, cc: CompletenessCriterion, b: Iterable[str] = (),
    prefix_bound: int = 4, cycle_bound: int = 4,
) -> OracleResult:
    """First complete path within the bounds that violates ``phi``, if any."""
    b = frozenset(b)
    examined = 0
    verdict_cache: dict = {}
    for lasso in enumerate_lassos(ltsc, prefix_bound, cycle_bound):
        examined += 1
        witness = lasso.prefix if lasso.is_finite else lasso
        if not is_complete(ltsc, witness, cc, b):
            continue
        word = _word(ltsc, witness)
        if word not in verdict_cache:
            verdict_cache[word] = _eval_word(word, phi)
        if not verdict_cache[word]:
            return OracleResult(False, witness, examined)
    return OracleResult(True, None, examined)


def oracle_check_many(
    ltsc: Ltsc, phi: Formula, criteria: Iterable[CompletenessCriterion], b: Iterable[str] = (),
    prefix_bound: int = 4, cycle_bound: int = 4,
) -> dict:
    """Run the oracle for several criteria over one enumeration; the formula
    is evaluated once per path."""
    b = frozenset(b)
    pending = {cc: None for cc in criteria}
    verdict_cache: dict = {}
    for lasso in enumerate_lassos(ltsc, prefix_bound, cycle_bound):
        open_cc = [cc for cc, w in pending.items() if w is None]
        if not open_cc:
            break
        witness = lasso.prefix if lasso.is_finite else lasso
        word = _word(ltsc, witness)
        if word not in verdict_cache:
            verdict_cache[word] = _eval_word(word, phi)
        if verdict_cache[word]:
            continue
        for cc in open_cc:
            if is_complete(ltsc, witness, cc, b):
                pending[cc] = witness
    return {cc: OracleResult(w is None, w, 0) for cc, w in pending.items()}
