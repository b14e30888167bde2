"""Deciding reactive LTL and CTL judgements on an Ltsc.

The Ltsc is flattened into its atom-word form: one node per state (no atoms),
one node per visible transition (its label as the only atom), and one
termination node per state where a run may stop. A termination node repeats
forever, which is how finite complete paths are represented; it carries the
atoms of its state so formulas cannot tell the difference.

An LTL judgement fails iff the product of this graph with an automaton for
the negated formula has a reachable accepting cycle whose projection is a
complete path. Under justness each product node also records the set of
unblockable transitions that were enabled at some earlier state and have not
been interfered with since.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import networkx as nx

from .criteria import (
    JUSTNESS, STRONG_FAIRNESS, TOP, WEAK_FAIRNESS, BlockSet, CompletenessCriterion,
    b_deadlock_states, cycle_complete, task_enabled, unblockable_outgoing,
)
from .gba import Gba, ltl_to_gba
from .logic import (
    AF, AG, AU, EF, EG, EU, EX, AX, And, Atom, Const, Finally, Formula, Globally, Implies, Not, Or,
    Until, conjuncts,
)
from .lts import Lasso, Ltsc, LtsPath, is_visible

_NO_OBLIGATIONS = frozenset()


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: LtsPath | Lasso | None = None
    stats: dict = field(default_factory=dict)

    @property
    def witness_kind(self) -> str | None:
        if self.counterexample is None:
            return None
        return "finite" if isinstance(self.counterexample, LtsPath) else "lasso"


class _Flat:
    """Atom-word form of an Ltsc with termination nodes.

    Node numbering: state ``s`` is ``s``; the visible transition ``t`` is
    ``n + t``; the termination node of ``s`` is ``n + m + s``.
    """

    def __init__(self, ltsc: Ltsc, cc: CompletenessCriterion, b: BlockSet):
        self.ltsc = ltsc
        self.n = n = ltsc.num_states
        self.m = m = len(ltsc.transitions)
        self.size = n + m + n
        terminal = set(range(n)) if cc.kind == TOP else b_deadlock_states(ltsc, b)
        self.terminal = terminal
        # successors as (node, transition taken or None); termination edge last
        succ: list[list[tuple[int, int | None]]] = [[] for _ in range(self.size)]
        for s in range(n):
            for t in ltsc.outgoing(s):
                tr = ltsc.transitions[t]
                succ[s].append((n + t, t) if is_visible(tr.label) else (tr.target, t))
            if s in terminal:
                succ[s].append((n + m + s, None))
                succ[n + m + s].append((n + m + s, None))
        for tr in ltsc.transitions:
            if is_visible(tr.label):
                succ[n + tr.id].append((tr.target, None))
        self.succ = succ

    def kind(self, k: int) -> str:
        if k < self.n:
            return "state"
        if k < self.n + self.m:
            return "transition"
        return "end"

    def state_of(self, k: int) -> int | None:
        """LTS state a node stands for (termination nodes stand for their state)."""
        if k < self.n:
            return k
        if k >= self.n + self.m:
            return k - self.n - self.m
        return None

    def is_end_edge(self, k: int, k2: int) -> bool:
        return k2 >= self.n + self.m

    def dv_nodes(self) -> range:
        """State and transition nodes (termination nodes excluded)."""
        return range(self.n + self.m)

    def dv_atoms(self, k: int) -> frozenset:
        if self.n <= k < self.n + self.m:
            return frozenset({self.ltsc.transitions[k - self.n].label})
        return frozenset()


class _Product:
    """Reachable part of flat graph x automaton (x obligation sets under justness)."""

    def __init__(self, flat: _Flat, gba: Gba, cc: CompletenessCriterion, b: BlockSet,
                 starts: Iterable[int], atoms_of: Callable[[int], frozenset]):
        self.flat, self.gba, self.cc, self.b = flat, gba, cc, b
        ltsc = flat.ltsc
        self.track = cc.kind == JUSTNESS
        self.fresh = [unblockable_outgoing(ltsc, b, s) for s in range(flat.n)]
        atoms = [atoms_of(k) for k in range(flat.size)]
        self.keys: list[tuple[int, int, frozenset]] = []
        self.index: dict[tuple, int] = {}
        self.succ: list[list[tuple[int, int | None]]] = []
        self.initial: list[int] = []
        queue = deque()

        def visit(key):
            i = self.index.get(key)
            if i is None:
                i = len(self.keys)
                self.index[key] = i
                self.keys.append(key)
                self.succ.append([])
                queue.append(i)
            return i

        for k in starts:
            for q in sorted(gba.initial):
                if gba.letter_ok(q, atoms[k]):
                    self.initial.append(visit((k, q, _NO_OBLIGATIONS)))
        edges = 0
        while queue:
            i = queue.popleft()
            k, q, o = self.keys[i]
            out = self.succ[i]
            for k2, tag in flat.succ[k]:
                if self.track:
                    if k < flat.n:
                        pending = o | self.fresh[k]
                        if tag is None:
                            # stopping is complete only with nothing pending
                            if pending:
                                continue
                            o2 = _NO_OBLIGATIONS
                        else:
                            o2 = pending & ltsc.concurrent_with(tag)
                    else:
                        o2 = o
                else:
                    o2 = _NO_OBLIGATIONS
                letter = atoms[k2]
                for q2 in gba.succ[q]:
                    if gba.letter_ok(q2, letter):
                        out.append((visit((k2, q2, o2)), tag))
                        edges += 1
        self.edges = edges
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.keys)))
        for i, out in enumerate(self.succ):
            graph.add_edges_from((i, j) for j, _ in out)
        self.graph = graph

    # -- fair accepting components ---------------------------------------

    def _taken(self, comp: set) -> set:
        return {tag for i in comp for j, tag in self.succ[i] if tag is not None and j in comp}

    def _states(self, comp: set) -> set:
        out = set()
        for i in comp:
            s = self.flat.state_of(self.keys[i][0])
            if s is not None:
                out.add(s)
        return out

    def _gba_ok(self, comp: set) -> bool:
        qs = {self.keys[i][1] for i in comp}
        return all(qs & acc for acc in self.gba.acceptance)

    def accepting_components(self) -> list[set]:
        """Node sets of strongly connected subgraphs that contain an
        accepting cycle whose projection is a complete path."""
        found = []
        self._search(set(self.graph.nodes), found)
        return found

    def _search(self, nodes: set, found: list) -> None:
        sub = self.graph.subgraph(nodes)
        for comp in nx.strongly_connected_components(sub):
            if len(comp) == 1:
                (v,) = comp
                if not sub.has_edge(v, v):
                    continue
            if not self._gba_ok(comp):
                continue
            kind = self.cc.kind
            if kind in (JUSTNESS, WEAK_FAIRNESS):
                entry = self.keys[next(iter(comp))][2]
                if cycle_complete(self.flat.ltsc, self.cc, self.b, entry, self._states(comp), self._taken(comp)):
                    found.append(set(comp))
            elif kind == STRONG_FAIRNESS:
                taken = self._taken(comp)
                states = self._states(comp)
                bad = [task for _, task in self.cc.tasks
                       if not (task & taken) and any(task_enabled(self.flat.ltsc, self.b, s, task) for s in states)]
                if not bad:
                    found.append(set(comp))
                    continue
                drop = {s for s in states if any(task_enabled(self.flat.ltsc, self.b, s, t) for t in bad)}
                rest = {i for i in comp if self.flat.state_of(self.keys[i][0]) not in drop}
                if rest:
                    self._search(rest, found)
            else:
                found.append(set(comp))

    # -- witnesses ---------------------------------------------------------

    def _bfs_path(self, sources: Sequence[int], goal: Callable[[int], bool], within: set | None = None):
        """Shortest list of (node, tag-of-edge-into-node) from a source to a
        goal node; the first entry has tag None."""
        parent = {}
        queue = deque()
        for s in sources:
            if s not in parent and (within is None or s in within):
                parent[s] = None
                queue.append(s)
        while queue:
            i = queue.popleft()
            if goal(i):
                path = []
                while i is not None:
                    prev = parent[i]
                    path.append((i, prev[1] if prev else None))
                    i = prev[0] if prev else None
                return path[::-1]
            for j, tag in self.succ[i]:
                if j not in parent and (within is None or j in within):
                    parent[j] = (i, tag)
                    queue.append(j)
        return None

    def _cycle(self, anchor: int, comp: set) -> list[tuple[int, int | None]]:
        """Cycle from ``anchor`` inside ``comp`` that meets every acceptance
        set and every completeness requirement; list of (node, tag) after
        the anchor, ending with the anchor."""
        reqs: list[Callable] = []  # each takes (prev, node, tag) -> bool
        for acc in self.gba.acceptance:
            reqs.append(lambda p, i, tag, acc=acc: self.keys[i][1] in acc)
        kind = self.cc.kind
        if kind == JUSTNESS:
            for t in sorted(set().union(*(self.keys[i][2] for i in comp))):
                reqs.append(lambda p, i, tag, t=t: t not in self.keys[i][2])
        elif kind in (WEAK_FAIRNESS, STRONG_FAIRNESS):
            taken = self._taken(comp)
            ltsc, b = self.flat.ltsc, self.b
            for _, task in self.cc.tasks:
                if task & taken:
                    reqs.append(lambda p, i, tag, task=task: tag in task)
                elif kind == WEAK_FAIRNESS:
                    reqs.append(lambda p, i, tag, task=task: (
                        self.flat.state_of(self.keys[i][0]) is not None
                        and not task_enabled(ltsc, b, self.flat.state_of(self.keys[i][0]), task)))
        reqs = [r for r in reqs if not r(None, anchor, None)]
        walk: list[tuple[int, int | None]] = []
        current = anchor
        while reqs:
            # shortest extension that satisfies at least one open requirement
            best = self._search_edge(current, comp, reqs)
            walk.extend(best)
            for prev, (i, tag) in zip([current] + [x for x, _ in best[:-1]], best):
                reqs = [r for r in reqs if not r(prev, i, tag)]
            current = best[-1][0]
        back = self._search_edge(current, comp, [lambda p, i, tag: i == anchor])
        walk.extend(back)
        return walk

    def _search_edge(self, start: int, comp: set, reqs: list) -> list[tuple[int, int | None]]:
        """Shortest nonempty walk inside ``comp`` whose last step satisfies a requirement."""
        parent: dict = {}
        queue = deque()
        for j, tag in self.succ[start]:
            if j not in comp:
                continue
            if any(r(start, j, tag) for r in reqs):
                return [(j, tag)]
            if j not in parent:
                parent[j] = (start, tag)
                queue.append(j)
        while queue:
            i = queue.popleft()
            for j, tag in self.succ[i]:
                if j not in comp:
                    continue
                if any(r(i, j, tag) for r in reqs):
                    path = [(j, tag)]
                    node = i
                    while node != start:
                        prev, t2 = parent[node]
                        path.append((node, t2))
                        node = prev
                    return path[::-1]
                if j not in parent and j != start:
                    parent[j] = (i, tag)
                    queue.append(j)
        raise AssertionError("requirement unreachable inside a strongly connected component")

    def witness(self, comps: list[set]) -> LtsPath | Lasso:
        flat = self.flat
        owner = {}
        for c, comp in enumerate(comps):
            for i in comp:
                owner[i] = c

        def goal(i):
            if i not in owner:
                return False
            kind = flat.kind(self.keys[i][0])
            return kind == "state" or kind == "end"

        path = self._bfs_path(self.initial, goal)
        assert path is not None
        prefix_steps = tuple(tag for _, tag in path if tag is not None)
        start = flat.state_of(self.keys[path[0][0]][0])
        anchor = path[-1][0]
        if flat.kind(self.keys[anchor][0]) == "end":
            return LtsPath(start, prefix_steps)
        walk = self._cycle(anchor, comps[owner[anchor]])
        cycle = tuple(tag for _, tag in walk if tag is not None)
        return canonical_lasso(flat.ltsc, Lasso(LtsPath(start, prefix_steps), cycle))


def canonical_lasso(ltsc: Ltsc, lasso: Lasso) -> Lasso:
    """Same infinite path with a primitive cycle and the shortest prefix."""
    cycle = list(lasso.cycle)
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            cycle = cycle[:d]
            break
    steps = list(lasso.prefix.steps)
    while steps and steps[-1] == cycle[-1]:
        steps.pop()
        cycle = [cycle[-1]] + cycle[:-1]
    return Lasso(LtsPath(lasso.prefix.start, tuple(steps)), tuple(cycle))


def _as_blockset(b) -> BlockSet:
    return b if isinstance(b, BlockSet) else BlockSet(b)


def _prepare(ltsc: Ltsc, cc: CompletenessCriterion, b) -> BlockSet:
    b = _as_blockset(b)
    cc.check(ltsc)
    return b


def check_ltl(ltsc: Ltsc, phi: Formula, cc: CompletenessCriterion, b: Iterable[str] = ()) -> Verdict:
    """Does every complete path from the initial state satisfy ``phi``?

    A top-level conjunction is split and its conjuncts are checked one at a
    time; the first failing conjunct supplies the counterexample.
    """
    b = _prepare(ltsc, cc, b)
    flat = _Flat(ltsc, cc, b)
    stats = {"product_states": 0, "explored": 0}
    for part in conjuncts(phi):
        prod = _Product(flat, ltl_to_gba(Not(part)), cc, b, [ltsc.initial], flat.dv_atoms)
        stats["product_states"] += len(prod.keys)
        stats["explored"] += prod.edges
        comps = prod.accepting_components()
        if comps:
            stats["failing_conjunct"] = str(part)
            return Verdict(False, prod.witness(comps), stats)
    return Verdict(True, None, stats)


# -- CTL -------------------------------------------------------------------------


def _existential_nodes(flat: _Flat, goal: Formula, cc, b, starts, atoms_of) -> set[int]:
    """Flat nodes from which some complete path satisfies the LTL ``goal``."""
    prod = _Product(flat, ltl_to_gba(goal), cc, b, starts, atoms_of)
    comps = prod.accepting_components()
    good = set()
    if comps:
        seeds = set().union(*comps)
        rev = prod.graph.reverse(copy=False)
        good = set(seeds)
        stack = list(seeds)
        while stack:
            i = stack.pop()
            for j in rev.successors(i):
                if j not in good:
                    good.add(j)
                    stack.append(j)
    out = set()
    for i in prod.initial:
        if i in good:
            out.add(prod.keys[i][0])
    return out


def exists_complete_path_satisfying(
    ltsc: Ltsc, start: int, goal: Formula, cc: CompletenessCriterion, b: Iterable[str] = (),
    marking: dict | None = None,
) -> bool:
    """Is there a complete path from LTS state ``start`` satisfying ``goal``?

    ``goal`` is an LTL formula over the atoms given by ``marking`` (LTS state
    -> atom set; visible transitions are labelled with their action when no
    marking is given).
    """
    b = _prepare(ltsc, cc, b)
    flat = _Flat(ltsc, cc, b)
    if marking is None:
        atoms_of = lambda k: flat.dv_atoms(flat.state_of(k) if k >= flat.n + flat.m else k)
    else:
        def atoms_of(k):
            s = flat.state_of(k)
            return frozenset(marking.get(s, ())) if s is not None else frozenset()
    return start in _existential_nodes(flat, goal, cc, b, [start], atoms_of)


def _ctl_label(phi: Formula, flat: _Flat, cc, b, cache: dict) -> frozenset:
    """Flat (state and transition) nodes satisfying the CTL formula ``phi``."""
    if phi in cache:
        return cache[phi]
    nodes = flat.dv_nodes()
    everything = frozenset(nodes)
    if isinstance(phi, Const):
        out = everything if phi.value else frozenset()
    elif isinstance(phi, Atom):
        out = frozenset(k for k in nodes if phi.name in flat.dv_atoms(k))
    elif isinstance(phi, Not):
        out = everything - _ctl_label(phi.arg, flat, cc, b, cache)
    elif isinstance(phi, And):
        out = _ctl_label(phi.left, flat, cc, b, cache) & _ctl_label(phi.right, flat, cc, b, cache)
    elif isinstance(phi, Or):
        out = _ctl_label(phi.left, flat, cc, b, cache) | _ctl_label(phi.right, flat, cc, b, cache)
    elif isinstance(phi, Implies):
        out = (everything - _ctl_label(phi.left, flat, cc, b, cache)) | _ctl_label(phi.right, flat, cc, b, cache)
    elif isinstance(phi, (EX, AX)):
        sat = _ctl_label(phi.arg, flat, cc, b, cache)
        out = set()
        for k in nodes:
            nxt = [k2 for k2, _ in flat.succ[k] if not flat.is_end_edge(k, k2)]
            if isinstance(phi, EX) and any(k2 in sat for k2 in nxt):
                out.add(k)
            if isinstance(phi, AX) and all(k2 in sat for k2 in nxt):
                out.add(k)
        out = frozenset(out)
    elif isinstance(phi, (EF, EG, EU)):
        p, q = Atom("#p"), Atom("#q")
        if isinstance(phi, EF):
            marks = {"#q": _ctl_label(phi.arg, flat, cc, b, cache)}
            goal = Finally(q)
        elif isinstance(phi, EG):
            marks = {"#p": _ctl_label(phi.arg, flat, cc, b, cache)}
            goal = Globally(p)
        else:
            marks = {"#p": _ctl_label(phi.left, flat, cc, b, cache),
                     "#q": _ctl_label(phi.right, flat, cc, b, cache)}
            goal = Until(p, q)

        def atoms_of(k):
            if k >= flat.n + flat.m:
                k = flat.state_of(k)
            return frozenset(name for name, sat in marks.items() if k in sat)

        out = frozenset(_existential_nodes(flat, goal, cc, b, list(nodes), atoms_of))
    elif isinstance(phi, AF):
        out = everything - _ctl_label(EG(Not(phi.arg)), flat, cc, b, cache)
    elif isinstance(phi, AG):
        out = everything - _ctl_label(EF(Not(phi.arg)), flat, cc, b, cache)
    elif isinstance(phi, AU):
        left, right = phi.left, phi.right
        bad = Or(EU(Not(right), And(Not(left), Not(right))), EG(Not(right)))
        out = everything - _ctl_label(bad, flat, cc, b, cache)
    else:
        raise TypeError(f"not a CTL formula: {phi!r}")
    cache[phi] = out
    return out


def check_ctl(ltsc: Ltsc, phi: Formula, cc: CompletenessCriterion, b: Iterable[str] = ()) -> Verdict:
    """Label the flattened structure bottom-up and read off the initial state.

    Path quantifiers range over complete paths; EX and AX use the transition
    structure directly.
    """
    b = _prepare(ltsc, cc, b)
    flat = _Flat(ltsc, cc, b)
    cache: dict = {}
    sat = _ctl_label(phi, flat, cc, b, cache)
    return Verdict(ltsc.initial in sat, None, {"labelled_subformulas": len(cache)})


def check(ltsc: Ltsc, phi: Formula, cc: CompletenessCriterion, b: Iterable[str] = (), logic: str = "ltl") -> Verdict:
    if logic == "ltl":
        return check_ltl(ltsc, phi, cc, b)
    if logic == "ctl":
        return check_ctl(ltsc, phi, cc, b)
    raise ValueError(f"unknown logic {logic!r}")
