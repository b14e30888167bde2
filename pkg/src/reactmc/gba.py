"""Tableau translation of next-free LTL into generalized Buchi automata.

Nodes are state-labelled: a node carries the literals that the current letter
must satisfy, so an edge into a node is guarded by that node's literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .logic import (
    And, Atom, Const, Finally, Formula, Globally, Implies, Not, Or, Until, WeakUntil, desugar,
)

# Negation normal form, as hashable tuples:
#   ("true",) ("false",) ("ap", p) ("nap", p) ("and", a, b) ("or", a, b)
#   ("U", a, b) ("R", a, b)
_T = ("true",)
_F = ("false",)


def _mk_and(a, b):
    if a == _F or b == _F:
        return _F
    if a == _T:
        return b
    if b == _T:
        return a
    return ("and", a, b)


def _mk_or(a, b):
    if a == _T or b == _T:
        return _T
    if a == _F:
        return b
    if b == _F:
        return a
    return ("or", a, b)


def _mk_until(a, b):
    if b in (_T, _F):
        return b
    return ("U", a, b)


def _mk_release(a, b):
    if b in (_T, _F):
        return b
    return ("R", a, b)


def _nnf(phi: Formula, positive: bool = True):
    if isinstance(phi, Const):
        return _T if phi.value == positive else _F
    if isinstance(phi, Atom):
        return ("ap", phi.name) if positive else ("nap", phi.name)
    if isinstance(phi, Not):
        return _nnf(phi.arg, not positive)
    if isinstance(phi, And):
        a, b = _nnf(phi.left, positive), _nnf(phi.right, positive)
        return _mk_and(a, b) if positive else _mk_or(a, b)
    if isinstance(phi, Or):
        a, b = _nnf(phi.left, positive), _nnf(phi.right, positive)
        return _mk_or(a, b) if positive else _mk_and(a, b)
    if isinstance(phi, Finally):
        body = _nnf(phi.arg, positive)
        return _mk_until(_T, body) if positive else _mk_release(_F, body)
    if isinstance(phi, Globally):
        body = _nnf(phi.arg, positive)
        return _mk_release(_F, body) if positive else _mk_until(_T, body)
    if isinstance(phi, Until):
        a, b = _nnf(phi.left, positive), _nnf(phi.right, positive)
        return _mk_until(a, b) if positive else _mk_release(a, b)
    if isinstance(phi, (Implies, WeakUntil)):
        return _nnf(desugar(phi), positive)
    raise TypeError(f"not an LTL formula: {phi!r}")


def _negate_literal(lit):
    return ("nap", lit[1]) if lit[0] == "ap" else ("ap", lit[1])


def _until_subformulas(f, acc):
    if f[0] in ("and", "or", "U", "R"):
        if f[0] == "U":
            acc.add(f)
        _until_subformulas(f[1], acc)
        _until_subformulas(f[2], acc)
    return acc


@dataclass(frozen=True)
class Gba:
    """Generalized Buchi automaton with state-based labels and acceptance.

    ``positive[n]``/``negative[n]`` are the atoms that must be present/absent
    in a letter read on entering node ``n``. A run accepts when it visits every
    set in ``acceptance`` infinitely often.
    """

    positive: tuple[frozenset, ...]
    negative: tuple[frozenset, ...]
    initial: frozenset
    succ: tuple[tuple[int, ...], ...]
    acceptance: tuple[frozenset, ...]

    @property
    def num_nodes(self) -> int:
        return len(self.positive)

    def letter_ok(self, node: int, letter) -> bool:
        return self.positive[node] <= letter and not (self.negative[node] & letter)

    def accepts_lasso(self, prefix: Sequence[Iterable[str]], cycle: Sequence[Iterable[str]]) -> bool:
        """Does the automaton accept ``prefix . cycle^omega``?"""
        if not cycle:
            raise ValueError("the cycle of a lasso is nonempty")
        word = [frozenset(x) for x in prefix] + [frozenset(x) for x in cycle]
        start, n = len(prefix), len(word)

        def nxt(i):
            return i + 1 if i + 1 < n else start

        graph = nx.DiGraph()
        todo = [(0, q) for q in sorted(self.initial) if self.letter_ok(q, word[0])]
        seen = set(todo)
        graph.add_nodes_from(todo)
        while todo:
            i, q = todo.pop()
            j = nxt(i)
            for r in self.succ[q]:
                if self.letter_ok(r, word[j]):
                    graph.add_edge((i, q), (j, r))
                    if (j, r) not in seen:
                        seen.add((j, r))
                        todo.append((j, r))
        for comp in nx.strongly_connected_components(graph):
            if len(comp) == 1:
                (v,) = comp
                if not graph.has_edge(v, v):
                    continue
            nodes = {q for _, q in comp}
            if all(nodes & acc for acc in self.acceptance):
                return True
        return False


def ltl_to_gba(phi: Formula) -> Gba:
    """Translate ``phi`` into a :class:`Gba` accepting exactly its models.

    Classic on-the-fly tableau expansion; one acceptance set per
    until-subformula of the negation normal form.
    """
    root = _nnf(desugar(phi))
    init = -1
    keys: dict[tuple, int] = {}
    incoming: list[set] = []
    olds: list[frozenset] = []
    # work items: (incoming ids, new, old, next)
    work = [({init}, {root}, set(), set())]
    while work:
        inc, new, old, nxt = work.pop()
        if not new:
            key = (frozenset(old), frozenset(nxt))
            if key in keys:
                incoming[keys[key]] |= inc
                continue
            node = len(olds)
            keys[key] = node
            incoming.append(set(inc))
            olds.append(frozenset(old))
            work.append(({node}, set(nxt), set(), set()))
            continue
        eta = new.pop()
        if eta in old:
            work.append((inc, new, old, nxt))
            continue
        kind = eta[0]
        if kind == "true":
            work.append((inc, new, old, nxt))
        elif kind == "false":
            continue
        elif kind in ("ap", "nap"):
            if _negate_literal(eta) in old:
                continue
            work.append((inc, new, old | {eta}, nxt))
        elif kind == "and":
            work.append((inc, new | ({eta[1], eta[2]} - old), old | {eta}, nxt))
        elif kind == "or":
            work.append((inc, new | ({eta[1]} - old), old | {eta}, set(nxt)))
            work.append((set(inc), new | ({eta[2]} - old), old | {eta}, set(nxt)))
        elif kind == "U":
            work.append((inc, new | ({eta[1]} - old), old | {eta}, nxt | {eta}))
            work.append((set(inc), new | ({eta[2]} - old), old | {eta}, set(nxt)))
        elif kind == "R":
            work.append((inc, new | ({eta[2]} - old), old | {eta}, nxt | {eta}))
            work.append((set(inc), new | ({eta[1], eta[2]} - old), old | {eta}, set(nxt)))
        else:
            raise AssertionError(kind)

    count = len(olds)
    succ = [[] for _ in range(count)]
    initial = set()
    for m in range(count):
        for src in incoming[m]:
            if src == init:
                initial.add(m)
            else:
                succ[src].append(m)
    positive = tuple(frozenset(f[1] for f in o if f[0] == "ap") for o in olds)
    negative = tuple(frozenset(f[1] for f in o if f[0] == "nap") for o in olds)
    acceptance = []
    for u in sorted(_until_subformulas(root, set()), key=repr):
        acceptance.append(frozenset(n for n in range(count) if u not in olds[n] or u[2] in olds[n]))
    return Gba(positive, negative, frozenset(initial), tuple(tuple(sorted(s)) for s in succ),
               tuple(acceptance))
