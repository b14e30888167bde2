"""Labelled transition systems with a concurrency relation, Kripke structures,
paths and lassos.

States and transitions are referred to by dense integer indices. Labels are
plain strings; the hidden action is the reserved string ``"tau"``.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import ModelFormatError

TAU = "tau"

_NAME_RE = re.compile(r"'?[A-Za-z_][A-Za-z0-9_]*\Z")


def is_visible(label: str) -> bool:
    return label != TAU


def check_action_name(name: str) -> str:
    if name == TAU or not _NAME_RE.match(name):
        raise ValueError(f"not a visible action name: {name!r}")
    return name


@dataclass(frozen=True)
class Transition:
    id: int
    source: int
    target: int
    label: str


def _pair(t: int, u: int) -> tuple[int, int]:
    return (t, u) if t <= u else (u, t)


@dataclass(frozen=True)
class Ltsc:
    """An explicit LTS together with a symmetric concurrency relation.

    ``concurrency`` holds unordered pairs normalised to ``(min, max)``. A pair
    ``(t, t)`` can be represented so that :func:`validate_ltsc` is able to
    report it, but no frontend ever produces one.
    """

    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    concurrency: frozenset = frozenset()
    initial: int = 0
    _outgoing: tuple = field(init=False, repr=False, compare=False)
    _conc_with: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        n = len(self.states)
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} out of range")
        out = [[] for _ in range(n)]
        for i, t in enumerate(self.transitions):
            if t.id != i:
                raise ValueError(f"transition at position {i} has id {t.id}")
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise ValueError(f"transition {t.id} refers to a missing state")
            out[t.source].append(i)
        pairs = frozenset(_pair(t, u) for t, u in self.concurrency)
        conc = [set() for _ in self.transitions]
        for t, u in pairs:
            if not (0 <= t < len(self.transitions) and 0 <= u < len(self.transitions)):
                raise ValueError(f"concurrency pair {(t, u)} refers to a missing transition")
            conc[t].add(u)
            conc[u].add(t)
        object.__setattr__(self, "concurrency", pairs)
        object.__setattr__(self, "_outgoing", tuple(tuple(ts) for ts in out))
        object.__setattr__(self, "_conc_with", tuple(frozenset(c) for c in conc))

    @property
    def num_states(self) -> int:
        return len(self.states)

    def outgoing(self, state: int) -> tuple[int, ...]:
        return self._outgoing[state]

    def concurrent(self, t: int, u: int) -> bool:
        return _pair(t, u) in self.concurrency

    def concurrent_with(self, t: int) -> frozenset:
        """All transitions ``u`` with ``t`` concurrent to ``u``."""
        return self._conc_with[t]

    def label(self, t: int) -> str:
        return self.transitions[t].label

    def labels(self) -> list[str]:
        """Visible labels in order of first appearance."""
        seen = {}
        for t in self.transitions:
            if is_visible(t.label):
                seen.setdefault(t.label, None)
        return list(seen)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(name) from None


@dataclass(frozen=True)
class KripkeStructure:
    """Kripke structure without the totality requirement.

    ``origin[i]`` is ``("state", s)`` or ``("transition", t)`` and refers back
    to the LTS the structure was built from.
    """

    states: tuple[str, ...]
    edges: frozenset
    labeling: tuple[frozenset, ...]
    origin: tuple[tuple[str, int], ...]

    def successors(self, i: int) -> list[int]:
        return sorted(j for (k, j) in self.edges if k == i)


def dv_translate(ltsc: Ltsc) -> KripkeStructure:
    """De Nicola-Vaandrager translation.

    LTS state ``s`` becomes Kripke state ``s``; the i-th visible transition
    becomes Kripke state ``num_states + i`` labelled with its action.
    """
    names = list(ltsc.states)
    origin = [("state", s) for s in range(ltsc.num_states)]
    labeling = [frozenset() for _ in range(ltsc.num_states)]
    edges = set()
    for t in ltsc.transitions:
        if is_visible(t.label):
            k = len(names)
            names.append(f"{ltsc.states[t.source]}--{t.label}-->{ltsc.states[t.target]}#{t.id}")
            origin.append(("transition", t.id))
            labeling.append(frozenset({t.label}))
            edges.add((t.source, k))
            edges.add((k, t.target))
        else:
            edges.add((t.source, t.target))
    return KripkeStructure(tuple(names), frozenset(edges), tuple(labeling), tuple(origin))


@dataclass(frozen=True)
class LtsPath:
    start: int
    steps: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def states(self, ltsc: Ltsc) -> list[int]:
        out = [self.start]
        for t in self.steps:
            tr = ltsc.transitions[t]
            if tr.source != out[-1]:
                raise ValueError(f"transition {t} does not leave state {out[-1]}")
            out.append(tr.target)
        return out

    def end(self, ltsc: Ltsc) -> int:
        return self.states(ltsc)[-1]


@dataclass(frozen=True)
class Lasso:
    """``prefix`` followed by ``cycle`` repeated forever.

    An empty ``cycle`` marks a finite path (only produced by
    :func:`enumerate_lassos` and by the checker for terminated runs).
    """

    prefix: LtsPath
    cycle: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cycle", tuple(self.cycle))

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    def check(self, ltsc: Ltsc) -> None:
        """Raise ``ValueError`` unless adjacency and cycle closure hold."""
        end = self.prefix.end(ltsc)
        if self.cycle:
            states = LtsPath(end, self.cycle).states(ltsc)
            if states[-1] != end:
                raise ValueError("cycle does not return to the end of the prefix")

    def cycle_states(self, ltsc: Ltsc) -> list[int]:
        return LtsPath(self.prefix.end(ltsc), self.cycle).states(ltsc)[:-1]


def path_word(ltsc: Ltsc, path: LtsPath, include_end: bool = True) -> list[frozenset]:
    """Atom sets along the DV image of ``path``: states give the empty set,
    visible transitions give the singleton of their label."""
    word = []
    empty = frozenset()
    for t in path.steps:
        word.append(empty)
        label = ltsc.transitions[t].label
        if is_visible(label):
            word.append(frozenset({label}))
    if include_end:
        word.append(empty)
    return word


def lasso_word(ltsc: Ltsc, lasso: Lasso) -> tuple[list[frozenset], list[frozenset]]:
    """Prefix and cycle words of the DV image of a lasso (cycle nonempty)."""
    prefix = path_word(ltsc, lasso.prefix, include_end=False)
    cycle = path_word(ltsc, LtsPath(lasso.prefix.end(ltsc), lasso.cycle), include_end=False)
    return prefix, cycle


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class LtscViolation:
    kind: str  # "irreflexivity" | "closure"
    transition: int
    path: tuple[int, ...] = ()


def validate_ltsc(ltsc: Ltsc, depth_bound: int = 3) -> list[LtscViolation]:
    """Check irreflexivity and the closure axiom up to ``depth_bound`` steps.

    For every transition ``t`` and every path from its source of length at
    most ``depth_bound`` made only of transitions concurrent with ``t``, the
    end state must offer a transition with the label of ``t`` that is not
    concurrent with ``t``.
    """
    if depth_bound < 0:
        raise ValueError("depth_bound must be nonnegative")
    violations = []
    for t, u in sorted(ltsc.concurrency):
        if t == u:
            violations.append(LtscViolation("irreflexivity", t))
    for tr in ltsc.transitions:
        conc = ltsc.concurrent_with(tr.id)
        stack = [(tr.source, ())]
        while stack:
            state, path = stack.pop()
            ok = any(
                ltsc.transitions[u].label == tr.label and u not in conc
                for u in ltsc.outgoing(state)
            )
            if not ok:
                violations.append(LtscViolation("closure", tr.id, path))
            if len(path) < depth_bound:
                for v in reversed(ltsc.outgoing(state)):
                    if v in conc:
                        stack.append((ltsc.transitions[v].target, path + (v,)))
    return violations


# -- lasso enumeration ------------------------------------------------------


def _is_primitive(word: Sequence[int]) -> bool:
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and tuple(word[:d]) * (n // d) == tuple(word):
            return False
    return True


def _walks_from(ltsc: Ltsc, start: int, max_len: int) -> list[list[tuple[tuple[int, ...], int]]]:
    """``result[n]`` lists (steps, end state) for every walk of length n."""
    layers = [[((), start)]]
    for _ in range(max_len):
        nxt = []
        for steps, s in layers[-1]:
            for t in ltsc.outgoing(s):
                nxt.append((steps + (t,), ltsc.transitions[t].target))
        layers.append(nxt)
    return layers


def enumerate_lassos(ltsc: Ltsc, max_prefix: int, max_cycle: int) -> Iterator[Lasso]:
    """Yield every finite path and every lasso from the initial state within
    the bounds, in order of increasing total length.

    Finite paths have an empty cycle. Lassos are produced in canonical form
    (primitive cycle, shortest prefix), so each ultimately periodic path is
    yielded once.
    """
    if max_prefix < 0 or max_cycle < 1:
        raise ValueError("bounds must satisfy max_prefix >= 0 and max_cycle >= 1")
    prefixes = _walks_from(ltsc, ltsc.initial, max_prefix)
    cycles = {}

    def cycles_at(s):
        if s not in cycles:
            by_len = defaultdict(list)
            for n, layer in enumerate(_walks_from(ltsc, s, max_cycle)):
                if n == 0:
                    continue
                for steps, end in layer:
                    if end == s and _is_primitive(steps):
                        by_len[n].append(steps)
            cycles[s] = by_len
        return cycles[s]

    for size in range(max_prefix + max_cycle + 1):
        if size <= max_prefix:
            for steps, _ in prefixes[size]:
                yield Lasso(LtsPath(ltsc.initial, steps))
        for p in range(max(0, size - max_cycle), min(size, max_prefix) + 1):
            c = size - p
            if c < 1:
                continue
            for steps, end in prefixes[p]:
                for cyc in cycles_at(end).get(c, ()):
                    if steps and steps[-1] == cyc[-1]:
                        continue
                    yield Lasso(LtsPath(ltsc.initial, steps), cyc)


# -- explicit-LTS JSON ------------------------------------------------------


def ltsc_from_dict(data: dict) -> Ltsc:
    try:
        names = [str(s) for s in data["states"]]
        index = {s: i for i, s in enumerate(names)}
        if len(index) != len(names):
            raise ModelFormatError("duplicate state names")
        initial = index[data["initial"]]
        raw = sorted(data.get("transitions", []), key=lambda r: int(r["id"]))
        ids = {int(r["id"]): k for k, r in enumerate(raw)}
        if len(ids) != len(raw):
            raise ModelFormatError("duplicate transition ids")
        transitions = []
        for k, r in enumerate(raw):
            label = str(r["label"])
            if label != TAU:
                check_action_name(label)
            transitions.append(Transition(k, index[r["from"]], index[r["to"]], label))
        pairs = set()
        for a, b in data.get("concurrency", []):
            a, b = ids[int(a)], ids[int(b)]
            if a == b:
                raise ModelFormatError(f"reflexive concurrency pair for transition {a}")
            pairs.add(_pair(a, b))
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed explicit LTS: {exc}") from exc
    return Ltsc(tuple(names), tuple(transitions), frozenset(pairs), initial)


def ltsc_to_dict(ltsc: Ltsc) -> dict:
    return {
        "states": list(ltsc.states),
        "initial": ltsc.states[ltsc.initial],
        "transitions": [
            {"id": t.id, "from": ltsc.states[t.source], "to": ltsc.states[t.target], "label": t.label}
            for t in ltsc.transitions
        ],
        "concurrency": [list(p) for p in sorted(ltsc.concurrency)],
    }


def load_ltsc(path) -> Ltsc:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc
    return ltsc_from_dict(data)


def dump_ltsc(ltsc: Ltsc, path) -> None:
    with open(path, "w") as fh:
        json.dump(ltsc_to_dict(ltsc), fh, indent=1)
        fh.write("\n")


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(ltsc: Ltsc) -> str:
    """Graphviz rendering with a box node halfway along each visible transition."""
    lines = ["digraph ltsc {", "  rankdir=LR;", '  init [shape=point];']
    for i, name in enumerate(ltsc.states):
        lines.append(f"  s{i} [shape=circle, label={_dot_quote(name)}];")
    lines.append(f"  init -> s{ltsc.initial};")
    for t in ltsc.transitions:
        if is_visible(t.label):
            lines.append(f"  t{t.id} [shape=box, label={_dot_quote(t.label)}];")
            lines.append(f"  s{t.source} -> t{t.id};")
            lines.append(f"  t{t.id} -> s{t.target};")
        else:
            lines.append(f"  s{t.source} -> s{t.target} [style=dashed, label=tau];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ltsc_from_edges(
    edges: Iterable[tuple[str, str, str]],
    concurrency: Iterable[tuple[int, int]] = (),
    initial: str | None = None,
) -> Ltsc:
    """Build an Ltsc from ``(source, label, target)`` triples; state order is
    first appearance, transition ids follow the input order."""
    names: dict[str, int] = {}
    if initial is not None:
        names[initial] = 0
    transitions = []
    for i, (src, label, dst) in enumerate(edges):
        for s in (src, dst):
            names.setdefault(s, len(names))
        transitions.append(Transition(i, names[src], names[dst], label))
    if not names:
        raise ValueError("an Ltsc needs at least one state")
    return Ltsc(tuple(names), tuple(transitions), frozenset(_pair(a, b) for a, b in concurrency), 0)
