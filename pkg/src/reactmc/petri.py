"""Labelled place/transition nets: multisets, the firing rule, the
structural-conflict check and exploration into an Ltsc.

Net JSON::

    {"places": ["idle", "paid"], "initial": {"idle": 1},
     "transitions": [{"name": "tc", "label": "c", "pre": {"idle": 1}, "post": {"paid": 1}}]}
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ModelFormatError, NotEnabled, NotStructuralConflictNet, StateSpaceExceeded
from .lts import TAU, Ltsc, Transition, check_action_name

DEFAULT_MAX_STATES = 100_000


class Multiset:
    """Immutable finite multiset; zero multiplicities are never stored."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Mapping | Iterable = ()):
        counts = Counter()
        if isinstance(items, Mapping):
            for k, v in items.items():
                if not isinstance(v, int) or v < 0:
                    raise ValueError(f"multiplicity of {k!r} must be a nonnegative integer")
                counts[k] += v
        else:
            counts.update(items)
        self._items = tuple(sorted((k, v) for k, v in counts.items() if v > 0))
        self._hash = hash(self._items)

    def __getitem__(self, x) -> int:
        for k, v in self._items:
            if k == x:
                return v
        return 0

    def __iter__(self):
        return (k for k, _ in self._items)

    def items(self):
        return self._items

    def support(self) -> frozenset:
        return frozenset(k for k, _ in self._items)

    def __len__(self):
        """Total number of elements, counted with multiplicity."""
        return sum(v for _, v in self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        return isinstance(other, Multiset) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __add__(self, other: "Multiset") -> "Multiset":
        c = Counter(dict(self._items))
        c.update(dict(other._items))
        return Multiset(dict(c))

    def __sub__(self, other: "Multiset") -> "Multiset":
        """Monus: multiplicities never drop below zero."""
        theirs = dict(other._items)
        return Multiset({k: max(v - theirs.get(k, 0), 0) for k, v in self._items})

    def scale(self, k: int) -> "Multiset":
        if k < 0:
            raise ValueError("scalar must be nonnegative")
        return Multiset({x: k * v for x, v in self._items})

    def __rmul__(self, k: int) -> "Multiset":
        return self.scale(k)

    def __le__(self, other: "Multiset") -> bool:
        theirs = dict(other._items)
        return all(v <= theirs.get(k, 0) for k, v in self._items)

    def __repr__(self):
        return "{" + ", ".join(f"{k}:{v}" if v != 1 else str(k) for k, v in self._items) + "}"


@dataclass(frozen=True)
class NetTransition:
    name: str
    label: str
    pre: Multiset
    post: Multiset


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[NetTransition, ...]
    initial: Multiset

    def __post_init__(self):
        places = set(self.places)
        if len(places) != len(self.places):
            raise ModelFormatError("duplicate place names")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise ModelFormatError("duplicate transition names")
        if places & set(names):
            raise ModelFormatError("places and transitions must have distinct names")
        for t in self.transitions:
            if not t.pre:
                raise ModelFormatError(f"transition {t.name!r} has an empty preset")
            for p in t.pre.support() | t.post.support():
                if p not in places:
                    raise ModelFormatError(f"transition {t.name!r} refers to unknown place {p!r}")
        for p in self.initial.support():
            if p not in places:
                raise ModelFormatError(f"initial marking refers to unknown place {p!r}")

    def transition(self, name: str) -> NetTransition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(name)


def step_preset(net: PetriNet, g: Multiset) -> Multiset:
    out = Multiset()
    for name, k in g.items():
        out = out + k * net.transition(name).pre
    return out


def step_postset(net: PetriNet, g: Multiset) -> Multiset:
    out = Multiset()
    for name, k in g.items():
        out = out + k * net.transition(name).post
    return out


def fire_step(net: PetriNet, m: Multiset, g: Multiset) -> Multiset:
    """Fire the multiset ``g`` of transitions at marking ``m``."""
    if not g:
        raise ValueError("a step is a nonempty multiset of transitions")
    pre = step_preset(net, g)
    if not pre <= m:
        raise NotEnabled(f"step {g!r} needs {pre!r} but the marking is {m!r}")
    return (m - pre) + step_postset(net, g)


@dataclass(frozen=True)
class ConflictViolation:
    t: str
    u: str
    marking: Multiset


def _conflicts_at(net: PetriNet, m: Multiset) -> list[ConflictViolation]:
    out = []
    ts = net.transitions
    for i, t in enumerate(ts):
        for u in ts[i:]:
            if t.pre.support() & u.pre.support() and t.pre + u.pre <= m:
                out.append(ConflictViolation(t.name, u.name, m))
    return out


def _successors(net: PetriNet, m: Multiset):
    for t in net.transitions:
        if t.pre <= m:
            yield t, (m - t.pre) + t.post


def _reachable(net: PetriNet, max_states: int):
    """Yield (marking, [(transition, target)]) in breadth-first order."""
    seen = {net.initial}
    queue = deque([net.initial])
    while queue:
        m = queue.popleft()
        succ = list(_successors(net, m))
        for _, target in succ:
            if target not in seen:
                if len(seen) >= max_states:
                    raise StateSpaceExceeded(max_states)
                seen.add(target)
                queue.append(target)
        yield m, succ


def validate_structural_conflict(net: PetriNet, max_states: int = DEFAULT_MAX_STATES) -> list[ConflictViolation]:
    """Every reachable marking enabling a two-transition step (``t = u``
    included) whose presets overlap; empty means a structural conflict net."""
    out = []
    for m, _ in _reachable(net, max_states):
        out.extend(_conflicts_at(net, m))
    return out


def explore_net(net: PetriNet, max_states: int = DEFAULT_MAX_STATES) -> Ltsc:
    """Reachability graph as an Ltsc; transitions are concurrent iff their
    net transitions have disjoint presets."""
    index = {}
    markings = []
    edges = []
    violations = []
    for m, succ in _reachable(net, max_states):
        index[m] = len(markings)
        markings.append(m)
        violations.extend(_conflicts_at(net, m))
        edges.extend((m, t, target) for t, target in succ)
    if violations:
        raise NotStructuralConflictNet(violations)
    transitions = tuple(
        Transition(i, index[m], index[target], t.label) for i, (m, t, target) in enumerate(edges)
    )
    pre_places = [t.pre.support() for _, t, _ in edges]
    by_name: dict[str, list[int]] = {}
    for i, (_, t, _) in enumerate(edges):
        by_name.setdefault(t.name, []).append(i)
    pairs = set()
    groups = list(by_name.items())
    for a, (name_a, ids_a) in enumerate(groups):
        for name_b, ids_b in groups[a + 1:]:
            if not (pre_places[ids_a[0]] & pre_places[ids_b[0]]):
                pairs.update((min(i, j), max(i, j)) for i in ids_a for j in ids_b)
    names = tuple(repr(m) for m in markings)
    return Ltsc(names, transitions, frozenset(pairs), 0)


# -- JSON ---------------------------------------------------------------------


def _weights(raw, what) -> Multiset:
    if not isinstance(raw, Mapping):
        raise ModelFormatError(f"{what} must be an object mapping places to weights")
    try:
        return Multiset({str(k): int(v) for k, v in raw.items()})
    except ValueError as exc:
        raise ModelFormatError(f"{what}: {exc}") from exc


def net_from_dict(data: Mapping) -> PetriNet:
    try:
        places = tuple(str(p) for p in data["places"])
        transitions = []
        for raw in data["transitions"]:
            label = str(raw["label"])
            if label != TAU:
                check_action_name(label)
            name = str(raw["name"])
            transitions.append(NetTransition(
                name, label, _weights(raw.get("pre", {}), f"pre of {name}"),
                _weights(raw.get("post", {}), f"post of {name}"),
            ))
        initial = _weights(data.get("initial", {}), "initial")
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed net: {exc}") from exc
    return PetriNet(places, tuple(transitions), initial)


def net_to_dict(net: PetriNet) -> dict:
    return {
        "places": list(net.places),
        "initial": dict(net.initial.items()),
        "transitions": [
            {"name": t.name, "label": t.label, "pre": dict(t.pre.items()), "post": dict(t.post.items())}
            for t in net.transitions
        ],
    }


def load_net(path) -> PetriNet:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc
    return net_from_dict(data)
