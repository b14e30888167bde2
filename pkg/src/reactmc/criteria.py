"""Completeness criteria and blockable action sets.

A judgement is parametrised by a criterion (top, progress, justness, weak or
strong fairness over a set of tasks) and by the set of actions the
environment may block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ModelFormatError, TaskSetMismatch
from .lts import TAU, Ltsc, check_action_name, is_visible

TOP = "top"
PROGRESS = "progress"
JUSTNESS = "justness"
WEAK_FAIRNESS = "wf"
STRONG_FAIRNESS = "sf"
KINDS = (TOP, PROGRESS, JUSTNESS, WEAK_FAIRNESS, STRONG_FAIRNESS)


class BlockSet(frozenset):
    """Visible actions the environment may refuse; never contains tau."""

    def __new__(cls, names: Iterable[str] = ()):
        names = list(names)
        for name in names:
            if name == TAU:
                raise ValueError("the hidden action tau can never be blocked")
            check_action_name(name)
        return super().__new__(cls, names)

    def __repr__(self):
        return f"BlockSet({sorted(self)!r})"

    @classmethod
    def parse(cls, text: str | None) -> "BlockSet":
        if not text:
            return cls()
        return cls(s.strip() for s in text.split(",") if s.strip())


@dataclass(frozen=True)
class TaskSet:
    """Named tasks, each a set of transition ids of one particular Ltsc."""

    tasks: tuple[tuple[str, frozenset], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.tasks]
        if len(set(names)) != len(names):
            raise ValueError("task names must be unique")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[int]]) -> "TaskSet":
        return cls(tuple((name, frozenset(ts)) for name, ts in mapping.items()))

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)

    def names(self) -> list[str]:
        return [n for n, _ in self.tasks]

    def with_task(self, name: str, transitions: Iterable[int]) -> "TaskSet":
        return TaskSet(self.tasks + ((name, frozenset(transitions)),))

    def check(self, ltsc: Ltsc) -> None:
        n = len(ltsc.transitions)
        for name, ts in self.tasks:
            bad = sorted(t for t in ts if not (isinstance(t, int) and 0 <= t < n))
            if bad:
                raise TaskSetMismatch(f"task {name!r} refers to unknown transitions {bad}")


def tasks_by_label(ltsc: Ltsc, default_task: bool = False) -> TaskSet:
    """One task per visible label; optionally one extra task holding every transition."""
    groups: dict[str, set] = {}
    for t in ltsc.transitions:
        if is_visible(t.label):
            groups.setdefault(t.label, set()).add(t.id)
    tasks = TaskSet.from_mapping(groups)
    if default_task:
        tasks = tasks.with_task("*all*", range(len(ltsc.transitions)))
    return tasks


def tasks_from_dict(ltsc: Ltsc, data: Mapping) -> TaskSet:
    """Read ``{"tasks": {name: [ids] | {"by_label": label}}}``."""
    try:
        raw = data["tasks"]
        out = {}
        for name, spec in raw.items():
            if isinstance(spec, Mapping):
                label = spec["by_label"]
                out[name] = {t.id for t in ltsc.transitions if t.label == label}
            else:
                out[name] = {int(t) for t in spec}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ModelFormatError(f"malformed task file: {exc}") from exc
    tasks = TaskSet.from_mapping(out)
    tasks.check(ltsc)
    return tasks


def load_tasks(ltsc: Ltsc, path) -> TaskSet:
    with open(path) as fh:
        try:
            return tasks_from_dict(ltsc, json.load(fh))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class CompletenessCriterion:
    kind: str
    tasks: TaskSet | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown completeness criterion {self.kind!r}")
        if self.kind in (WEAK_FAIRNESS, STRONG_FAIRNESS) and self.tasks is None:
            raise ValueError(f"criterion {self.kind} needs a task set")

    @classmethod
    def top(cls):
        return cls(TOP)

    @classmethod
    def progress(cls):
        return cls(PROGRESS)

    @classmethod
    def justness(cls):
        return cls(JUSTNESS)

    @classmethod
    def weak_fairness(cls, tasks: TaskSet):
        return cls(WEAK_FAIRNESS, tasks)

    @classmethod
    def strong_fairness(cls, tasks: TaskSet):
        return cls(STRONG_FAIRNESS, tasks)

    def check(self, ltsc: Ltsc) -> None:
        if self.tasks is not None:
            self.tasks.check(ltsc)

    def __str__(self):
        return self.kind


def _as_blockset(b) -> BlockSet:
    return b if isinstance(b, BlockSet) else BlockSet(b)


def b_deadlock_states(ltsc: Ltsc, b: Iterable[str]) -> set[int]:
    """States all of whose outgoing transitions carry a label from ``b``."""
    b = _as_blockset(b)
    return {
        s for s in range(ltsc.num_states)
        if all(ltsc.transitions[t].label in b for t in ltsc.outgoing(s))
    }


def unblockable_outgoing(ltsc: Ltsc, b: Iterable[str], state: int) -> frozenset:
    return frozenset(t for t in ltsc.outgoing(state) if ltsc.transitions[t].label not in b)


def obligations_update(ltsc: Ltsc, b: Iterable[str], o: frozenset, at_state: int, taken: int) -> frozenset:
    """Add the unblockable transitions leaving ``at_state`` to the pending
    obligations, then drop every obligation ``taken`` interferes with."""
    if ltsc.transitions[taken].source != at_state:
        raise ValueError(f"transition {taken} does not leave state {at_state}")
    pending = frozenset(o) | unblockable_outgoing(ltsc, b, at_state)
    return pending & ltsc.concurrent_with(taken)


def task_enabled(ltsc: Ltsc, b: Iterable[str], state: int, task: frozenset) -> bool:
    return any(t in task and ltsc.transitions[t].label not in b for t in ltsc.outgoing(state))


def cycle_complete(
    ltsc: Ltsc,
    cc: CompletenessCriterion,
    b: Iterable[str],
    entry: Iterable[int],
    cycle_states: Iterable[int],
    cycle_transitions: Iterable[int],
) -> bool:
    """Is a path that eventually repeats a cycle with these states and
    transitions forever complete, given the obligations pending on entry?"""
    b = _as_blockset(b)
    states = set(cycle_states)
    trans = set(cycle_transitions)
    if cc.kind in (TOP, PROGRESS):
        return True
    if cc.kind == JUSTNESS:
        pending = set(entry)
        for s in states:
            pending |= unblockable_outgoing(ltsc, b, s)
        return all(any(not ltsc.concurrent(t, u) for u in trans) for t in pending)
    for _, task in cc.tasks:
        if trans & task:
            continue
        enabled = [task_enabled(ltsc, b, s, task) for s in states]
        if cc.kind == WEAK_FAIRNESS and all(enabled):
            return False
        if cc.kind == STRONG_FAIRNESS and any(enabled):
            return False
    return True
