import json
from pathlib import Path

import pytest

from reactmc.criteria import (
    BlockSet, CompletenessCriterion, TaskSet, b_deadlock_states, cycle_complete, load_tasks, obligations_update,
    task_enabled, tasks_by_label, tasks_from_dict,
)
from reactmc.errors import ModelFormatError, TaskSetMismatch
from reactmc.lts import load_ltsc, ltsc_from_edges

CORPUS = Path(__file__).resolve().parents[1] / "src" / "reactmc" / "corpus"


def beer(name):
    return load_ltsc(CORPUS / f"beer_{name}.lts.json")


def test_blockset():
    assert BlockSet.parse("a, b,") == {"a", "b"}
    assert BlockSet.parse("") == BlockSet.parse(None) == frozenset()
    with pytest.raises(ValueError):
        BlockSet(["tau"])


def test_criterion_construction():
    assert CompletenessCriterion.justness().kind == "justness"
    with pytest.raises(ValueError):
        CompletenessCriterion("wf")
    with pytest.raises(ValueError):
        CompletenessCriterion("eventually")


def test_tasks_by_label():
    d = beer("D")
    tasks = tasks_by_label(d)
    assert tasks.names() == ["A", "B", "C"]
    assert dict(tasks.tasks)["B"] == {1, 3, 8}
    assert "*all*" in tasks_by_label(d, default_task=True).names()


def test_task_file(tmp_path):
    d = beer("D")
    f = tmp_path / "t.json"
    f.write_text(json.dumps({"tasks": {"bart": {"by_label": "B"}, "x": [0, 2]}}))
    tasks = load_tasks(d, f)
    assert dict(tasks.tasks) == {"bart": {1, 3, 8}, "x": {0, 2}}
    with pytest.raises(TaskSetMismatch):
        tasks_from_dict(d, {"tasks": {"x": [99]}})
    with pytest.raises(ModelFormatError):
        tasks_from_dict(d, {"nope": {}})


def test_duplicate_task_names_rejected():
    with pytest.raises(ValueError):
        TaskSet((("a", frozenset()), ("a", frozenset())))


def test_b_deadlock_states():
    m = ltsc_from_edges([("s", "c", "t"), ("t", "p", "s")])
    assert b_deadlock_states(m, {"c"}) == {0}
    assert b_deadlock_states(m, set()) == set()


def test_obligations_update():
    f = beer("F")
    # at "before" taking A: obligations A, C, B remain only if A does not interfere with them
    assert obligations_update(f, set(), frozenset(), 0, 0) == {2}
    with pytest.raises(ValueError):
        obligations_update(f, set(), frozenset(), 1, 0)


def test_d_alice_cameron_cycle_is_just():
    d = beer("D")
    # lastA --C--> lastC --A--> lastA
    assert cycle_complete(d, CompletenessCriterion.justness(), set(), (), {1, 3}, {4, 7})


def test_d_alice_cameron_cycle_is_not_weakly_fair_to_bart():
    d = beer("D")
    tasks = TaskSet.from_mapping({"bart": {1, 3, 8}})
    assert not cycle_complete(d, CompletenessCriterion.weak_fairness(tasks), set(), (), {1, 3}, {4, 7})
    assert not cycle_complete(d, CompletenessCriterion.strong_fairness(tasks), set(), (), {1, 3}, {4, 7})
    # blocking B removes the obligation
    assert cycle_complete(d, CompletenessCriterion.weak_fairness(tasks), {"B"}, (), {1, 3}, {4, 7})


def test_f_tokyo_loop_is_unjust():
    f = beer("F")
    assert not cycle_complete(f, CompletenessCriterion.justness(), set(), (), {0}, {0, 1})
    assert cycle_complete(f, CompletenessCriterion.progress(), set(), (), {0}, {0, 1})


def test_whole_graph_cycle_is_just():
    f = beer("F")
    every = range(len(f.transitions))
    assert cycle_complete(f, CompletenessCriterion.justness(), set(), every, {0, 1}, every)


def test_entry_obligations_count():
    f = beer("F")
    # the cycle at "after" discharges nothing, so a pending obligation of a non-interfered transition fails it
    assert not cycle_complete(f, CompletenessCriterion.justness(), set(), {2}, {1}, {3, 4})
    assert cycle_complete(f, CompletenessCriterion.justness(), set(), (), {1}, {3, 4})


def test_weak_versus_strong_fairness():
    # task b is enabled only at s, the cycle visits s and t and never takes b
    m = ltsc_from_edges([("s", "a", "t"), ("t", "a", "s"), ("s", "b", "u")])
    tasks = TaskSet.from_mapping({"b": {2}})
    assert task_enabled(m, set(), 0, {2}) and not task_enabled(m, set(), 1, {2})
    assert cycle_complete(m, CompletenessCriterion.weak_fairness(tasks), set(), (), {0, 1}, {0, 1})
    assert not cycle_complete(m, CompletenessCriterion.strong_fairness(tasks), set(), (), {0, 1}, {0, 1})
