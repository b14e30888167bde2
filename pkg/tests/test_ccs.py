import pytest

from reactmc.ccs import (
    NIL, Ident, Par, Relabel, Restrict, Sum, complement, explore_ccs, explore_ccs_full, parse_ccs, parse_process,
    prefix, sos_step, to_text,
)
from reactmc.errors import (
    CcsSyntaxError, StateSpaceExceeded, UndefinedIdentifier, UnguardedChoice, UnguardedRecursion,
)
from reactmc.lts import validate_ltsc


def test_complement():
    assert complement("a") == "'a"
    assert complement("'a") == "a"
    with pytest.raises(ValueError):
        complement("tau")


def test_parse_precedence():
    # + only takes prefixed operands, so a parallel operand is an error
    with pytest.raises(UnguardedChoice):
        parse_process("a.0 | b.0 + c.0")
    assert parse_process("a.b.0 + c.0") == Sum((("a", prefix("b")), ("c", NIL)))
    assert parse_process("a.0 | b.0 | c.0") == Par(Par(prefix("a"), prefix("b")), prefix("c"))
    r = parse_process("(a.0 | 'a.0)\\{a}")
    assert isinstance(r, Restrict) and r.names == {"a"}
    assert isinstance(parse_process("(a.0)[b/a]"), Relabel)


def test_restriction_binds_to_the_nearest_atom():
    p = parse_process("a.b.0\\{b}")
    assert p == prefix("a", prefix("b", Restrict(NIL, frozenset({"b"}))))
    assert isinstance(parse_process("(a.b.0)\\{b}"), Restrict)


def test_spec_main_and_definitions():
    spec = parse_ccs("X = a.X;\nY = b.0;\nmain = X | Y;")
    assert set(spec.definitions) == {"X", "Y"}
    assert spec.process() == Par(Ident("X"), Ident("Y"))
    assert spec.process("Y") == Ident("Y")
    with pytest.raises(UndefinedIdentifier):
        spec.process("Z")


def test_first_definition_is_default():
    assert parse_ccs("A = a.A; B = b.B;").process() == Ident("A")


def test_undefined_identifier():
    with pytest.raises(UndefinedIdentifier):
        parse_ccs("main = a.Q;")


def test_syntax_error_position():
    with pytest.raises(CcsSyntaxError) as info:
        parse_ccs("X = a.X;\nY = b.;")
    assert info.value.line == 2


def test_double_definition_rejected():
    with pytest.raises(CcsSyntaxError):
        parse_ccs("X = a.X; X = b.X;")


def test_unguarded_recursion_detected():
    spec = parse_ccs("X = X | a.0; main = X;")
    with pytest.raises(UnguardedRecursion):
        explore_ccs(spec.process(), spec.definitions)


def test_to_text_round_trip():
    for text in ["(X|'a.0)|'a.b.0", "a.(b.0 + c.0)", "(a.0|'a.0)\\{a}", "a.X[c/b]", "X|(Y|Z)"]:
        defs = {"X": NIL, "Y": NIL, "Z": NIL}
        p = parse_process(text, defs)
        assert parse_process(to_text(p), defs) == p


def test_synchronisation_and_restriction():
    defs = {}
    p = parse_process("(a.0 | 'a.0)\\{a}", defs)
    steps = sos_step(p, defs)
    assert [(a, sorted(c)) for a, c, _ in steps] == [("tau", ["L", "R"])]


def test_relabelling_renames_both_polarities():
    p = parse_process("(a.0 | 'a.0)[b/a]", {})
    assert sorted(a for a, _, _ in sos_step(p, {})) == ["'b", "b", "tau"]


def test_paper_process_initial_transitions():
    spec = parse_ccs("X = a.X; main = (X | 'a.0) | 'a.b.0;")
    got = [(a, frozenset(c), to_text(q)) for a, c, q in sos_step(spec.process(), spec.definitions)]
    assert got == [
        ("a", {"LL"}, "(X|'a.0)|'a.b.0"),
        ("tau", {"LL", "LR"}, "(X|0)|'a.b.0"),
        ("'a", {"LR"}, "(X|0)|'a.b.0"),
        ("tau", {"LL", "R"}, "(X|'a.0)|b.0"),
        ("'a", {"R"}, "(X|'a.0)|b.0"),
    ]


def test_concurrency_from_disjoint_components():
    spec = parse_ccs("X = a.X; main = (X | 'a.0) | 'a.b.0;")
    m = explore_ccs(spec.process(), spec.definitions)
    t, u, v, w, x = m.outgoing(0)
    assert not m.concurrent(t, w)
    assert m.concurrent(v, w)
    assert m.concurrent(t, v) and not m.concurrent(v, u)


def test_explored_models_satisfy_ltsc_axioms():
    spec = parse_ccs("X = a.X; Y = b.'c.Y; main = (X | Y | c.0)\\{c};")
    m = explore_ccs(spec.process(), spec.definitions)
    assert validate_ltsc(m, 3) == []


def test_exploration_dedups_states():
    spec = parse_ccs("X = a.Y; Y = b.X;")
    m = explore_ccs(spec.process(), spec.definitions)
    assert m.num_states == 2 and len(m.transitions) == 2


def test_state_space_limit():
    spec = parse_ccs("X = a.(X | X);")
    with pytest.raises(StateSpaceExceeded):
        explore_ccs(spec.process(), spec.definitions, max_states=50)


def test_full_exploration_keeps_terms_and_components():
    spec = parse_ccs("main = a.0 | b.0;")
    e = explore_ccs_full(spec.process(), spec.definitions)
    assert len(e.terms) == e.ltsc.num_states == 4
    assert len(e.components) == len(e.ltsc.transitions)
