import random

import pytest

from randmodels import random_formula
from reactmc.errors import FormulaSyntaxError, XNotSupported
from reactmc.logic import (
    AU, EF, EU, AG, And, Atom, Finally, Globally, Implies, Not, Or, Until, WeakUntil, TRUE, FALSE, atoms,
    conjuncts, depth, desugar, eval_ltl_finite, eval_ltl_lasso, parse_formula, read_formula_file, to_text,
)

p, q = Atom("p"), Atom("q")


def ref_eval(phi, word, succ, i, horizon):
    """Textbook semantics straight from the definitions. ``succ`` maps a
    position to the next one (None at the end of a finite word); ``horizon``
    bounds how far an eventuality needs to be searched."""
    def suffix(i):
        out = []
        while i is not None and len(out) < horizon:
            out.append(i)
            i = succ(i)
        return out

    if phi is TRUE or phi == TRUE:
        return True
    if phi == FALSE:
        return False
    if isinstance(phi, Atom):
        return phi.name in word[i]
    if isinstance(phi, Not):
        return not ref_eval(phi.arg, word, succ, i, horizon)
    if isinstance(phi, And):
        return ref_eval(phi.left, word, succ, i, horizon) and ref_eval(phi.right, word, succ, i, horizon)
    if isinstance(phi, Or):
        return ref_eval(phi.left, word, succ, i, horizon) or ref_eval(phi.right, word, succ, i, horizon)
    if isinstance(phi, Implies):
        return not ref_eval(phi.left, word, succ, i, horizon) or ref_eval(phi.right, word, succ, i, horizon)
    if isinstance(phi, Finally):
        return any(ref_eval(phi.arg, word, succ, j, horizon) for j in suffix(i))
    if isinstance(phi, Globally):
        return all(ref_eval(phi.arg, word, succ, j, horizon) for j in suffix(i))
    if isinstance(phi, (Until, WeakUntil)):
        for j in suffix(i):
            if ref_eval(phi.right, word, succ, j, horizon):
                return True
            if not ref_eval(phi.left, word, succ, j, horizon):
                return False
        return isinstance(phi, WeakUntil)
    raise TypeError(phi)


def ref_finite(word, phi):
    n = len(word)
    return ref_eval(phi, word, lambda i: i + 1 if i + 1 < n else None, 0, n)


def ref_lasso(prefix, cycle, phi):
    word = list(prefix) + list(cycle)
    start, n = len(prefix), len(word)
    # every position recurs within n steps, so n + 1 positions decide F/G/U
    return ref_eval(phi, word, lambda i: i + 1 if i + 1 < n else start, 0, n + 1)


def L(*letters):
    return [frozenset(x) for x in letters]


# -- parsing -----------------------------------------------------------------


@pytest.mark.parametrize("text,expected", [
    ("p", p),
    ("!p", Not(p)),
    ("p & q | p", Or(And(p, q), p)),
    ("p -> q -> p", Implies(p, Implies(q, p))),
    ("F G p", Finally(Globally(p))),
    ("p U q U p", Until(p, Until(q, p))),
    ("p W q", WeakUntil(p, q)),
    ("!p U q", Until(Not(p), q)),
    ("G(p -> F q)", Globally(Implies(p, Finally(q)))),
    ("true & false", And(TRUE, FALSE)),
])
def test_parse_ltl(text, expected):
    assert parse_formula(text) == expected


def test_parse_ctl():
    assert parse_formula("AG EF p", "ctl") == AG(EF(p))
    assert parse_formula("E[p U q] & A[q U p]", "ctl") == And(EU(p, q), AU(q, p))


@pytest.mark.parametrize("text", ["", "p &", "(p", "p q", "F", "p $ q", "U p"])
def test_parse_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_next_operator_rejected():
    with pytest.raises(XNotSupported):
        parse_formula("G(p -> X q)")


def test_ctl_until_needs_path_quantifier():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("p U q", "ctl")


def test_to_text_round_trips():
    rng = random.Random(7)
    for _ in range(300):
        phi = random_formula(rng, rng.randint(0, 4))
        assert parse_formula(to_text(phi)) == phi


def test_read_formula_file(tmp_path):
    f = tmp_path / "x.ltl"
    f.write_text("# comment\nA1: G p\n\nF q  # trailing\n")
    got = read_formula_file(f)
    assert got == [("A1", Globally(p)), ("line4", Finally(q))]


def test_helpers():
    phi = parse_formula("G(p -> F q) & F p & q")
    assert atoms(phi) == {"p", "q"}
    assert depth(Globally(Finally(p))) == 2
    assert [str(c) for c in conjuncts(phi)] == ["G ((p -> F (q)))", "F (p)", "q"]


# -- evaluation --------------------------------------------------------------


def test_finite_examples():
    w = L((), ("p",), ())
    assert eval_ltl_finite(w, Finally(p))
    assert not eval_ltl_finite(w, Globally(p))
    assert eval_ltl_finite(w, Globally(Implies(p, Finally(Not(p)))))
    # the last position repeats forever, so G F p fails and F G !p holds
    assert not eval_ltl_finite(w, Globally(Finally(p)))
    assert eval_ltl_finite(w, Finally(Globally(Not(p))))


def test_lasso_examples():
    assert eval_ltl_lasso(L(), L(("p",), ()), Globally(Finally(p)))
    assert not eval_ltl_lasso(L(), L(("p",), ()), Finally(Globally(p)))
    assert eval_ltl_lasso(L(()), L(("q",)), Until(Not(q), q))
    assert eval_ltl_lasso(L(), L(("p",)), WeakUntil(p, q))
    assert not eval_ltl_lasso(L(), L(("p",)), Until(p, q))


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        eval_ltl_finite([], p)
    with pytest.raises(ValueError):
        eval_ltl_lasso(L(()), [], p)


def random_word(rng, n):
    return [frozenset(a for a in "pq" if rng.random() < 0.5) for _ in range(n)]


def test_eval_matches_reference_semantics():
    rng = random.Random(11)
    for _ in range(1500):
        phi = random_formula(rng, rng.randint(0, 4), atoms=("p", "q"))
        w = random_word(rng, rng.randint(1, 5))
        assert eval_ltl_finite(w, phi) == ref_finite(w, phi), (phi, w)
        pre, cyc = random_word(rng, rng.randint(0, 3)), random_word(rng, rng.randint(1, 3))
        assert eval_ltl_lasso(pre, cyc, phi) == ref_lasso(pre, cyc, phi), (phi, pre, cyc)


def test_desugar_preserves_meaning():
    rng = random.Random(5)
    for _ in range(500):
        phi = random_formula(rng, rng.randint(0, 4), atoms=("p", "q"))
        d = desugar(phi)
        assert not any(isinstance(x, (WeakUntil, Implies)) for x in _subformulas(d))
        pre, cyc = random_word(rng, rng.randint(0, 3)), random_word(rng, rng.randint(1, 3))
        assert eval_ltl_lasso(pre, cyc, d) == eval_ltl_lasso(pre, cyc, phi)


def _subformulas(phi):
    yield phi
    for c in phi.children():
        yield from _subformulas(c)
