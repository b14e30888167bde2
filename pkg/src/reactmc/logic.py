"""LTL without next-state and CTL: formula trees, a parser, desugaring and
direct evaluation of LTL on finite words and on lasso-shaped words."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormulaSyntaxError, XNotSupported


class Formula:
    """Base class of all formula nodes (LTL and CTL share the propositional part)."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


class Until(_Binary):
    """``left U right``: right eventually holds and left holds until then."""


class WeakUntil(_Binary):
    """``left W right``, sugar for ``G left | (left U right)``."""


# CTL path quantifier pairs.


@dataclass(frozen=True)
class _CtlUnary(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


class EX(_CtlUnary):
    pass


class AX(_CtlUnary):
    pass


class EF(_CtlUnary):
    pass


class AF(_CtlUnary):
    pass


class EG(_CtlUnary):
    pass


class AG(_CtlUnary):
    pass


class EU(_Binary):
    pass


class AU(_Binary):
    pass


LTL_TEMPORAL = (Finally, Globally, Until, WeakUntil)
CTL_TEMPORAL = (EX, AX, EF, AF, EG, AG, EU, AU)


def atoms(phi: Formula) -> set[str]:
    if isinstance(phi, Atom):
        return {phi.name}
    out = set()
    for c in phi.children():
        out |= atoms(c)
    return out


def depth(phi: Formula) -> int:
    kids = phi.children()
    return 0 if not kids else 1 + max(depth(c) for c in kids)


def conjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


# -- printing ----------------------------------------------------------------

_UNARY_TEXT = {Not: "!", Finally: "F ", Globally: "G ", EX: "EX ", AX: "AX ", EF: "EF ",
               AF: "AF ", EG: "EG ", AG: "AG "}
_BINARY_TEXT = {And: "&", Or: "|", Implies: "->", Until: "U", WeakUntil: "W"}


def to_text(phi: Formula) -> str:
    """Fully parenthesised text that :func:`parse_formula` reads back."""
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Atom):
        return phi.name
    if type(phi) in _UNARY_TEXT:
        return f"{_UNARY_TEXT[type(phi)]}({to_text(phi.arg)})"
    if isinstance(phi, EU):
        return f"E[{to_text(phi.left)} U {to_text(phi.right)}]"
    if isinstance(phi, AU):
        return f"A[{to_text(phi.left)} U {to_text(phi.right)}]"
    return f"({to_text(phi.left)} {_BINARY_TEXT[type(phi)]} {to_text(phi.right)})"


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(->)|([!&|()\[\]])|('?[A-Za-z_][A-Za-z0-9_]*))")
_CTL_UNARY = {"EX": EX, "AX": AX, "EF": EF, "AF": AF, "EG": EG, "AG": AG}


class _FormulaParser:
    def __init__(self, text: str, logic: str):
        self.text = text
        self.logic = logic
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
            start = m.start(m.lastindex)
            self.tokens.append((m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0
        self.path_left = 0  # > 0 while reading the left operand of E[..U..] / A[..U..]

    def peek(self, offset=0):
        j = self.i + offset
        return self.tokens[j][0] if j < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = repr(expected) if expected else "a token"
            got = repr(tok) if tok is not None else "end of input"
            raise FormulaSyntaxError(f"expected {want}, found {got}", self.pos())
        self.i += 1
        return tok

    def parse(self):
        phi = self.implication()
        if self.peek() is not None:
            raise FormulaSyntaxError(f"unexpected {self.peek()!r}", self.pos())
        return phi

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        phi = self.conjunction()
        while self.peek() == "|":
            self.take()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self):
        phi = self.until()
        while self.peek() == "&":
            self.take()
            phi = And(phi, self.until())
        return phi

    def until(self):
        left = self.unary()
        tok = self.peek()
        if tok in ("U", "W"):
            if self.logic == "ctl":
                if tok == "U" and self.path_left:
                    return left
                raise FormulaSyntaxError(f"{tok} must appear inside E[...] or A[...]", self.pos())
            self.take()
            right = self.until()
            return Until(left, right) if tok == "U" else WeakUntil(left, right)
        return left

    def unary(self):
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", self.pos())
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "X":
            if self.logic == "ltl":
                raise XNotSupported(self.pos())
        if self.logic == "ltl" and tok in ("F", "G"):
            self.take()
            return (Finally if tok == "F" else Globally)(self.unary())
        if self.logic == "ctl":
            if tok in _CTL_UNARY:
                self.take()
                return _CTL_UNARY[tok](self.unary())
            if tok in ("E", "A") and self.peek(1) == "[":
                self.take()
                self.take("[")
                self.path_left += 1
                left = self.implication()
                self.path_left -= 1
                self.take("U")
                saved, self.path_left = self.path_left, 0
                right = self.implication()
                self.path_left = saved
                self.take("]")
                return (EU if tok == "E" else AU)(left, right)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            phi = self.implication()
            self.take(")")
            return phi
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok is not None and (tok[0].isalpha() or tok[0] in "_'"):
            reserved = {"U", "W"} | ({"F", "G", "X"} if self.logic == "ltl" else set(_CTL_UNARY))
            if tok in reserved:
                raise FormulaSyntaxError(f"operator {tok!r} used as an atom", self.pos())
            self.take()
            return Atom(tok)
        got = repr(tok) if tok is not None else "end of input"
        raise FormulaSyntaxError(f"expected a formula, found {got}", self.pos())


def parse_formula(text: str, logic: str = "ltl") -> Formula:
    """Parse LTL (without X) or CTL text.

    Binding strength, tightest first: ``!``/``F``/``G`` (and the CTL unary
    operators), ``U``/``W`` (right associative), ``&``, ``|``, ``->``.
    """
    if logic not in ("ltl", "ctl"):
        raise ValueError(f"unknown logic {logic!r}")
    return _FormulaParser(text, logic).parse()


def read_formula_file(path, logic: str = "ltl") -> list[tuple[str, Formula]]:
    """Read one formula per line, ``#`` comments allowed, optional ``name:`` prefix."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.match(r"([A-Za-z_][A-Za-z0-9_.']*)\s*:\s*(.*)\Z", line)
            name, body = (m.group(1), m.group(2)) if m else (f"line{lineno}", line)
            out.append((name, parse_formula(body, logic)))
    return out


# -- desugaring ----------------------------------------------------------------


def desugar(phi: Formula) -> Formula:
    """Remove ``W`` and ``->``; everything else is kept as is."""
    if isinstance(phi, (Const, Atom)):
        return phi
    if isinstance(phi, WeakUntil):
        left, right = desugar(phi.left), desugar(phi.right)
        return Or(Globally(left), Until(left, right))
    if isinstance(phi, Implies):
        return Or(Not(desugar(phi.left)), desugar(phi.right))
    if isinstance(phi, _Binary):
        return type(phi)(desugar(phi.left), desugar(phi.right))
    return type(phi)(desugar(phi.arg))


# -- direct evaluation -------------------------------------------------------


def _evaluate(phi: Formula, word: Sequence[frozenset], reach) -> list[bool]:
    """Truth value of ``phi`` at every position of ``word``.

    ``reach(i)`` lists the positions of the suffixes of the suffix at ``i`` in
    path order, each distinct position once (for a lasso the loop is cut once
    every cycle position has been seen).
    """
    n = len(word)
    if isinstance(phi, Const):
        return [phi.value] * n
    if isinstance(phi, Atom):
        return [phi.name in letter for letter in word]
    if isinstance(phi, Not):
        return [not v for v in _evaluate(phi.arg, word, reach)]
    if isinstance(phi, (And, Or, Implies)):
        a = _evaluate(phi.left, word, reach)
        b = _evaluate(phi.right, word, reach)
        if isinstance(phi, And):
            return [x and y for x, y in zip(a, b)]
        if isinstance(phi, Or):
            return [x or y for x, y in zip(a, b)]
        return [(not x) or y for x, y in zip(a, b)]
    if isinstance(phi, Finally):
        a = _evaluate(phi.arg, word, reach)
        return [any(a[j] for j in reach(i)) for i in range(n)]
    if isinstance(phi, Globally):
        a = _evaluate(phi.arg, word, reach)
        return [all(a[j] for j in reach(i)) for i in range(n)]
    if isinstance(phi, Until):
        a = _evaluate(phi.left, word, reach)
        b = _evaluate(phi.right, word, reach)
        out = []
        for i in range(n):
            holds = False
            for j in reach(i):
                if b[j]:
                    holds = True
                    break
                if not a[j]:
                    break
            out.append(holds)
        return out
    if isinstance(phi, WeakUntil):
        return _evaluate(Or(Globally(phi.left), Until(phi.left, phi.right)), word, reach)
    raise TypeError(f"not an LTL formula: {phi!r}")


def _letters(word: Iterable[Iterable[str]]) -> list[frozenset]:
    return [frozenset(letter) for letter in word]


def eval_ltl_finite(path: Sequence[Iterable[str]], phi: Formula) -> bool:
    """Decide ``phi`` on a nonempty finite word by quantifying over its suffixes."""
    word = _letters(path)
    if not word:
        raise ValueError("a path has at least one position")
    n = len(word)
    return _evaluate(phi, word, lambda i: range(i, n))[0]


def eval_ltl_lasso(
    prefix: Sequence[Iterable[str]], cycle: Sequence[Iterable[str]], phi: Formula
) -> bool:
    """Decide ``phi`` on the infinite word ``prefix . cycle^omega``."""
    if not cycle:
        raise ValueError("the cycle of a lasso is nonempty")
    word = _letters(prefix) + _letters(cycle)
    start, n = len(prefix), len(word)

    def reach(i):
        if i < start:
            return range(i, n)
        return list(range(i, n)) + list(range(start, i))

    return _evaluate(phi, word, reach)[0]
