"""CCS with guarded choice: syntax, a parser, operational semantics that
records the parallel components taking part in each transition, and
exploration into an Ltsc.

Concrete syntax::

    # comment
    X = a.X;
    main = (X | 'a.0) | 'a.b.0;

Co-names carry a leading apostrophe, ``tau`` is the hidden action,
``P\\{a,b}`` restricts and ``P[new/old, ...]`` relabels. Restriction and
relabelling bind tightest, then prefixing, then ``|``, then ``+``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    CcsSyntaxError, StateSpaceExceeded, UndefinedIdentifier, UnguardedChoice, UnguardedRecursion,
)
from .lts import TAU, Ltsc, Transition

DEFAULT_MAX_STATES = 100_000


# -- actions -----------------------------------------------------------------


def complement(action: str) -> str:
    if action == TAU:
        raise ValueError("tau has no complement")
    return action[1:] if action.startswith("'") else "'" + action


def action_name(action: str) -> str:
    """The name underlying an action: ``'a`` and ``a`` both give ``a``."""
    return action.lstrip("'")


# -- syntax ------------------------------------------------------------------


class Process:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Sum(Process):
    """Guarded choice; no summands is the inactive process 0."""

    summands: tuple[tuple[str, Process], ...] = ()


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Restrict(Process):
    body: Process
    names: frozenset


@dataclass(frozen=True)
class Relabel(Process):
    body: Process
    mapping: tuple[tuple[str, str], ...]  # sorted (old, new) pairs

    def apply(self, action: str) -> str:
        if action == TAU:
            return TAU
        name = action_name(action)
        new = dict(self.mapping).get(name, name)
        return "'" + new if action.startswith("'") else new


@dataclass(frozen=True)
class Ident(Process):
    name: str


NIL = Sum(())


def prefix(action: str, cont: Process = NIL) -> Sum:
    return Sum(((action, cont),))


def relabel(body: Process, mapping: dict[str, str]) -> Relabel:
    return Relabel(body, tuple(sorted(mapping.items())))


def _wrap(p: Process) -> str:
    text = to_text(p)
    if isinstance(p, Ident) or p == NIL:
        return text
    if isinstance(p, Sum) and len(p.summands) == 1:
        return text
    return f"({text})"


def to_text(p: Process) -> str:
    """Text that reads back to the same term; nested parallel compositions
    are always parenthesised."""
    if isinstance(p, Ident):
        return p.name
    if isinstance(p, Sum):
        if not p.summands:
            return "0"
        parts = []
        for action, cont in p.summands:
            parts.append(f"{action}.{_wrap(cont)}")
        return " + ".join(parts)
    if isinstance(p, Par):
        left, right = p.left, p.right
        ltext = f"({to_text(left)})" if isinstance(left, (Par,)) or _is_choice(left) else to_text(left)
        rtext = f"({to_text(right)})" if isinstance(right, (Par,)) or _is_choice(right) else to_text(right)
        return f"{ltext}|{rtext}"
    if isinstance(p, Restrict):
        return f"{_wrap(p.body)}\\{{{','.join(sorted(p.names))}}}"
    if isinstance(p, Relabel):
        pairs = ",".join(f"{new}/{old}" for old, new in p.mapping)
        return f"{_wrap(p.body)}[{pairs}]"
    raise TypeError(f"not a process: {p!r}")


def _is_choice(p: Process) -> bool:
    return isinstance(p, Sum) and len(p.summands) > 1


def identifiers(p: Process) -> set[str]:
    if isinstance(p, Ident):
        return {p.name}
    if isinstance(p, Sum):
        out = set()
        for _, cont in p.summands:
            out |= identifiers(cont)
        return out
    if isinstance(p, Par):
        return identifiers(p.left) | identifiers(p.right)
    return identifiers(p.body)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)"
    r"|(?P<name>'?[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<zero>0)"
    r"|(?P<sym>\\\{|[.|+()=;,\[\]/{}])"
)


@dataclass(frozen=True)
class CcsSpec:
    """Parsed CCS file: defining equations and the term to check."""

    definitions: dict
    main: Process | None

    def process(self, name: str | None = None) -> Process:
        """The term named by ``name``, else ``main``, else the first definition."""
        if name is not None:
            if name not in self.definitions:
                raise UndefinedIdentifier(name)
            return Ident(name)
        if self.main is not None:
            return self.main
        if not self.definitions:
            raise CcsSyntaxError("the file defines no process")
        return Ident(next(iter(self.definitions)))


class _CcsParser:
    def __init__(self, text: str):
        self.tokens = []
        pos, line, col = 0, 1, 1
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise CcsSyntaxError(f"unexpected character {text[pos]!r}", line, col)
            chunk = m.group()
            if m.lastgroup != "ws":
                self.tokens.append((chunk, line, col))
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                col = len(chunk) - chunk.rfind("\n")
            else:
                col += len(chunk)
            pos = m.end()
        self.end = (line, col)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.tokens[j][0] if j < len(self.tokens) else None

    def where(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][1:]
        return self.end

    def error(self, msg, cls=CcsSyntaxError):
        return cls(msg, *self.where())

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            got = repr(tok) if tok is not None else "end of input"
            raise self.error(f"expected {expected!r}, found {got}" if expected else f"unexpected {got}")
        self.i += 1
        return tok

    def is_name(self, tok):
        return tok is not None and (tok[0].isalpha() or tok[0] in "_'")

    def spec(self) -> CcsSpec:
        defs, main = {}, None
        while self.peek() is not None:
            if not self.is_name(self.peek()) or self.peek().startswith("'"):
                raise self.error("expected a definition 'Name = process;'")
            name = self.take()
            if name == TAU:
                raise self.error("tau cannot be defined")
            self.take("=")
            body = self.choice()
            self.take(";")
            if name == "main":
                main = body
            elif name in defs:
                raise self.error(f"identifier {name!r} defined twice")
            else:
                defs[name] = body
        return CcsSpec(defs, main)

    def choice(self) -> Process:
        operands = [(self.where(), self.parallel())]
        while self.peek() == "+":
            self.take()
            operands.append((self.where(), self.parallel()))
        if len(operands) == 1:
            return operands[0][1]
        summands = []
        for (line, col), p in operands:
            if not isinstance(p, Sum):
                raise UnguardedChoice("every operand of + must be an action-prefixed term", line, col)
            summands.extend(p.summands)
        return Sum(tuple(summands))

    def parallel(self) -> Process:
        p = self.prefixed()
        while self.peek() == "|":
            self.take()
            p = Par(p, self.prefixed())
        return p

    def prefixed(self) -> Process:
        tok = self.peek()
        if self.is_name(tok) and self.peek(1) == ".":
            self.take()
            self.take(".")
            return prefix(tok, self.prefixed())
        return self.postfix()

    def postfix(self) -> Process:
        p = self.atom()
        while self.peek() in ("\\{", "["):
            if self.take() == "\\{":
                names = []
                while self.peek() != "}":
                    names.append(self.plain_name())
                    if self.peek() == ",":
                        self.take()
                self.take("}")
                p = Restrict(p, frozenset(names))
            else:
                mapping = {}
                while self.peek() != "]":
                    new = self.plain_name()
                    self.take("/")
                    old = self.plain_name()
                    if old in mapping:
                        raise self.error(f"name {old!r} relabelled twice")
                    mapping[old] = new
                    if self.peek() == ",":
                        self.take()
                self.take("]")
                p = relabel(p, mapping)
        return p

    def plain_name(self) -> str:
        tok = self.peek()
        if not self.is_name(tok) or tok.startswith("'") or tok == TAU:
            raise self.error(f"expected an action name, found {tok!r}")
        return self.take()

    def atom(self) -> Process:
        tok = self.peek()
        if tok == "0":
            self.take()
            return NIL
        if tok == "(":
            self.take()
            p = self.choice()
            self.take(")")
            return p
        if self.is_name(tok) and not tok.startswith("'") and tok != TAU:
            self.take()
            return Ident(tok)
        got = repr(tok) if tok is not None else "end of input"
        raise self.error(f"expected a process, found {got}")


def parse_ccs(text: str) -> CcsSpec:
    """Parse a CCS file. Every agent identifier used must be defined."""
    spec = _CcsParser(text).spec()
    used = set()
    for body in spec.definitions.values():
        used |= identifiers(body)
    if spec.main is not None:
        used |= identifiers(spec.main)
    for name in sorted(used):
        if name not in spec.definitions:
            raise UndefinedIdentifier(name)
    return spec


def parse_process(text: str, definitions: dict | None = None) -> Process:
    """Parse a single process expression."""
    parser = _CcsParser(text)
    p = parser.choice()
    if parser.peek() is not None:
        raise parser.error(f"unexpected {parser.peek()!r}")
    for name in sorted(identifiers(p)):
        if definitions is None or name not in definitions:
            raise UndefinedIdentifier(name)
    return p


def load_ccs(path) -> CcsSpec:
    with open(path) as fh:
        return parse_ccs(fh.read())


# -- operational semantics ----------------------------------------------------


def _prefix_components(tag: str, comps: frozenset) -> frozenset:
    return frozenset(tag + c for c in comps)


def _sos(p: Process, defs: dict, unfolding: frozenset) -> list:
    if isinstance(p, Sum):
        return [(action, frozenset({""}), cont) for action, cont in p.summands]
    if isinstance(p, Ident):
        if p.name in unfolding:
            raise UnguardedRecursion(p.name)
        if p.name not in defs:
            raise UndefinedIdentifier(p.name)
        return _sos(defs[p.name], defs, unfolding | {p.name})
    if isinstance(p, Par):
        left = _sos(p.left, defs, unfolding)
        right = _sos(p.right, defs, unfolding)
        out = [(a, _prefix_components("L", c), Par(q, p.right)) for a, c, q in left]
        for a, c, q in left:
            if a == TAU:
                continue
            co = complement(a)
            for b, d, r in right:
                if b == co:
                    out.append((TAU, _prefix_components("L", c) | _prefix_components("R", d), Par(q, r)))
        out.extend((b, _prefix_components("R", d), Par(p.left, r)) for b, d, r in right)
        return out
    if isinstance(p, Restrict):
        return [
            (a, c, Restrict(q, p.names))
            for a, c, q in _sos(p.body, defs, unfolding)
            if a == TAU or action_name(a) not in p.names
        ]
    if isinstance(p, Relabel):
        return [(p.apply(a), c, Relabel(q, p.mapping)) for a, c, q in _sos(p.body, defs, unfolding)]
    raise TypeError(f"not a process: {p!r}")


def sos_step(p: Process, defs: dict) -> list[tuple[str, frozenset, Process]]:
    """All transitions of ``p`` as (action, component set, target), each
    distinct triple once, in derivation order (left moves, synchronisations,
    right moves)."""
    seen = set()
    out = []
    for step in _sos(p, defs, frozenset()):
        if step not in seen:
            seen.add(step)
            out.append(step)
    return out


@dataclass(frozen=True)
class CcsExploration:
    ltsc: Ltsc
    terms: tuple[Process, ...]
    components: tuple[frozenset, ...]  # per transition id


def explore_ccs_full(p: Process, defs: dict, max_states: int = DEFAULT_MAX_STATES) -> CcsExploration:
    if max_states < 1:
        raise ValueError("max_states must be positive")
    index = {p: 0}
    terms = [p]
    transitions = []
    components = []
    queue = deque([p])
    while queue:
        src = queue.popleft()
        for action, comps, dst in sos_step(src, defs):
            if dst not in index:
                if len(terms) >= max_states:
                    raise StateSpaceExceeded(max_states)
                index[dst] = len(terms)
                terms.append(dst)
                queue.append(dst)
            transitions.append(Transition(len(transitions), index[src], index[dst], action))
            components.append(comps)
    by_comps: dict[frozenset, list[int]] = {}
    for i, comps in enumerate(components):
        by_comps.setdefault(comps, []).append(i)
    groups = list(by_comps.items())
    pairs = set()
    for a, (ca, ta) in enumerate(groups):
        for cb, tb in groups[a + 1:]:
            if not (ca & cb):
                pairs.update((min(i, j), max(i, j)) for i in ta for j in tb)
    ltsc = Ltsc(tuple(to_text(t) for t in terms), tuple(transitions), frozenset(pairs), 0)
    return CcsExploration(ltsc, tuple(terms), tuple(components))


def explore_ccs(p: Process, defs: dict, max_states: int = DEFAULT_MAX_STATES) -> Ltsc:
    """Breadth-first exploration; two transitions are concurrent iff their
    component sets are disjoint."""
    return explore_ccs_full(p, defs, max_states).ltsc


def components_text(comps: Iterable[str]) -> str:
    return "{" + ",".join(c or "ε" for c in sorted(comps)) + "}"
