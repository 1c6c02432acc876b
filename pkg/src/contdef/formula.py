"""First-order terms and formulas over L_ring, L_ring + O and L_ring + B.

Concrete syntax is fully parenthesized prefix notation::

    formula := atom | (not F) | (and F F) | (or F F) | (imp F F)
             | (exists x F) | (forall x F)
    atom    := (= t t) | (in-O t) | (in-B t)
    term    := ident | 0 | 1 | (+ t t) | (- t) | (* t t)

All nodes are immutable and hashable; free variables, size and a
term-blind "shape" key are cached at construction.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Term", "Var", "Const", "Add", "Neg", "Mul",
    "Formula", "Eq", "InO", "InB", "Not", "And", "Or", "Imp", "Exists", "Forall",
    "Language", "VarPool", "FormulaSyntaxError", "UnknownPredicateError",
    "parse_formula", "parse_formulas", "parse_term", "print_formula", "print_term",
    "pretty", "free_vars", "substitute", "substitute_many", "alpha_eq",
    "language_of", "check_language", "stats", "conj", "disj", "conjuncts",
    "sub", "exists_many", "forall_many", "ZERO", "ONE",
]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownPredicateError(ValueError):
    pass


class Language(enum.Enum):
    RING = "L_ring"
    RING_O = "L_ring+O"
    RING_B = "L_ring+B"

    def allows(self, atom: type) -> bool:
        if atom is Eq:
            return True
        if atom is InO:
            return self is Language.RING_O
        if atom is InB:
            return self is Language.RING_B
        return False


# --------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def _finish(self, fv: frozenset, size: int, key: tuple) -> None:
        object.__setattr__(self, "fv", fv)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: Term) -> Term:
        return Add(self, other)

    def __mul__(self, other: Term) -> Term:
        return Mul(self, other)

    def __neg__(self) -> Term:
        return Neg(self)

    def __sub__(self, other: Term) -> Term:
        return Add(self, Neg(other))

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str

    def __post_init__(self):
        self._finish(frozenset((self.name,)), 1, ("v", self.name))


@dataclass(frozen=True, eq=True)
class Const(Term):
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError("only the constants 0 and 1 exist in L_ring")
        self._finish(frozenset(), 1, ("c", self.value))


@dataclass(frozen=True, eq=True)
class Add(Term):
    left: Term
    right: Term

    def __post_init__(self):
        self._finish(self.left.fv | self.right.fv, 1 + self.left.size + self.right.size,
                     ("+", self.left._hash, self.right._hash))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Neg(Term):
    arg: Term

    def __post_init__(self):
        self._finish(self.arg.fv, 1 + self.arg.size, ("-", self.arg._hash))

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=True)
class Mul(Term):
    left: Term
    right: Term

    def __post_init__(self):
        self._finish(self.left.fv | self.right.fv, 1 + self.left.size + self.right.size,
                     ("*", self.left._hash, self.right._hash))

    def children(self):
        return (self.left, self.right)


ZERO = Const(0)
ONE = Const(1)


def sub(a: Term, b: Term) -> Term:
    return Add(a, Neg(b))


# --------------------------------------------------------------------------
# formulas


class Formula:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def _finish(self, fv: frozenset, size: int, key: tuple, shape: tuple) -> None:
        object.__setattr__(self, "fv", fv)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "shape", hash(shape))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return print_formula(self)


def _atom(cls_tag: str):
    def post_init(self):
        terms = self.terms()
        fv = frozenset().union(*(t.fv for t in terms))
        self._finish(fv, 1 + sum(t.size for t in terms),
                     (cls_tag,) + tuple(t._hash for t in terms), (cls_tag,))
    return post_init


@dataclass(frozen=True, eq=True)
class Eq(Formula):
    left: Term
    right: Term

    def terms(self):
        return (self.left, self.right)

    __post_init__ = _atom("=")


@dataclass(frozen=True, eq=True)
class InO(Formula):
    arg: Term

    def terms(self):
        return (self.arg,)

    __post_init__ = _atom("in-O")


@dataclass(frozen=True, eq=True)
class InB(Formula):
    arg: Term

    def terms(self):
        return (self.arg,)

    __post_init__ = _atom("in-B")


@dataclass(frozen=True, eq=True)
class Not(Formula):
    arg: Formula

    def __post_init__(self):
        a = self.arg
        self._finish(a.fv, 1 + a.size, ("not", a._hash), ("not", a.shape))

    def children(self):
        return (self.arg,)


def _binary(tag: str):
    def post_init(self):
        l, r = self.left, self.right
        self._finish(l.fv | r.fv, 1 + l.size + r.size, (tag, l._hash, r._hash),
                     (tag, l.shape, r.shape))
    return post_init


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula
    __post_init__ = _binary("and")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula
    __post_init__ = _binary("or")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Imp(Formula):
    left: Formula
    right: Formula
    __post_init__ = _binary("imp")

    def children(self):
        return (self.left, self.right)


def _quant(tag: str):
    def post_init(self):
        b = self.body
        self._finish(b.fv - {self.var}, 1 + b.size, (tag, self.var, b._hash),
                     (tag, b.shape))
    return post_init


@dataclass(frozen=True, eq=True)
class Exists(Formula):
    var: str
    body: Formula
    __post_init__ = _quant("exists")

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class Forall(Formula):
    var: str
    body: Formula
    __post_init__ = _quant("forall")

    def children(self):
        return (self.body,)


ATOMS = (Eq, InO, InB)
QUANTIFIERS = (Exists, Forall)
BINARY = (And, Or, Imp)


def conj(*fs: Formula) -> Formula:
    """Right-nested conjunction of one or more formulas."""
    if not fs:
        raise ValueError("empty conjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        raise ValueError("empty disjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def exists_many(names: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Exists(v, body)
    return body


def forall_many(names: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Forall(v, body)
    return body


# --------------------------------------------------------------------------
# variables


def free_vars(f: Formula | Term) -> frozenset:
    return f.fv


def all_vars(f: Formula | Term) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, QUANTIFIERS):
            out.add(n.var)
        if isinstance(n, ATOMS):
            stack.extend(n.terms())
        else:
            stack.extend(n.children())
    return out


_SUFFIX = re.compile(r"('+|_\d+)$")


class VarPool:
    """Issues variable names that are neither reserved nor previously issued."""

    def __init__(self, reserved: Iterable[str] = ()):
        self.reserved = set(reserved)
        self.counter = 0

    def reserve(self, names: Iterable[str]) -> None:
        self.reserved.update(names)

    def fresh_var(self, base: str = "v") -> str:
        stem = _SUFFIX.sub("", base) or "v"
        candidate = stem + "'"
        n = 1
        while candidate in self.reserved:
            n += 1
            candidate = f"{stem}'{n}"
        self.reserved.add(candidate)
        self.counter += 1
        return candidate


def _subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if not (t.fv & mapping.keys()):
        return t
    if isinstance(t, Var):
        return mapping[t.name]
    if isinstance(t, Add):
        return Add(_subst_term(t.left, mapping), _subst_term(t.right, mapping))
    if isinstance(t, Mul):
        return Mul(_subst_term(t.left, mapping), _subst_term(t.right, mapping))
    if isinstance(t, Neg):
        return Neg(_subst_term(t.arg, mapping))
    return t


def substitute_many(f: Formula, mapping: Mapping[str, Term],
                    pool: VarPool | None = None) -> Formula:
    """Simultaneous capture-avoiding substitution of terms for free variables."""
    mapping = {v: t for v, t in mapping.items() if v in f.fv}
    if not mapping:
        return f
    if pool is None:
        pool = VarPool(all_vars(f))
        for t in mapping.values():
            pool.reserve(t.fv)
    return _subst(f, mapping, pool)


def _subst(f: Formula, mapping: dict, pool: VarPool) -> Formula:
    mapping = {v: t for v, t in mapping.items() if v in f.fv}
    if not mapping:
        return f
    if isinstance(f, Eq):
        return Eq(_subst_term(f.left, mapping), _subst_term(f.right, mapping))
    if isinstance(f, InO):
        return InO(_subst_term(f.arg, mapping))
    if isinstance(f, InB):
        return InB(_subst_term(f.arg, mapping))
    if isinstance(f, Not):
        return Not(_subst(f.arg, mapping, pool))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, mapping, pool), _subst(f.right, mapping, pool))
    # quantifier; f.var is not a key since bound vars are not free in f
    incoming = frozenset().union(*(t.fv for t in mapping.values()))
    var, body = f.var, f.body
    if var in incoming:
        new = pool.fresh_var(var)
        body = _subst(body, {var: Var(new)}, pool)
        var = new
    return type(f)(var, _subst(body, mapping, pool))


def substitute(f: Formula, v: str, t: Term, pool: VarPool | None = None) -> Formula:
    return substitute_many(f, {v: t}, pool)


def alpha_eq(f: Formula, g: Formula) -> bool:
    """Structural equality up to renaming of bound variables."""
    return _alpha(f, g, {}, {})


def _alpha_term(s: Term, t: Term, left: dict, right: dict) -> bool:
    if type(s) is not type(t):
        return False
    if isinstance(s, Var):
        a, b = left.get(s.name), right.get(t.name)
        if a is None and b is None:
            return s.name == t.name
        return a is not None and a == b
    if isinstance(s, Const):
        return s.value == t.value
    return all(_alpha_term(x, y, left, right) for x, y in zip(s.children(), t.children()))


def _alpha(f: Formula, g: Formula, left: dict, right: dict) -> bool:
    if type(f) is not type(g) or f.shape != g.shape:
        return False
    if isinstance(f, ATOMS):
        return all(_alpha_term(x, y, left, right) for x, y in zip(f.terms(), g.terms()))
    if isinstance(f, QUANTIFIERS):
        depth = object()
        return _alpha(f.body, g.body, {**left, f.var: depth}, {**right, g.var: depth})
    return all(_alpha(x, y, left, right) for x, y in zip(f.children(), g.children()))


def language_of(f: Formula) -> Language | None:
    """Smallest language containing every atom of f; None if O and B are mixed."""
    seen_o = seen_b = False
    for node in walk(f):
        seen_o |= isinstance(node, InO)
        seen_b |= isinstance(node, InB)
    if seen_o and seen_b:
        return None
    if seen_o:
        return Language.RING_O
    if seen_b:
        return Language.RING_B
    return Language.RING


def check_language(f: Formula, lang: Language) -> None:
    for node in walk(f):
        if isinstance(node, ATOMS) and not lang.allows(type(node)):
            raise UnknownPredicateError(
                f"atom {print_formula(node)} is not in {lang.value}")


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children()))


def stats(f: Formula) -> dict:
    def depth(n: Formula) -> int:
        kids = n.children()
        inner = max((depth(k) for k in kids), default=0)
        return inner + (1 if isinstance(n, QUANTIFIERS) else 0)

    nodes = list(walk(f))
    return {
        "nodes": f.size,
        "quantifiers": sum(isinstance(n, QUANTIFIERS) for n in nodes),
        "quantifier_depth": depth(f),
        "free_vars": sorted(f.fv),
        "language": (language_of(f) or Language.RING).value,
    }


# --------------------------------------------------------------------------
# printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Add):
        return f"(+ {print_term(t.left)} {print_term(t.right)})"
    if isinstance(t, Mul):
        return f"(* {print_term(t.left)} {print_term(t.right)})"
    if isinstance(t, Neg):
        return f"(- {print_term(t.arg)})"
    raise TypeError(t)


_HEADS = {Not: "not", And: "and", Or: "or", Imp: "imp", Exists: "exists", Forall: "forall"}


def print_formula(f: Formula) -> str:
    parts: list[str] = []
    _print(f, parts)
    return "".join(parts)


def _print(f: Formula, out: list) -> None:
    # iterative on the spine would be nicer; schema emissions stay well below
    # the recursion limit
    if isinstance(f, Eq):
        out.append(f"(= {print_term(f.left)} {print_term(f.right)})")
    elif isinstance(f, InO):
        out.append(f"(in-O {print_term(f.arg)})")
    elif isinstance(f, InB):
        out.append(f"(in-B {print_term(f.arg)})")
    elif isinstance(f, QUANTIFIERS):
        out.append(f"({_HEADS[type(f)]} {f.var} ")
        _print(f.body, out)
        out.append(")")
    else:
        out.append(f"({_HEADS[type(f)]}")
        for k in f.children():
            out.append(" ")
            _print(k, out)
        out.append(")")


def _pretty_term(t: Term, prec: int = 0) -> str:
    if isinstance(t, (Var, Const)):
        return print_term(t)
    if isinstance(t, Neg):
        return "−" + _pretty_term(t.arg, 3)
    if isinstance(t, Mul):
        s = f"{_pretty_term(t.left, 2)}·{_pretty_term(t.right, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(t.right, Neg):
        s = f"{_pretty_term(t.left, 1)} − {_pretty_term(t.right.arg, 2)}"
    else:
        s = f"{_pretty_term(t.left, 1)} + {_pretty_term(t.right, 1)}"
    return f"({s})" if prec > 1 else s


def pretty(f: Formula) -> str:
    """Infix rendering with logical symbols, for humans only."""
    if isinstance(f, Eq):
        return f"{_pretty_term(f.left)} = {_pretty_term(f.right)}"
    if isinstance(f, InO):
        return f"{_pretty_term(f.arg, 3)} ∈ O"
    if isinstance(f, InB):
        return f"{_pretty_term(f.arg, 3)} ∈ B"
    if isinstance(f, Not):
        return f"¬{_wrap(f.arg)}"
    if isinstance(f, QUANTIFIERS):
        sym = "∃" if isinstance(f, Exists) else "∀"
        return f"{sym}{f.var} {_wrap(f.body)}"
    sym = {And: " ∧ ", Or: " ∨ ", Imp: " → "}[type(f)]
    return f"{_wrap(f.left)}{sym}{_wrap(f.right)}"


def _wrap(f: Formula) -> str:
    s = pretty(f)
    return s if isinstance(f, (Not, *QUANTIFIERS)) else f"({s})"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_IDENT = re.compile(r"[^\W\d][\w*'.]*\Z")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            tok = m.group(1) or m.group(2) or m.group(3)
            if tok is not None:
                self.toks.append((tok, m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def offset(self, char_index: int) -> int:
        return len(self.text[:char_index].encode("utf-8"))

    def peek(self) -> tuple[str, int] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> tuple[str, int]:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError(f"unexpected end of input, expected {what}",
                                     self.offset(len(self.text)))
        self.i += 1
        return tok

    def expect(self, lit: str) -> None:
        tok, pos = self.next(repr(lit))
        if tok != lit:
            raise FormulaSyntaxError(f"expected {lit!r}, got {tok!r}", self.offset(pos))

    def fail(self, msg: str, pos: int):
        raise FormulaSyntaxError(msg, self.offset(pos))


def _parse_term(tk: _Tokens) -> Term:
    tok, pos = tk.next("term")
    if tok == "(":
        head, hpos = tk.next("operator")
        if head == "+":
            t = Add(_parse_term(tk), _parse_term(tk))
        elif head == "*":
            t = Mul(_parse_term(tk), _parse_term(tk))
        elif head == "-":
            t = Neg(_parse_term(tk))
        else:
            tk.fail(f"unknown term operator {head!r}", hpos)
        tk.expect(")")
        return t
    if tok in ("0", "1"):
        return Const(int(tok))
    if tok == ")" or not _IDENT.match(tok):
        tk.fail(f"bad term token {tok!r}", pos)
    return Var(tok)


def _parse_formula(tk: _Tokens, lang: Language | None) -> Formula:
    tk.expect("(")
    head, hpos = tk.next("connective")
    if head == "=":
        f: Formula = Eq(_parse_term(tk), _parse_term(tk))
    elif head in ("in-O", "in-B"):
        cls = InO if head == "in-O" else InB
        if lang is not None and not lang.allows(cls):
            raise UnknownPredicateError(
                f"predicate {head} not in {lang.value} at byte {tk.offset(hpos)}")
        f = cls(_parse_term(tk))
    elif head == "not":
        f = Not(_parse_formula(tk, lang))
    elif head in ("and", "or", "imp"):
        cls = {"and": And, "or": Or, "imp": Imp}[head]
        f = cls(_parse_formula(tk, lang), _parse_formula(tk, lang))
    elif head in ("exists", "forall"):
        var, vpos = tk.next("variable")
        if not _IDENT.match(var):
            tk.fail(f"bad bound variable {var!r}", vpos)
        cls = Exists if head == "exists" else Forall
        f = cls(var, _parse_formula(tk, lang))
    else:
        if head.startswith("in-"):
            raise UnknownPredicateError(f"unknown predicate {head} at byte {tk.offset(hpos)}")
        tk.fail(f"unknown connective {head!r}", hpos)
    tk.expect(")")
    return f


def parse_formula(text: str, language: Language | None = Language.RING_B) -> Formula:
    """Parse exactly one formula.

    ``language`` gates the O/B predicates; pass None to accept both.
    """
    tk = _Tokens(text)
    f = _parse_formula(tk, language)
    rest = tk.peek()
    if rest is not None:
        tk.fail(f"trailing input {rest[0]!r}", rest[1])
    return f


def parse_formulas(text: str, language: Language | None = Language.RING_B) -> list[Formula]:
    """One formula per non-blank line; lines starting with ';' are comments."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith(";"):
            out.append(parse_formula(line, language))
    return out


def parse_term(text: str) -> Term:
    tk = _Tokens(text)
    t = _parse_term(tk)
    rest = tk.peek()
    if rest is not None:
        tk.fail(f"trailing input {rest[0]!r}", rest[1])
    return t


def fresh_names(base: str, avoid: Iterable[str]) -> Iterator[str]:
    avoid = set(avoid)
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in avoid:
            yield name
