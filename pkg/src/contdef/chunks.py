"""Chunks of totally preordered abelian groups.

A subset T with tau in T is a tau-chunk when, for all a, b, c in T:
  1. -a is in T;
  2. a + b in [-c, c] implies a + b in T;
  3. every u in [-c, c] has exactly one xi in T with xi <= u < xi + tau.
Finite chunks are exactly the symmetric intervals {-n·tau, ..., n·tau}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import PAdicQ, as_fraction

MAX_ENUM_BOUND = 12


class AdditiveZ:
    """(Z, +, <=); the u of clause 3 range over the integer interval."""

    name = "additive-z"
    identity = 0
    sym = "+"

    def op(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def le(self, a, b) -> bool:
        return a <= b

    def key(self, a):
        return a

    def between(self, lo, hi) -> list:
        return list(range(lo, hi + 1)) if lo <= hi else []

    def positive(self, tau) -> bool:
        return tau > 0


class MultiplicativePAdic:
    """(Q^x, ·, <=) with x <= y iff v(x) <= v(y), i.e. |x| >= |y|.

    With this orientation a tau with |tau| < 1 is positive, and clause 3
    reads |xi·tau| < |u| <= |xi| as in the multiplicative formulas.  The u
    range over p^e·w for each e in the valuation interval and the unit
    representatives w.
    """

    identity = Fraction(1)
    sym = "·"

    def __init__(self, host: PAdicQ, units: Sequence = (1, 2)):
        self.host = host
        self.units = [as_fraction(w) for w in units]
        self.name = f"multiplicative-{host.name}"

    def op(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / as_fraction(a)

    def key(self, a):
        return self.host.valuation(a)

    def le(self, a, b) -> bool:
        return self.key(a) <= self.key(b)

    def between(self, lo, hi) -> list:
        a, b = self.key(lo), self.key(hi)
        p = Fraction(self.host.p)
        return [p ** e * w for e in range(a, b + 1) for w in self.units]

    def positive(self, tau) -> bool:
        return self.key(tau) > 0


@dataclass(frozen=True)
class ChunkResult:
    ok: bool
    clause: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


NOT_A_CHUNK = "NotAChunk"


def is_chunk(T: Iterable, tau, group=None) -> ChunkResult:
    group = group or AdditiveZ()
    T = list(dict.fromkeys(T))
    members = set(T)
    if tau not in members:
        raise ValueError("tau must belong to T")
    if not group.positive(tau):
        raise ValueError("tau must be positive in the group order")
    for a in T:
        if group.inv(a) not in members:
            return ChunkResult(False, 1, f"inverse of {a} missing")
    for c in T:
        lo, hi = group.inv(c), c
        if not group.le(lo, hi):
            continue
        for a, b in itertools.product(T, repeat=2):
            ab = group.op(a, b)
            if group.le(lo, ab) and group.le(ab, hi) and ab not in members:
                return ChunkResult(False, 2, f"{a} {group.sym} {b} = {ab} lies in [{lo}, {hi}] but not in T")
    for c in T:
        lo, hi = group.inv(c), c
        if not group.le(lo, hi):
            continue
        for u in group.between(lo, hi):
            hits = [xi for xi in T
                    if group.le(xi, u) and not group.le(group.op(xi, tau), u)]
            if len(hits) != 1:
                return ChunkResult(False, 3, f"u = {u} has {len(hits)} anchors in T")
    return ChunkResult(True)


def _index(a, tau, group) -> Fraction:
    if isinstance(group, MultiplicativePAdic):
        return Fraction(group.key(a), group.key(tau))
    return Fraction(a) / Fraction(tau)


def classify_finite_chunk(T: Iterable, tau, group=None) -> int | str:
    """n with T = {-n·tau, ..., n·tau}, or NOT_A_CHUNK."""
    group = group or AdditiveZ()
    T = list(dict.fromkeys(T))
    if tau not in T or not is_chunk(T, tau, group):
        return NOT_A_CHUNK
    n = max(_index(a, tau, group) for a in T)
    if n.denominator != 1:
        raise RuntimeError(f"chunk {T} is not made of multiples of tau")
    n = int(n)
    if isinstance(group, MultiplicativePAdic):
        shape = {tau ** k for k in range(-n, n + 1)}
    else:
        shape = {k * tau for k in range(-n, n + 1)}
    if set(T) != shape:
        raise RuntimeError(f"finite chunk {T} is not a symmetric interval")
    return n


def enumerate_chunks(n: int, group=None, tau=None, limit: int = MAX_ENUM_BOUND) -> list[tuple]:
    """Every chunk T inside {-n·tau..n·tau} (or {tau^-n..tau^n}) containing tau."""
    group = group or AdditiveZ()
    if n < 1:
        raise ValueError("bound must be positive")
    if n > limit:
        raise ValueError(f"bound {n} exceeds the enumeration guard {limit}")
    if tau is None:
        tau = Fraction(group.host.p) if isinstance(group, MultiplicativePAdic) else 1
    if isinstance(group, MultiplicativePAdic):
        universe = [tau ** k for k in range(-n, n + 1)]
    else:
        universe = [k * tau for k in range(-n, n + 1)]
    rest = [a for a in universe if a != tau]
    found = []
    for mask in range(1 << len(rest)):
        T = [tau] + [a for i, a in enumerate(rest) if mask >> i & 1]
        if is_chunk(T, tau, group):
            found.append(tuple(sorted(T, key=group.key)))
    return sorted(found, key=len)


def symmetric_intervals(n: int, group=None, tau=None) -> list[tuple]:
    group = group or AdditiveZ()
    if tau is None:
        tau = Fraction(group.host.p) if isinstance(group, MultiplicativePAdic) else 1
    if isinstance(group, MultiplicativePAdic):
        return [tuple(tau ** j for j in range(-k, k + 1)) for k in range(1, n + 1)]
    return [tuple(j * tau for j in range(-k, k + 1)) for k in range(1, n + 1)]


def transported(T: Sequence, tau, group: MultiplicativePAdic) -> bool:
    """Valuation-side view: v injective on T and v(T) a v(tau)-chunk of Z."""
    vals = [group.key(a) for a in T]
    if len(set(vals)) != len(vals):
        return False
    return bool(is_chunk(vals, group.key(tau), AdditiveZ()))
