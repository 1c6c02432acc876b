"""Symbolic piecewise functions on structured infinite domains.

Domains are balls in Q^m (ordered or p-adic), valuation-congruence classes
around a base point, affine pieces and axis boxes.  Functions are small
expression trees evaluated exactly at rational points.  Topological
claims (accumulation, boundedness near the base point) are checked on
scale-indexed samples: radii 2^-j in the ordered case, valuations j in the
p-adic case.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .scalars import Host, OrderedQ, PAdicQ, as_fraction, nu_m, parse_host

Point = tuple  # tuple of Fraction

NEG_INF = float("-inf")


def pt(*xs) -> Point:
    return tuple(as_fraction(x) for x in xs)


def vsub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def vadd(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def vscale(c, a: Point) -> Point:
    return tuple(c * x for x in a)


def scale(host: Host, j: int) -> Fraction:
    """The j-th sampling scale: 2^-j, or p^j for a p-adic host."""
    if isinstance(host, PAdicQ):
        return Fraction(host.p) ** j
    return Fraction(1, 2 ** j)


# ------------------------------------------------------------------ regions


class Region:
    def contains(self, x: Point, host: Host) -> bool:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _pts(p):
    return [str(c) for c in p]


@dataclass(frozen=True)
class ClosedBall(Region):
    center: Point
    radius: Fraction

    def contains(self, x, host):
        return host.norm(vsub(x, self.center)) <= self.radius

    def to_dict(self):
        return {"kind": "closed-ball", "center": _pts(self.center), "radius": str(self.radius)}


@dataclass(frozen=True)
class OpenBall(Region):
    center: Point
    radius: Fraction

    def contains(self, x, host):
        return host.norm(vsub(x, self.center)) < self.radius

    def to_dict(self):
        return {"kind": "open-ball", "center": _pts(self.center), "radius": str(self.radius)}


@dataclass(frozen=True)
class Complement(Region):
    inner: Region

    def contains(self, x, host):
        return not self.inner.contains(x, host)

    def to_dict(self):
        return {"kind": "complement", "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Intersection(Region):
    parts: tuple

    def contains(self, x, host):
        return all(r.contains(x, host) for r in self.parts)

    def to_dict(self):
        return {"kind": "intersection", "parts": [r.to_dict() for r in self.parts]}


@dataclass(frozen=True)
class Union(Region):
    parts: tuple

    def contains(self, x, host):
        return any(r.contains(x, host) for r in self.parts)

    def to_dict(self):
        return {"kind": "union", "parts": [r.to_dict() for r in self.parts]}


@dataclass(frozen=True)
class ValCongruence(Region):
    """x != base with v(x - base) >= floor and v(x - base) ≡ residue mod modulus."""

    base: Point
    residue: int
    modulus: int
    floor: int = 0

    def contains(self, x, host):
        if not isinstance(host, PAdicQ):
            raise TypeError("valuation classes need a p-adic host")
        v = host.valuation(x[0] - self.base[0])
        return v is not None and v >= self.floor and (v - self.residue) % self.modulus == 0

    def to_dict(self):
        return {"kind": "val-congruence", "base": _pts(self.base), "residue": self.residue,
                "modulus": self.modulus, "floor": self.floor}


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class AffinePiece(Region):
    """point + span(directions)."""

    point: Point
    directions: tuple = ()

    @property
    def dim(self) -> int:
        return _rank([list(d) for d in self.directions]) if self.directions else 0

    def contains(self, x, host=None):
        d = [list(v) for v in self.directions]
        return _rank(d + [list(vsub(x, self.point))]) == self.dim

    def to_dict(self):
        return {"kind": "affine", "point": _pts(self.point),
                "directions": [_pts(d) for d in self.directions]}


@dataclass(frozen=True)
class Singleton(Region):
    point: Point

    def contains(self, x, host=None):
        return tuple(x) == tuple(self.point)

    def to_dict(self):
        return {"kind": "singleton", "point": _pts(self.point)}


@dataclass(frozen=True)
class Box(Region):
    """Closed axis box; coordinates with lo == hi are degenerate."""

    lo: Point
    hi: Point

    @property
    def dim(self) -> int:
        return sum(a < b for a, b in zip(self.lo, self.hi))

    def contains(self, x, host=None):
        return all(a <= c <= b for a, b, c in zip(self.lo, self.hi, x))

    def to_dict(self):
        return {"kind": "box", "lo": _pts(self.lo), "hi": _pts(self.hi)}


def region_from_dict(d: dict) -> Region:
    k = d["kind"]
    P = lambda xs: tuple(as_fraction(c) for c in xs)  # noqa: E731
    if k == "closed-ball":
        return ClosedBall(P(d["center"]), as_fraction(d["radius"]))
    if k == "open-ball":
        return OpenBall(P(d["center"]), as_fraction(d["radius"]))
    if k == "complement":
        return Complement(region_from_dict(d["inner"]))
    if k == "intersection":
        return Intersection(tuple(region_from_dict(r) for r in d["parts"]))
    if k == "union":
        return Union(tuple(region_from_dict(r) for r in d["parts"]))
    if k == "val-congruence":
        return ValCongruence(P(d["base"]), d["residue"], d["modulus"], d.get("floor", 0))
    if k == "affine":
        return AffinePiece(P(d["point"]), tuple(P(v) for v in d["directions"]))
    if k == "singleton":
        return Singleton(P(d["point"]))
    if k == "box":
        return Box(P(d["lo"]), P(d["hi"]))
    raise ValueError(f"unknown region kind {k!r}")


# -------------------------------------------------------------- expressions


class Expr:
    def __call__(self, x: Point, host: Host) -> Fraction:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __add__(self, o):
        return Plus(self, o)

    def __sub__(self, o):
        return Minus(self, o)

    def __mul__(self, o):
        return Times(self, o)

    def __truediv__(self, o):
        return Quot(self, o)


@dataclass(frozen=True)
class Coord(Expr):
    i: int

    def __call__(self, x, host):
        return x[self.i]

    def to_dict(self):
        return {"op": "coord", "i": self.i}


@dataclass(frozen=True)
class Lit(Expr):
    c: Fraction

    def __call__(self, x, host):
        return self.c

    def to_dict(self):
        return {"op": "lit", "c": str(self.c)}


def _binop(name: str, fn):
    @dataclass(frozen=True)
    class B(Expr):
        a: Expr
        b: Expr

        def __call__(self, x, host):
            return fn(self.a(x, host), self.b(x, host))

        def to_dict(self):
            return {"op": name, "args": [self.a.to_dict(), self.b.to_dict()]}

    B.__name__ = B.__qualname__ = name.capitalize()
    return B


def _div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by a vanishing piece")
    return a / b


Plus = _binop("plus", lambda a, b: a + b)
Minus = _binop("minus", lambda a, b: a - b)
Times = _binop("times", lambda a, b: a * b)
Quot = _binop("quot", _div)


@dataclass(frozen=True)
class Nu(Expr):
    """nu_m of the argument list."""

    args: tuple

    def __call__(self, x, host):
        return nu_m([a(x, host) for a in self.args], host)

    def to_dict(self):
        return {"op": "nu", "args": [a.to_dict() for a in self.args]}


def _ordered_only(host):
    if not host.ordered:
        raise TypeError("max/min/abs need an ordered host")


@dataclass(frozen=True)
class Max(Expr):
    args: tuple

    def __call__(self, x, host):
        _ordered_only(host)
        return max(a(x, host) for a in self.args)

    def to_dict(self):
        return {"op": "max", "args": [a.to_dict() for a in self.args]}


@dataclass(frozen=True)
class Min(Expr):
    args: tuple

    def __call__(self, x, host):
        _ordered_only(host)
        return min(a(x, host) for a in self.args)

    def to_dict(self):
        return {"op": "min", "args": [a.to_dict() for a in self.args]}


@dataclass(frozen=True)
class Abs(Expr):
    a: Expr

    def __call__(self, x, host):
        _ordered_only(host)
        return abs(self.a(x, host))

    def to_dict(self):
        return {"op": "abs", "args": [self.a.to_dict()]}


@dataclass(frozen=True)
class NormOf(Expr):
    """||x - center|| as a field element (ordered host)."""

    center: Point

    def __call__(self, x, host):
        _ordered_only(host)
        return host.norm(vsub(x, self.center))

    def to_dict(self):
        return {"op": "norm", "center": _pts(self.center)}


@dataclass(frozen=True)
class Indicator(Expr):
    region: Region

    def __call__(self, x, host):
        return Fraction(1) if self.region.contains(x, host) else Fraction(0)

    def to_dict(self):
        return {"op": "indicator", "region": self.region.to_dict()}


@dataclass(frozen=True)
class Piecewise(Expr):
    """First matching case wins; ``default`` applies otherwise."""

    cases: tuple
    default: Expr

    def __call__(self, x, host):
        for region, e in self.cases:
            if region.contains(x, host):
                return e(x, host)
        return self.default(x, host)

    def to_dict(self):
        return {"op": "piecewise",
                "cases": [[r.to_dict(), e.to_dict()] for r, e in self.cases],
                "default": self.default.to_dict()}


PiecewiseFn = Piecewise


class Memo(Expr):
    """Caches values of a shared subexpression by evaluation point."""

    def __init__(self, inner: Expr):
        self.inner = inner
        self._cache: dict = {}

    def __call__(self, x, host):
        key = (tuple(x), host.name)
        if key not in self._cache:
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = self.inner(x, host)
        return self._cache[key]

    def __eq__(self, o):
        return isinstance(o, Memo) and o.inner == self.inner

    def __hash__(self):
        return hash(self.inner)

    def __repr__(self):
        return f"Memo({self.inner!r})"

    def to_dict(self):
        return self.inner.to_dict()

ZERO_E = Lit(Fraction(0))
ONE_E = Lit(Fraction(1))


def expr_from_dict(d: dict) -> Expr:
    op = d["op"]
    if op == "coord":
        return Coord(d["i"])
    if op == "lit":
        return Lit(as_fraction(d["c"]))
    if op in ("plus", "minus", "times", "quot"):
        a, b = (expr_from_dict(x) for x in d["args"])
        return {"plus": Plus, "minus": Minus, "times": Times, "quot": Quot}[op](a, b)
    if op in ("nu", "max", "min"):
        return {"nu": Nu, "max": Max, "min": Min}[op](tuple(expr_from_dict(x) for x in d["args"]))
    if op == "abs":
        return Abs(expr_from_dict(d["args"][0]))
    if op == "norm":
        return NormOf(tuple(as_fraction(c) for c in d["center"]))
    if op == "indicator":
        return Indicator(region_from_dict(d["region"]))
    if op == "piecewise":
        return Piecewise(tuple((region_from_dict(r), expr_from_dict(e)) for r, e in d["cases"]),
                         expr_from_dict(d["default"]))
    raise ValueError(f"unknown expression op {op!r}")


def coords(m: int) -> list[Expr]:
    return [Coord(i) for i in range(m)]


def shifted(a: Point) -> list[Expr]:
    return [Minus(Coord(i), Lit(c)) for i, c in enumerate(a)]


def product(es: Sequence[Expr]) -> Expr:
    out: Expr = ONE_E
    for e in es:
        out = e if out is ONE_E else Times(out, e)
    return out


# ------------------------------------------------------------ dirac functions


@dataclass(frozen=True)
class Diracs:
    delta_a: Expr
    delta_B: Expr
    delta_B0c: Expr
    delta_B_B0: Expr


def dirac_functions(a: Point, r_B: Fraction, r_B0: Fraction, host: Host) -> Diracs:
    """delta_a, delta_B, delta_{B0^c}, delta_{B,B0} for the closed ball B and
    open ball B0 centered at a with radii r_B < r_B0 (sizes)."""
    a = tuple(as_fraction(c) for c in a)
    if isinstance(r_B, ClosedBall):
        r_B = r_B.radius
    if isinstance(r_B0, OpenBall):
        r_B0 = r_B0.radius
    r_B, r_B0 = as_fraction(r_B), as_fraction(r_B0)
    if not r_B < r_B0:
        raise ValueError("the closed ball B must lie inside B0 (need r_B < r_B0)")
    delta_a = Nu(tuple(shifted(a)))
    B, B0 = ClosedBall(a, r_B), OpenBall(a, r_B0)
    if host.ordered:
        n = NormOf(a)
        delta_B = Max((ZERO_E, Minus(n, Lit(r_B))))
        delta_B0c = Max((ZERO_E, Minus(Lit(r_B0), n)))
        ramp = Quot(Minus(Lit(r_B0), n), Lit(r_B0 - r_B))
        delta_B_B0 = Max((ZERO_E, Min((ONE_E, ramp))))
    else:
        delta_B = Indicator(Complement(B))
        delta_B0c = Indicator(B0)
        delta_B_B0 = Indicator(B)
    return Diracs(delta_a, delta_B, delta_B0c, delta_B_B0)


# ---------------------------------------------------------------- witnesses


@dataclass
class GermWitness:
    """Functions s_i and separating functions delta_i at p0.

    ``branch`` (i, j) yields sample points of S_i at scale j, ``probes`` (j)
    yields further points at scale j (off the germs, or anywhere).
    """

    p0: Point
    s_list: list
    delta_list: list
    host: Host
    branch: Callable[[int, int], list]
    probes: Callable[[int], list]
    domain: Region | None = None
    kind: str = "custom"

    @property
    def k(self) -> int:
        return len(self.s_list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "host": self.host.name, "p0": _pts(self.p0),
                "s": [s.to_dict() for s in self.s_list],
                "delta": [d.to_dict() for d in self.delta_list]}


def germs_open_affine(k: int, p0: Sequence, host: Host | None = None) -> GermWitness:
    """k lines through p0 in K^r, r >= 2, with H = {x_r = p0_r}.

    Line L_i has direction e_1 + i·e_r; sigma_i projects onto L_i along H and
    s_i = nu_r(x - sigma_i(x)).  The separating function is
    delta_i = prod_{j != i} s_j^2 / (s_i^2 + s_j^2), which is 1 on L_i, 0 on
    L_j and bounded by 1.
    """
    host = host or OrderedQ()
    p0 = tuple(as_fraction(c) for c in p0)
    r = len(p0)
    if r < 2:
        raise ValueError("open-affine germs need r >= 2")
    if k < 1:
        raise ValueError("k must be positive")
    dirs = []
    for i in range(1, k + 1):
        d = [Fraction(0)] * r
        d[0] = Fraction(1)
        d[-1] = Fraction(i)
        dirs.append(tuple(d))
    X = coords(r)
    s_list = []
    for i, d in enumerate(dirs, start=1):
        t = Quot(Minus(X[-1], Lit(p0[-1])), Lit(Fraction(i)))
        comps = tuple(Minus(Minus(X[c], Lit(p0[c])), Times(t, Lit(d[c]))) for c in range(r))
        s_list.append(Memo(Nu(comps)))
    deltas = []
    for i in range(k):
        factors = []
        for j in range(k):
            if j != i:
                sj2 = Times(s_list[j], s_list[j])
                factors.append(Quot(sj2, Plus(Times(s_list[i], s_list[i]), sj2)))
        delta = product(factors)
        deltas.append(Piecewise(((Singleton(p0), ZERO_E),), delta))

    def branch(i: int, j: int) -> list:
        t = scale(host, j)
        return [vadd(p0, vscale(t, dirs[i])), vadd(p0, vscale(-t, dirs[i]))]

    def probes(j: int) -> list:
        t = scale(host, j)
        out = []
        # points of H, and directions strictly between the lines
        for d in ([1] + [0] * (r - 1), [0] * (r - 1) + [1], [1] + [0] * (r - 2) + [Fraction(1, 2)],
                  [1] + [1] * (r - 2) + [Fraction(2 * k + 1, 2)], [-1] + [0] * (r - 2) + [3]):
            out.append(vadd(p0, vscale(t, tuple(as_fraction(c) for c in d))))
        return out

    return GermWitness(p0, s_list, deltas, host, branch, probes, kind="open-affine")


def germs_valued_congruence(k: int, p0, host: PAdicQ) -> GermWitness:
    """S_i = {x : v(x - p0) >= 0, v(x - p0) ≡ i mod k}, i = 1..k.

    s_i is 0 on S_i and x - p0 elsewhere; delta_i is the indicator of S_i.
    """
    if not isinstance(host, PAdicQ):
        raise TypeError("valuation-congruence germs need a p-adic host")
    if k < 1:
        raise ValueError("k must be positive")
    p0 = (as_fraction(p0[0] if isinstance(p0, (tuple, list)) else p0),)
    S = [ValCongruence(p0, i % k, k, 0) for i in range(1, k + 1)]
    x = Minus(Coord(0), Lit(p0[0]))
    s_list = [Piecewise(((S[i], ZERO_E),), x) for i in range(k)]
    deltas = [Indicator(S[i]) for i in range(k)]
    P = Fraction(host.p)

    def branch(i: int, j: int) -> list:
        v = (i + 1) + k * j
        return [(p0[0] + P ** v,), (p0[0] - 2 * P ** v,)]

    def probes(j: int) -> list:
        return [(p0[0] + P ** (-j - 1),), (p0[0] + P ** j * (P + 1),)]

    return GermWitness(p0, s_list, deltas, host, branch, probes, kind="valued-congruence")


# -------------------------------------------------------- separation checks


@dataclass
class SeparationReport:
    S1: bool
    S2: bool
    S3: bool
    S4: bool
    bound: Fraction
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.S1 and self.S2 and self.S3 and self.S4

    def to_dict(self) -> dict:
        return {"S1": self.S1, "S2": self.S2, "S3": self.S3, "S4": self.S4,
                "sup_delta": str(self.bound), "ok": self.ok, "details": self.details[:20]}


def check_separated(w: GermWitness, depth: int = 12, bound: Fraction = Fraction(1000)) -> SeparationReport:
    """Sampled verdicts for (S1)-(S4) at scales 1..depth."""
    if depth < 1:
        raise ValueError("sampling plan is empty")
    host, k = w.host, w.k
    ok = {1: True, 2: True, 3: True, 4: True}
    details = []
    sup = Fraction(0)
    deepest = [False] * k

    def fail(ax, msg):
        ok[ax] = False
        details.append(f"S{ax}: {msg}")

    for i in range(k):
        if w.s_list[i](w.p0, host) != 0:
            fail(2, f"s_{i + 1}(p0) != 0")
    for j in range(1, depth + 1):
        for i in range(k):
            for x in w.branch(i, j):
                if x == w.p0:
                    fail(2, f"branch sample {i + 1} at scale {j} is p0")
                    continue
                zeros = [m for m in range(k) if w.s_list[m](x, host) == 0]
                if i not in zeros:
                    fail(2, f"s_{i + 1} nonzero at its scale-{j} sample {x}")
                elif j == depth:
                    deepest[i] = True
                if len(zeros) > 1:
                    fail(1, f"s_{[m + 1 for m in zeros]} share the zero {x}")
                for m in range(k):
                    val = w.delta_list[m](x, host)
                    want = 1 if m == i else 0
                    if i in zeros and val != want:
                        fail(3, f"delta_{m + 1}({x}) = {val}, expected {want}")
                    sup = max(sup, host.size(val))
        for x in w.probes(j):
            if x == w.p0:
                continue
            zeros = [m for m in range(k) if w.s_list[m](x, host) == 0]
            if len(zeros) > 1:
                fail(1, f"probe {x} is a common zero of {[m + 1 for m in zeros]}")
            for m in range(k):
                sup = max(sup, host.size(w.delta_list[m](x, host)))
    for i in range(k):
        if not deepest[i]:
            fail(2, f"no zero of s_{i + 1} sampled at the finest scale")
    if sup > bound:
        fail(4, f"|delta| reaches {sup} > {bound}")
    return SeparationReport(ok[1], ok[2], ok[3], ok[4], sup, details)


def mutate_delta(w: GermWitness, i: int, on_branch: int, value=2) -> GermWitness:
    """Copy of w whose delta_i is overwritten with ``value`` near branch ``on_branch``."""
    samples = [x for j in range(1, 64) for x in w.branch(on_branch, j)]
    bad = Union(tuple(Singleton(x) for x in samples))
    deltas = list(w.delta_list)
    deltas[i] = Piecewise(((bad, Lit(as_fraction(value))),), deltas[i])
    return GermWitness(w.p0, list(w.s_list), deltas, w.host, w.branch, w.probes, w.domain,
                       w.kind + "+mutant")


def isolate_zero(w: GermWitness, i: int) -> GermWitness:
    """Copy of w whose s_i only vanishes at p0."""
    s = list(w.s_list)
    s[i] = Nu(tuple(shifted(w.p0)))
    return GermWitness(w.p0, s, list(w.delta_list), w.host, w.branch, w.probes, w.domain,
                       w.kind + "+isolated")


def globalize(w: GermWitness, r_B: Fraction, r_B0: Fraction) -> GermWitness:
    """Ambient witnesses from local ones: s_i = nu_2(delta_B, h·v_i) with the
    plateau h = delta_{B,B0}; separating functions h·d_i."""
    D = dirac_functions(w.p0, r_B, r_B0, w.host)
    B0 = OpenBall(w.p0, as_fraction(r_B0))
    h = D.delta_B_B0
    B = ClosedBall(w.p0, as_fraction(r_B))
    s_list, deltas = [], []
    for v, d in zip(w.s_list, w.delta_list):
        u = Piecewise(((B0, Times(h, v)),), ZERO_E)
        s_list.append(Nu((D.delta_B, u)))
        deltas.append(Piecewise(((Intersection((B0, Complement(Singleton(w.p0)))), Times(h, d)),),
                                ZERO_E))

    def branch(i: int, j: int) -> list:
        return [x for x in w.branch(i, j) if B.contains(x, w.host)]

    return GermWitness(w.p0, s_list, deltas, w.host, branch, w.probes, w.domain,
                       w.kind + "+global")


# ------------------------------------------------------------ limit values


class LimitError(ValueError):
    pass


def limit_construction(ls: Sequence, w: GermWitness) -> tuple[Expr, Expr, Expr]:
    """f = sum l_i·delta_i·p and g = p with p = delta_{p0}; also s = prod s_i."""
    if len(ls) > w.k:
        raise ValueError("need at least as many germs as limit values")
    p = Nu(tuple(shifted(w.p0)))
    terms = [Times(Times(Lit(as_fraction(l)), w.delta_list[i]), p) for i, l in enumerate(ls)]
    total = terms[0]
    for t in terms[1:]:
        total = Plus(total, t)
    f = Piecewise(((Singleton(w.p0), ZERO_E),), total)
    s = product(w.s_list[:len(ls)])
    return f, p, s


def limit_values(f: Expr, g: Expr, w: GermWitness, depth: int = 12,
                 branches: Iterable[int] | None = None) -> set:
    """Values of f/g along each sampled S_i, required constant across scales."""
    host = w.host
    out = set()
    for i in (range(w.k) if branches is None else branches):
        seen = set()
        for j in range(1, depth + 1):
            for x in w.branch(i, j):
                gx = g(x, host)
                if gx == 0:
                    raise LimitError(f"g vanishes at the S_{i + 1} sample {x}")
                seen.add(f(x, host) / gx)
        if len(seen) != 1:
            raise LimitError(f"f/g is not constant along S_{i + 1}: {sorted(seen)[:4]}")
        out |= seen
    return out


# --------------------------------------------------------- local dimension


def local_dim(pieces: Sequence[Region], x: Point) -> float | int:
    """Local dimension at x of a finite union of closed boxes and affine pieces."""
    x = tuple(as_fraction(c) for c in x)
    dims = []
    for P in pieces:
        if not isinstance(P, (Box, AffinePiece)):
            raise TypeError(f"unsupported region kind {type(P).__name__}")
        if P.contains(x):
            dims.append(P.dim)
    return max(dims) if dims else NEG_INF


local_dim_oracle = local_dim


def _flat_dirs(P: Region) -> list:
    if isinstance(P, Box):
        m = len(P.lo)
        return [tuple(Fraction(int(c == i)) for c in range(m))
                for i in range(m) if P.lo[i] < P.hi[i]]
    return [d for d in P.directions]


def in_W(pieces: Sequence[Region], x: Point, eps: Fraction = Fraction(1, 1024)) -> int | None:
    """d if x is in W_d of the union (for box/affine shapes), else None.

    Criterion: all pieces through x span one d-flat and every point
    x + eps·sum(c_i·e_i), c_i in {-1,0,1}, over a basis of that flat lies in
    the union.
    """
    x = tuple(as_fraction(c) for c in x)
    through = [P for P in pieces if P.contains(x)]
    if not through:
        return None
    d = local_dim(pieces, x)
    dirs = []
    for P in through:
        dirs += _flat_dirs(P)
    if dirs and _rank([list(v) for v in dirs]) != d:
        return None
    basis = []
    for v in dirs:
        if _rank([list(b) for b in basis + [v]]) > len(basis):
            basis.append(v)
    for cs in itertools.product((-1, 0, 1), repeat=len(basis)):
        y = x
        for c, b in zip(cs, basis):
            y = vadd(y, vscale(eps * c, b))
        if not any(P.contains(y) for P in pieces):
            return None
    # a coordinate projection onto pivot coordinates of the flat is injective
    return d


def density_spot_check(pieces: Sequence[Region], x: Point, depth: int = 8) -> bool:
    """Near x in Delta_k, points of W_k exist at every sampled scale."""
    k = local_dim(pieces, x)
    if k == NEG_INF:
        return False
    x = tuple(as_fraction(c) for c in x)
    m = len(x)
    dirs = [tuple(Fraction(int(c == i)) for c in range(m)) for i in range(m)]
    # skew directions in every orthant, so corners see the interior
    dirs += [tuple(Fraction(sg[c], 3 + c) for c in range(m))
             for sg in itertools.product((1, -1), repeat=m)]
    for j in range(1, depth + 1):
        t = Fraction(1, 2 ** j)
        cands = [x] + [vadd(x, vscale(s * t, d)) for d in dirs for s in (1, -1)]
        cands += [vadd(x, vscale(t, tuple(c for c in d))) for d in
                  [_dd for P in pieces if P.contains(x) for _dd in _flat_dirs(P)]]
        if not any(in_W(pieces, y, eps=t / 64) == k for y in cands
                   if any(P.contains(y) for P in pieces)):
            return False
    return True


def dim_of(pieces: Sequence[Region]) -> float | int:
    return max((P.dim for P in pieces), default=NEG_INF)


def project_boxes(pieces: Sequence[Box], coords_: Sequence[int]) -> list[Box]:
    return [Box(tuple(P.lo[c] for c in coords_), tuple(P.hi[c] for c in coords_)) for P in pieces]
