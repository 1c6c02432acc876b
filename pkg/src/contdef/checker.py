"""Three-valued bounded evaluation of formulas over function rings.

A model interprets variables as functions on a finite set of points.  For
FiniteRing models the points are the whole space, so the ring is K^X and
every subset is a zero set.  SymbolicGerm models sample a p-adic germ
domain; there the points are a finite sample and topological notions
(isolation, limit values) are read off the sample's deepest layers.

Quantifiers over the ring are decided in two ways:

* generic branches: each coordinate of the bound value is either 0 or a
  fresh nonzero indeterminate.  An atom whose truth depends on the value of
  an indeterminate raises ``Split`` with the finitely many rational roots
  that matter, and the owning binder refines the branch.  This is exact for
  univariate dependencies and yields Unknown otherwise;
* a witness pool of concrete candidate functions.

Recognized schema instances (matched modulo renaming of bound variables)
are decided by their zero-set meaning rather than expanded.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import schemas as S
from .chunks import (AdditiveZ, MultiplicativePAdic, classify_finite_chunk, enumerate_chunks,
                     is_chunk, symmetric_intervals)
from .formula import (Add, And, Const, Eq, Exists, Forall, Formula, Imp, InB, InO, Language,
                      Mul, Neg, Not, Or, Term, Var, alpha_eq, language_of, parse_formula,
                      print_formula, stats, ONE, ZERO)
from .germs import (Expr, GermWitness, check_separated, germs_open_affine,
                    germs_valued_congruence, limit_construction, limit_values, mutate_delta)
from .ring import (HomogenizedProvider, IdealGens, PointSet, RingElement, ValuedProvider,
                   combine, jac_oracle, zero_set, zero_set_inclusion)
from .scalars import Host, OrderedQ, PAdicQ, as_fraction, homogenize, rational_roots, uv_valued

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


# ------------------------------------------------------------ polynomials


class Poly:
    """Sparse polynomial in indeterminates; keys are sorted ((id, exp), ...)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    @staticmethod
    def indet(i: int) -> "Poly":
        return Poly({((i, 1),): Fraction(1)})

    def indets(self) -> set:
        return {i for mono in self.terms for i, _ in mono}

    def univariate(self, a: int) -> list:
        deg = max(e for mono in self.terms for _, e in mono) if self.terms else 0
        cs = [Fraction(0)] * (deg + 1)
        for mono, c in self.terms.items():
            cs[mono[0][1] if mono else 0] += c
        return cs

    def subst(self, a: int, r: Fraction):
        out: dict = {}
        for mono, c in self.terms.items():
            k, rest = c, []
            for i, e in mono:
                if i == a:
                    k = k * r ** e
                else:
                    rest.append((i, e))
            if k:
                key = tuple(rest)
                out[key] = out.get(key, 0) + k
        return _norm(out)

    def __str__(self) -> str:
        parts = []
        for mono, c in sorted(self.terms.items()):
            m = "·".join(f"a{i}" + (f"^{e}" if e > 1 else "") for i, e in mono)
            parts.append(f"{c}·{m}" if m and c != 1 else (m or str(c)))
        return " + ".join(parts)

    __repr__ = __str__


def _norm(d: dict):
    d = {k: v for k, v in d.items() if v != 0}
    if not d:
        return Fraction(0)
    if len(d) == 1 and () in d:
        return d[()]
    return Poly(d)


def _terms(x) -> dict:
    return x.terms if isinstance(x, Poly) else ({(): x} if x else {})


def c_add(x, y):
    if not isinstance(x, Poly) and not isinstance(y, Poly):
        return x + y
    d = dict(_terms(x))
    for k, v in _terms(y).items():
        d[k] = d.get(k, 0) + v
    return _norm(d)


def c_neg(x):
    if not isinstance(x, Poly):
        return -x
    return Poly({k: -v for k, v in x.terms.items()})


def _mono_mul(m1, m2):
    d = dict(m1)
    for i, e in m2:
        d[i] = d.get(i, 0) + e
    return tuple(sorted(d.items()))


def c_mul(x, y):
    if not isinstance(x, Poly) and not isinstance(y, Poly):
        return x * y
    out: dict = {}
    for k1, v1 in _terms(x).items():
        for k2, v2 in _terms(y).items():
            k = _mono_mul(k1, k2)
            out[k] = out.get(k, 0) + v1 * v2
    return _norm(out)


def v_add(a, b):
    return tuple(c_add(x, y) for x, y in zip(a, b))


def v_mul(a, b):
    return tuple(c_mul(x, y) for x, y in zip(a, b))


def v_neg(a):
    return tuple(c_neg(x) for x in a)


def concrete(v) -> bool:
    return not any(isinstance(c, Poly) for c in v)


def show(v) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


# ------------------------------------------------------------- exceptions


class Split(Exception):
    def __init__(self, indet: int, roots: tuple):
        self.indet, self.roots = indet, roots


class OSplit(Exception):
    def __init__(self, indet: int):
        self.indet = indet


class Indefinite(Exception):
    pass


class BudgetExceeded(Exception):
    pass


@dataclass
class Cons:
    excl: frozenset
    o: bool | None = None


# ------------------------------------------------------------------ models


class Model:
    kind = "model"
    host: Host
    labels: tuple
    max_generic_points = 4

    @property
    def n(self) -> int:
        return len(self.labels)

    def const(self, c) -> tuple:
        return (as_fraction(c),) * self.n

    def lemma(self, name: str):
        return None

    def describe(self) -> str:
        return self.kind


class FiniteRing(Model):
    """K^X for a finite discrete X."""

    kind = "finite-ring"

    def __init__(self, host: Host, n_or_labels, elements: dict | None = None):
        if isinstance(n_or_labels, int):
            self.points = PointSet.of_size(n_or_labels)
        else:
            self.points = PointSet(tuple(n_or_labels))
        self.labels = self.points.labels
        self.host = host
        self.elements = {k: self.vec(v) for k, v in (elements or {}).items()}

    def vec(self, v) -> tuple:
        if isinstance(v, RingElement):
            v = v.values
        v = tuple(as_fraction(c) for c in v)
        if len(v) != self.n:
            raise ValueError("element length differs from the point count")
        return v

    def lemma(self, name):
        return FINITE_LEMMAS.get(name)

    def describe(self) -> str:
        els = ",".join(f"{k}={show(v)}" for k, v in sorted(self.elements.items()))
        return f"finite-ring[{self.host.name}; |X|={self.n}; {els}]"


class SymbolicGerm(Model):
    """Sampled germ domain around p0 in a p-adic host.

    The sample holds p0, two points per (branch, layer) of the valuation
    classes v(x - p0) ≡ i mod K, K = 2N + 1, and two points outside the unit
    ball.  The last ``tail`` layers stand for "arbitrarily close to p0".
    """

    kind = "symbolic-germ"
    max_generic_points = 0

    def __init__(self, host: PAdicQ | None = None, p0=0, N: int = 6, layers: int = 4,
                 tail: int = 2, tau=None):
        self.host = host or PAdicQ(3)
        self.p0 = (as_fraction(p0),)
        self.N, self.K, self.layers, self.tail = N, 2 * N + 1, layers, tail
        self.tau = as_fraction(tau if tau is not None else self.host.p)
        self.witness = germs_valued_congruence(self.K, self.p0, self.host)
        pts, info = [self.p0], [("p0", None, None)]
        for j in range(layers):
            for i in range(self.K):
                for x in self.witness.branch(i, j):
                    pts.append(x)
                    info.append(("b", i, j))
        for x in self.witness.probes(0):
            pts.append(x)
            info.append(("far", None, None))
        self.sample = pts
        self.info = info
        self.labels = tuple(f"x{i}" for i in range(len(pts)))
        self.elements: dict = {}
        self.hints: dict = {}

    def eval_expr(self, e: Expr) -> tuple:
        return tuple(as_fraction(e(x, self.host)) for x in self.sample)

    def tail_index(self, i: int) -> bool:
        kind, _, layer = self.info[i]
        return kind == "b" and layer >= self.layers - self.tail

    def limit_witnesses(self) -> dict:
        """f_n, g = p and s_n realizing {tau^-n, ..., tau^n} as limit values."""
        fs, ss = [], []
        for n in range(1, self.N + 1):
            ls = [self.tau ** k for k in range(-n, n + 1)]
            f, p, s = limit_construction(ls, self.witness)
            fs.append(self.eval_expr(f))
            ss.append(self.eval_expr(s))
        p_vec = self.eval_expr(limit_construction([1], self.witness)[1])
        return {"f": fs, "g": [p_vec], "s": ss}

    def lemma(self, name):
        return GERM_LEMMAS.get(name) or FINITE_LEMMAS.get(name)

    def describe(self) -> str:
        els = ",".join(f"{k}(p0)={v[0]}" for k, v in sorted(self.elements.items()))
        return (f"symbolic-germ[{self.host.name}; p0={self.p0[0]}; K={self.K}; "
                f"layers={self.layers}; {els}]")


def germ_model(h_at_p0, tau=3, N: int = 6, p0=0, host: PAdicQ | None = None) -> SymbolicGerm:
    """SymbolicGerm with h = constant h(p0), p = x - p0, tau* = constant tau."""
    m = SymbolicGerm(host, p0, N=N, tau=tau)
    key = (m.host.name, m.p0, N, m.tau)
    if key not in _HINTS:
        _HINTS[key] = m.limit_witnesses()
    m.hints = _HINTS[key]
    m.hint_labels = {v: f"{var}_{i + 1}" if len(vs) > 1 else var
                     for var, vs in m.hints.items() for i, v in enumerate(vs)}
    m.elements = {"h": m.const(h_at_p0), "p": m.hints["g"][0], S.TAU: m.const(tau)}
    return m


_HINTS: dict = {}


# ------------------------------------------------------------------ verdict


@dataclass
class Verdict:
    kind: str
    witness: dict | None = None
    counterexample: dict | None = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.kind == HOLDS

    @property
    def fails(self) -> bool:
        return self.kind == FAILS

    def to_dict(self) -> dict:
        d = {"verdict": self.kind}
        if self.witness:
            d["witness"] = self.witness
        if self.counterexample:
            d["counterexample"] = self.counterexample
        if self.reason:
            d["reason"] = self.reason
        return d


def _t3(b: bool | None) -> str:
    return UNKNOWN if b is None else HOLDS if b else FAILS


# --------------------------------------------------------- lemma matching


def _lemma_schemas() -> list:
    out = [S.sqsubseteq(), S.nonunit(), S.unit(), S.point(), S.inter(), S.isol(),
           S.strong_order(), S.leq_s(), S.lt_s(), S.preceq_s(), S.prec_s(), S.chi(),
           S.limit(), S.lim_ch_times(), S.lim_bch_times()]
    out += [S.jac_membership(n) for n in (1, 2, 3)]
    return sorted(out, key=lambda s: -s.body.size)


_LEMMA_INDEX: dict | None = None


def _lemma_index() -> dict:
    global _LEMMA_INDEX
    if _LEMMA_INDEX is None:
        idx: dict = {}
        for sch in _lemma_schemas():
            idx.setdefault(sch.body.shape, []).append(sch)
        _LEMMA_INDEX = idx
    return _LEMMA_INDEX


def _match_term(p: Term, t: Term, params: set, binding: dict, left: dict, right: dict) -> bool:
    if isinstance(p, Var):
        if p.name in left:
            return isinstance(t, Var) and right.get(t.name) is left[p.name]
        if p.name in params:
            if t.fv & right.keys():
                return False
            old = binding.get(p.name)
            if old is None:
                binding[p.name] = t
                return True
            return old == t
        return isinstance(t, Var) and t.name == p.name and t.name not in right
    if type(p) is not type(t):
        return False
    if isinstance(p, Const):
        return p.value == t.value
    if isinstance(p, Neg):
        return _match_term(p.arg, t.arg, params, binding, left, right)
    return (_match_term(p.left, t.left, params, binding, left, right)
            and _match_term(p.right, t.right, params, binding, left, right))


def _match(p: Formula, f: Formula, params: set, binding: dict, left: dict, right: dict) -> bool:
    if type(p) is not type(f):
        return False
    if isinstance(p, Eq):
        return (_match_term(p.left, f.left, params, binding, left, right)
                and _match_term(p.right, f.right, params, binding, left, right))
    if isinstance(p, (InO, InB)):
        return _match_term(p.arg, f.arg, params, binding, left, right)
    if isinstance(p, (Exists, Forall)):
        mark = object()
        return _match(p.body, f.body, params, binding, {**left, p.var: mark},
                      {**right, f.var: mark})
    return all(_match(a, b, params, binding, left, right)
               for a, b in zip(p.children(), f.children()))


def match_schema(f: Formula) -> tuple | None:
    """(schema, {param: term}) when f is an instance of a known schema."""
    for sch in _lemma_index().get(f.shape, ()):
        binding: dict = {}
        if _match(sch.body, f, set(sch.params), binding, {}, {}):
            for p in sch.params:
                binding.setdefault(p, Var(p))
            return sch, binding
    return None


# ---------------------------------------------------------------- lemmas


def _base(name: str) -> str:
    """Schema name without its integer argument: 'JacMembership(2)' -> 'JacMembership'."""
    return name.split("(")[0]


def _Z(ev, v) -> frozenset:
    return frozenset(i for i, c in enumerate(v) if ev.is_zero(c))


def _sq(ev, a):
    return _Z(ev, a["f"]) <= _Z(ev, a["g"])


def _jac(ev, a):
    fs = sorted(k for k in a if k.startswith("f"))
    common = frozenset(range(ev.model.n))
    for k in fs:
        common &= _Z(ev, a[k])
    return common <= _Z(ev, a["g"])


def _point_set(ev, v):
    z = _Z(ev, v)
    return z if len(z) == 1 else None


def _inter(ev, a):
    return (_Z(ev, a["f"]) & _Z(ev, a["g"])) == _Z(ev, a["h"])


def _size_cmp(ev, f, g, s, strict: bool, order: bool):
    for i in _Z(ev, s):
        x, y = f[i], g[i]
        if isinstance(x, Poly) or isinstance(y, Poly):
            if not strict and not order and not isinstance(x, Poly) and x == 0:
                continue
            raise Indefinite("size comparison of an indeterminate")
        if order:
            ok = x < y if strict else x <= y
        else:
            try:
                sx, sy = ev.model.host.size(x), ev.model.host.size(y)
            except TypeError as e:
                raise Indefinite(str(e))
            ok = sx < sy if strict else sx <= sy
        if not ok:
            return False
    return True


def _finite_isol(ev, a):
    return _point_set(ev, a["p"]) is not None and _Z(ev, a["p"]) <= _Z(ev, a["s"])


def _chi(ev, a, isol):
    if _point_set(ev, a["p"]) is None:
        return False
    if isol(ev, {"s": a["s"], "p": a["p"]}):
        return False
    meet = _Z(ev, a["g"]) & _Z(ev, a["s"])
    return meet == _Z(ev, a["p"]) or not meet


FINITE_LEMMAS: dict = {
    "Sqsubseteq": _sq,
    "JacMembership": _jac,
    "Nonunit": lambda ev, a: bool(_Z(ev, a["f"])),
    "Unit": lambda ev, a: not _Z(ev, a["f"]),
    "Point": lambda ev, a: _point_set(ev, a["f"]) is not None,
    "Inter": _inter,
    "Isol": _finite_isol,
    "StrongOrder": lambda ev, a: not _Z(ev, a["g"]),
    "LeqS": lambda ev, a: _size_cmp(ev, a["f"], a["g"], a["s"], False, False),
    "LtS": lambda ev, a: _size_cmp(ev, a["f"], a["g"], a["s"], True, False),
    "PreceqS": lambda ev, a: _size_cmp(ev, a["f"], a["g"], a["s"], False, True),
    "PrecS": lambda ev, a: _size_cmp(ev, a["f"], a["g"], a["s"], True, True),
    "Chi": lambda ev, a: _chi(ev, a, _finite_isol),
    # in a finite discrete space every zero is isolated, so Chi(g, s, p) forces
    # p0 outside {s = 0} and no point of {s = 0} approaches p0
    "Limit": lambda ev, a: False,
}


def _germ_isol(ev, a):
    z = _point_set(ev, a["p"])
    if z is None or not z <= _Z(ev, a["s"]):
        return False
    (i0,) = z
    if i0 != 0:
        return True
    return not any(ev.model.tail_index(i) for i in _Z(ev, a["s"]))


def _germ_limits(ev, f, g, s) -> set:
    m = ev.model
    per_branch: dict = {}
    for i in _Z(ev, s):
        if m.tail_index(i):
            if g[i] == 0:
                raise Indefinite("g vanishes on the approach set")
            per_branch.setdefault(m.info[i][1], set()).add(f[i] / g[i])
    out = set()
    for b, vals in per_branch.items():
        if len(vals) != 1:
            raise Indefinite(f"f/g not settled along branch {b}")
        out |= vals
    return out


def _germ_limit(ev, a):
    if not _chi(ev, a, _germ_isol):
        return False
    (i0,) = _Z(ev, a["p"])
    return a["h"][i0] in _germ_limits(ev, a["f"], a["g"], a["s"])


def _germ_lim_ch(ev, a):
    if not _chi(ev, a, _germ_isol):
        return False
    (i0,) = _Z(ev, a["p"])
    tau = a[S.TAU][i0]
    host = ev.model.host
    if not (0 < host.size(tau) < 1):
        return False
    L = _germ_limits(ev, a["f"], a["g"], a["s"])
    if tau not in L:
        return False
    return bool(is_chunk(sorted(L - {0}), tau, MultiplicativePAdic(host)))


GERM_LEMMAS: dict = {
    "Isol": _germ_isol,
    "Chi": lambda ev, a: _chi(ev, a, _germ_isol),
    "Limit": _germ_limit,
    "LimChTimes": _germ_lim_ch,
    # the sampled limit set is finite, hence bounded
    "LimBChTimes": _germ_lim_ch,
}


# ---------------------------------------------------------------- evaluator


class Evaluator:
    def __init__(self, model: Model, depth: int = 2, pool: Sequence | None = None,
                 lemmas: bool = True, budget: int = 200_000):
        self.model = model
        self.depth = depth
        self.extra_pool = [tuple(as_fraction(c) for c in v) for v in (pool or [])]
        self.lemmas = lemmas
        self.budget = budget
        self.steps = 0
        self.cons: dict = {}
        self.next_id = 0
        self._match_cache: dict = {}
        self.witness: dict | None = None
        self.counterexample: dict | None = None
        self.candidates_tried = 0

    # -- coordinates
    def admissible(self, a: int, r: Fraction) -> bool:
        c = self.cons[a]
        if r in c.excl:
            return False
        return c.o is None or self.model.host.in_O(r) == c.o

    def is_zero(self, c) -> bool:
        if not isinstance(c, Poly):
            return c == 0
        ids = c.indets()
        if len(c.terms) == 1:
            return False
        if len(ids) == 1:
            (a,) = ids
            roots = tuple(r for r in rational_roots(c.univariate(a)) if self.admissible(a, r))
            if roots:
                raise Split(a, roots)
            return False
        raise Indefinite("multivariate zero test")

    def in_O(self, c) -> bool:
        host = self.model.host
        try:
            if not isinstance(c, Poly):
                return host.in_O(c)
            if len(c.terms) == 1:
                (mono, k), = c.terms.items()
                if len(mono) == 1 and mono[0][1] == 1 and host.size(k) == 1:
                    o = self.cons[mono[0][0]].o
                    if o is None:
                        raise OSplit(mono[0][0])
                    return o
        except TypeError as e:
            raise Indefinite(str(e))
        raise Indefinite("O-membership of a compound indeterminate value")

    # -- terms
    def term(self, t: Term, env: dict) -> tuple:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return self.model.const(t.value)
        if isinstance(t, Add):
            return v_add(self.term(t.left, env), self.term(t.right, env))
        if isinstance(t, Mul):
            return v_mul(self.term(t.left, env), self.term(t.right, env))
        if isinstance(t, Neg):
            return v_neg(self.term(t.arg, env))
        raise TypeError(t)

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded()

    # -- formulas
    def eval(self, f: Formula, env: dict, top: bool = False) -> bool | None:
        self.tick()
        if self.lemmas and not isinstance(f, (Eq, InO, InB)):
            key = id(f)
            hit = self._match_cache.get(key)
            if hit is None:
                hit = (f, match_schema(f))
                self._match_cache[key] = hit
            m = hit[1]
            if m is not None:
                sch, binding = m
                fn = self.model.lemma(_base(sch.name))
                if fn is not None:
                    args = {p: self.term(t, env) for p, t in binding.items()}
                    try:
                        return fn(self, args)
                    except Indefinite:
                        return None
        if isinstance(f, Eq):
            a, b = self.term(f.left, env), self.term(f.right, env)
            return self.all_coords(self.is_zero, [c_add(x, c_neg(y)) for x, y in zip(a, b)])
        if isinstance(f, (InO, InB)):
            return self.all_coords(self.in_O, self.term(f.arg, env))
        if isinstance(f, Not):
            v = self.eval(f.arg, env)
            return None if v is None else not v
        if isinstance(f, (And, Or, Imp)):
            return self.binary(f, env)
        if isinstance(f, (Exists, Forall)):
            return self.quant(f, env, top)
        raise TypeError(f)

    def all_coords(self, test, coords) -> bool | None:
        """Conjunction over coordinates; a definite False anywhere wins over
        pending splits or undecided coordinates elsewhere."""
        pending = None
        undecided = False
        for c in coords:
            try:
                if not test(c):
                    return False
            except (Split, OSplit) as e:
                pending = pending or e
            except Indefinite:
                undecided = True
        if pending is not None:
            raise pending
        return None if undecided else True

    def binary(self, f, env) -> bool | None:
        # value of the left side that settles the connective on its own
        short = False if isinstance(f, And) else True
        try:
            lv = self.eval(f.left, env)
        except (Split, OSplit):
            rv = self.eval(f.right, env)
            if isinstance(f, And) and rv is False:
                return False
            if not isinstance(f, And) and rv is True:
                return True
            raise
        if isinstance(f, Imp):
            lv = None if lv is None else not lv
        if lv is short:
            return short
        rv = self.eval(f.right, env)
        if rv is short:
            return short
        if lv is None or rv is None:
            return None
        return not short

    def fresh(self) -> int:
        self.next_id += 1
        return self.next_id

    def patterns(self):
        n = self.model.n
        for mask in range(1 << n):
            vec, cons = [], {}
            for i in range(n):
                if mask >> i & 1:
                    a = self.fresh()
                    cons[a] = Cons(frozenset({Fraction(0)}))
                    vec.append(Poly.indet(a))
                else:
                    vec.append(Fraction(0))
            yield tuple(vec), cons

    def generic(self, f, env, top) -> bool | None:
        exists = isinstance(f, Exists)
        work = deque(self.patterns())
        unknown = False
        while work:
            vec, cons = work.popleft()
            self.tick()
            self.cons.update(cons)
            try:
                v = self.eval(f.body, {**env, f.var: vec})
            except Split as sp:
                if sp.indet not in cons:
                    raise
                a, c = sp.indet, cons[sp.indet]
                rest = {k: w for k, w in cons.items() if k != a}
                for r in sp.roots:
                    work.append((tuple(x.subst(a, r) if isinstance(x, Poly) else x
                                       for x in vec), rest))
                work.append((vec, {**rest, a: Cons(c.excl | set(sp.roots), c.o)}))
                continue
            except OSplit as sp:
                if sp.indet not in cons:
                    raise
                a, c = sp.indet, cons[sp.indet]
                for o in (True, False):
                    work.append((vec, {**cons, a: Cons(c.excl, o)}))
                continue
            finally:
                for k in cons:
                    self.cons.pop(k, None)
            if v is None:
                unknown = True
            elif v is exists:
                if top:
                    slot = {f.var: self._describe(vec, cons)}
                    if exists:
                        self.witness = slot
                    else:
                        self.counterexample = slot
                return exists
        return None if unknown else not exists

    def _describe(self, vec, cons) -> str:
        if concrete(vec):
            return show(vec)
        notes = []
        for a, c in sorted(cons.items()):
            extra = sorted(c.excl - {0})
            o = "" if c.o is None else (" in O" if c.o else " not in O")
            notes.append(f"a{a} != 0{', ' + str([str(x) for x in extra]) if extra else ''}{o}")
        return f"{show(vec)} for generic {'; '.join(notes)}"

    def candidates(self, var: str, env: dict) -> list:
        hints = getattr(self.model, "hints", {}).get(var.split("'")[0], [])
        if hints:
            return list(hints)
        m = self.model
        n = m.n
        out = list(self.extra_pool)
        out += [m.const(c) for c in (0, 1, -1, 2, -2)]
        if n <= 6:
            for i in range(n):
                e = tuple(Fraction(int(j == i)) for j in range(n))
                out += [e, tuple(1 - x for x in e)]
        for name in sorted(env):
            v = env[name]
            out.append(v)
            out.append(v_neg(v))
            if concrete(v):
                pinv = tuple(0 * x if x == 0 else 1 / x for x in v)
                out += [pinv, v_neg(pinv), tuple(Fraction(int(x == 0)) for x in v)]
        if self.depth >= 2:
            base = [v for v in out if concrete(v)][:8]
            for a, b in itertools.combinations(base, 2):
                out += [v_add(a, b), v_mul(a, b)]
        seen, uniq = set(), []
        for v in out:
            if v not in seen:
                seen.add(v)
                uniq.append(v)
        return uniq[:40]

    def quant(self, f, env, top) -> bool | None:
        exists = isinstance(f, Exists)
        result = None
        if self.model.n <= self.model.max_generic_points:
            try:
                result = self.generic(f, env, top)
            except Indefinite:
                result = None
            if result is not None:
                return result
        unknown = False
        for cand in self.candidates(f.var, env):
            self.candidates_tried += 1
            v = self.eval(f.body, {**env, f.var: cand})
            if v is exists:
                if top:
                    label = getattr(self.model, "hint_labels", {}).get(cand)
                    slot = {f.var: f"explicit witness {label}" if label else show(cand)}
                    if exists:
                        self.witness = slot
                    else:
                        self.counterexample = slot
                return exists
            if v is None:
                unknown = True
        return None


def eval_bounded(f: Formula, model: Model, env: dict | None = None, depth: int = 2,
                 pool: Sequence | None = None, lemmas: bool = True,
                 budget: int = 200_000) -> Verdict:
    """Holds / Fails / Unknown for f under the assignment ``env`` (name -> values)."""
    env = dict(model.elements if env is None else {**model.elements, **env})
    env = {k: tuple(as_fraction(c) for c in (v.values if isinstance(v, RingElement) else v))
           for k, v in env.items()}
    missing = sorted(f.fv - env.keys())
    if missing:
        raise ValueError(f"unassigned free variable(s) {missing}")
    ev = Evaluator(model, depth, pool, lemmas, budget)
    reason = ""
    try:
        v = ev.eval(f, env, top=True)
    except BudgetExceeded:
        v, reason = None, "evaluation budget exhausted"
    except (Split, OSplit):  # an indeterminate without an owner cannot occur
        raise AssertionError("unowned indeterminate")
    if v is None and not reason:
        reason = "no witness or counterexample within the bounds"
    return Verdict(_t3(v), ev.witness if v else None, ev.counterexample if v is False else None,
                   reason, {"steps": ev.steps, "candidates": ev.candidates_tried,
                            "depth": depth})


# ------------------------------------------------------------ field oracle


def _upoly(t: Term, env: dict, x: str | None) -> list:
    """Coefficients (ascending) of t as a polynomial in x over Q."""
    if isinstance(t, Var):
        return [Fraction(0), Fraction(1)] if t.name == x else [env[t.name]]
    if isinstance(t, Const):
        return [Fraction(t.value)]
    if isinstance(t, Neg):
        return [-c for c in _upoly(t.arg, env, x)]
    a, b = _upoly(t.left, env, x), _upoly(t.right, env, x)
    if isinstance(t, Add):
        n = max(len(a), len(b))
        return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, c in enumerate(a):
        for j, d in enumerate(b):
            out[i + j] += c * d
    return out


def _roots_for(f: Formula, x: str, env: dict) -> set:
    out: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Eq) and x in g.fv:
            cs = _upoly(Add(g.left, Neg(g.right)), env, x)
            if any(cs[1:]):
                out.update(rational_roots(cs))
        elif isinstance(g, (Exists, Forall)):
            if g.var != x:
                stack.append(g.body)
        elif not isinstance(g, (Eq, InO, InB)):
            stack.extend(g.children())
    return out


def field_eval(f: Formula, env: dict, host: Host) -> bool:
    """Truth of f in the host field K = Q.

    Exact when each atom mentions at most one bound variable and O-atoms
    mention none: truth as a function of a bound x is then constant off
    the rational roots of the atoms in x, so the roots plus one other value
    are a complete set of tests.
    """
    if isinstance(f, Eq):
        return not any(_upoly(Add(f.left, Neg(f.right)), env, None))
    if isinstance(f, (InO, InB)):
        return host.in_O(_upoly(f.arg, env, None)[0])
    if isinstance(f, Not):
        return not field_eval(f.arg, env, host)
    if isinstance(f, And):
        return field_eval(f.left, env, host) and field_eval(f.right, env, host)
    if isinstance(f, Or):
        return field_eval(f.left, env, host) or field_eval(f.right, env, host)
    if isinstance(f, Imp):
        return (not field_eval(f.left, env, host)) or field_eval(f.right, env, host)
    roots = _roots_for(f.body, f.var, env)
    other = Fraction(1 + int(max((abs(r) for r in roots), default=0)))
    tests = sorted(roots) + [other]
    vals = (field_eval(f.body, {**env, f.var: r}, host) for r in tests)
    return any(vals) if isinstance(f, Exists) else all(vals)


def pointwise_lift_oracle(phi: Formula, model: FiniteRing, s) -> bool:
    """∀x ∈ {s = 0}: K ⊨ phi(h(x))."""
    s = model.vec(s)
    for i, c in enumerate(s):
        if c == 0:
            env = {k: v[i] for k, v in model.elements.items()}
            if not field_eval(phi, env, model.host):
                return False
    return True


# ------------------------------------------------------------ Z oracles


def power_index(h, tau) -> int | None:
    """k with tau^k = h exactly, or None."""
    h, tau = as_fraction(h), as_fraction(tau)
    if h == 0:
        return None
    bound = max(abs(h.numerator).bit_length(), h.denominator.bit_length()) + 1
    for k in range(-bound, bound + 1):
        if tau ** k == h:
            return k
    return None


def oracle_int_times(h_p0, tau, host: Host | None = None) -> bool:
    """h(p0) ∈ tau^Z; requires 0 < |tau| < 1."""
    host = host or PAdicQ(3)
    tau = as_fraction(tau)
    if tau == 0 or host.size(tau) >= 1:
        raise ValueError("tau must satisfy 0 < |tau| < 1")
    return power_index(h_p0, tau) is not None


def oracle_z_interp(f_p0, g_p0, tau, host: Host | None = None) -> dict:
    """Integer data of f(p0) = tau^k, g(p0) = tau^l."""
    host = host or PAdicQ(3)
    if not (oracle_int_times(f_p0, tau, host) and oracle_int_times(g_p0, tau, host)):
        raise ValueError("f(p0) and g(p0) must be integer powers of tau")
    f_p0, g_p0 = as_fraction(f_p0), as_fraction(g_p0)
    sf, sg = power_index(f_p0, tau), power_index(g_p0, tau)
    return {
        "sigma_f": sf,
        "sigma_g": sg,
        "sum": power_index(f_p0 * g_p0, tau),
        "order": sf >= sg,
        "abs_le": host.size(f_p0) <= host.size(g_p0),
        "divides": power_index(f_p0, g_p0) is not None if g_p0 != 1 else f_p0 == 1,
    }


# ------------------------------------------------------------------ suites


def _case(cid, verdict, formula=None, model=None, **extra) -> dict:
    d = {"id": cid, "formula": formula, "model": model, "verdict": verdict, "millis": None}
    d.update({k: v for k, v in extra.items() if v is not None})
    return d


class SuiteContext:
    def __init__(self, depth: int, seed: int, timings: bool):
        self.depth, self.seed, self.timings = depth, seed, timings
        self.cases: list = []
        self.violations = 0
        self.failures = 0

    def add(self, case: dict, t0: float, violation: bool = False, failure: bool = False):
        if self.timings:
            case["millis"] = round((time.perf_counter() - t0) * 1000, 3)
        if violation:
            case["violation"] = True
            self.violations += 1
        if failure:
            self.failures += 1
        self.cases.append(case)


def _vals(n):
    return list(itertools.product((-1, 0, 1), repeat=n))


HOSTS = (OrderedQ(), PAdicQ(3))


def suite_jacobson(ctx: SuiteContext) -> None:
    for host in HOSTS:
        for size in (1, 2, 3):
            pts = PointSet.of_size(size)
            vecs = [RingElement.of(pts, v) for v in _vals(size)]
            for n in (1, 2):
                t0 = time.perf_counter()
                total = bad = 0
                for gens in itertools.product(vecs, repeat=n):
                    I = IdealGens(gens)
                    for g in vecs:
                        total += 1
                        bad += jac_oracle(I, g) != zero_set_inclusion(I, g)
                ctx.add(_case(f"jac/{host.name}/X{size}/n{n}", HOLDS if not bad else FAILS,
                              model=f"finite-ring[{host.name}; |X|={size}]",
                              checked=total, disagreements=bad), t0, failure=bad > 0)
    # the expanded formula without lemma shortcuts: all of |X| = 1 and a
    # seeded sample of |X| = 2
    sch = S.sqsubseteq()
    rng = random.Random(ctx.seed)
    for host in HOSTS:
        for size in (1, 2):
            pairs = list(itertools.product(_vals(size), repeat=2))
            if size == 2:
                pairs = rng.sample(pairs, 12)
            for fv, gv in pairs:
                t0 = time.perf_counter()
                m = FiniteRing(host, size, {"f": fv, "g": gv})
                v = eval_bounded(sch.body, m, lemmas=False, depth=1, budget=50_000)
                pts = PointSet.of_size(size)
                truth = jac_oracle(IdealGens((RingElement.of(pts, fv),)), RingElement.of(pts, gv))
                bad = (v.holds and not truth) or (v.fails and truth)
                ctx.add(_case(f"jac-formula/{host.name}/{fv}/{gv}", v.kind,
                              print_formula(sch.body), m.describe(), oracle=truth,
                              witness=v.witness, counterexample=v.counterexample), t0,
                        violation=bad)


def suite_combine(ctx: SuiteContext) -> None:
    plans = [(HomogenizedProvider((1, 0, 1)), OrderedQ()),
             (HomogenizedProvider((1, 0, 1)), PAdicQ(3)),
             (ValuedProvider(PAdicQ(3)), PAdicQ(3))]
    for prov, host in plans:
        for size in (1, 2, 3):
            t0 = time.perf_counter()
            pts = PointSet.of_size(size)
            vecs = [RingElement.of(pts, v) for v in _vals(size)]
            bad = total = 0
            for f, g in itertools.product(vecs, repeat=2):
                total += 1
                bad += zero_set(combine(f, g, prov, host)) != zero_set(f) & zero_set(g)
            ctx.add(_case(f"combine/{prov.name}/{host.name}/X{size}",
                          HOLDS if not bad else FAILS, model=host.name,
                          checked=total, disagreements=bad), t0, failure=bad > 0)


def suite_origin_zero(ctx: SuiteContext) -> None:
    h = homogenize((1, 0, 1))
    grid = [(a, b) for a in range(-5, 6) for b in range(-5, 6) if (a, b) != (0, 0)]
    for host in (OrderedQ(), PAdicQ(3), PAdicQ(5)):
        t0 = time.perf_counter()
        bad = []
        for a, b in grid:
            a_, b_ = Fraction(a), Fraction(b)
            if h.q(a_, b_) == 0 or h.combined(a_, b_) == 0:
                bad.append((a, b))
            if isinstance(host, PAdicQ):
                u, v, _ = uv_valued(a_, b_, host)
                if a_ * u + b_ * v == 0:
                    bad.append((a, b))
        ctx.add(_case(f"origin-zero/{host.name}", HOLDS if not bad else FAILS,
                      model=host.name, checked=len(grid),
                      counterexample={"points": [list(p) for p in bad[:5]]} if bad else None),
                t0, failure=bool(bad))


def suite_chunks(ctx: SuiteContext, n_add: int = 8, n_mul: int = 6) -> None:
    for group, n in ((AdditiveZ(), n_add), (MultiplicativePAdic(PAdicQ(3)), n_mul)):
        t0 = time.perf_counter()
        found = enumerate_chunks(n, group)
        want = sorted((tuple(sorted(t, key=group.key)) for t in symmetric_intervals(n, group)),
                      key=len)
        ok = found == want
        tau = 1 if isinstance(group, AdditiveZ) else Fraction(3)
        classes = [classify_finite_chunk(t, tau, group) for t in found]
        ok = ok and classes == list(range(1, n + 1))
        ctx.add(_case(f"chunks/{group.name}/n{n}", HOLDS if ok else FAILS, model=group.name,
                      chunks=len(found), classes=classes), t0, failure=not ok)


def suite_germs(ctx: SuiteContext) -> None:
    depth = max(ctx.depth, 1)
    for k in range(1, 9):
        for w in (germs_open_affine(k, (0, 0)), germs_valued_congruence(k, 0, PAdicQ(3))):
            t0 = time.perf_counter()
            rep = check_separated(w, depth)
            mutant = check_separated(mutate_delta(w, 0, (1 % k)), depth)
            ok = rep.ok and not mutant.S3
            ctx.add(_case(f"germs/{w.kind}/k{k}", HOLDS if ok else FAILS,
                          model=w.host.name, report=rep.to_dict(),
                          mutant_detected=not mutant.S3), t0, failure=not ok)


def _random_values(rng: random.Random, k: int) -> list:
    pool = [Fraction(n, d) for n in range(-9, 10) for d in (1, 2, 3, 9)]
    return [rng.choice(pool) for _ in range(k)]


def suite_limits(ctx: SuiteContext, count: int = 50) -> None:
    rng = random.Random(ctx.seed)
    host = PAdicQ(3)
    for c in range(count):
        t0 = time.perf_counter()
        k = rng.randint(1, 5)
        ls = _random_values(rng, k)
        w = germs_valued_congruence(k, rng.randint(-3, 3), host)
        f, g, _ = limit_construction(ls, w)
        got = limit_values(f, g, w, depth=min(max(ctx.depth, 2), 12))
        ok = got == set(ls)
        ctx.add(_case(f"limits/{c}", HOLDS if ok else FAILS, model=f"{host.name}; k={k}",
                      values=[str(x) for x in ls], got=sorted(str(x) for x in got)),
                t0, failure=not ok)


# -- random formulas for the lifting check

FREE = ("h1", "h2")


def _rand_term(rng, bound: str | None, depth: int = 2) -> Term:
    leaves = [Var(v) for v in FREE] + [Const(0), Const(1)]
    if bound:
        leaves += [Var(bound)] * 2
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(leaves)
    op = rng.choice(("+", "*", "-"))
    if op == "-":
        return Neg(_rand_term(rng, bound, depth - 1))
    a, b = _rand_term(rng, bound, depth - 1), _rand_term(rng, bound, depth - 1)
    return Add(a, b) if op == "+" else Mul(a, b)


def random_formula(rng: random.Random, qdepth: int = 2, bound: tuple = (), size: int = 3) -> Formula:
    """Random formula over L_ring + O with quantifier depth <= qdepth.

    Each atom mentions at most one bound variable and O-atoms only free ones.
    """
    r = rng.random()
    if size <= 0 or r < 0.3:
        if rng.random() < 0.25:
            return InO(_rand_term(rng, None))
        b = rng.choice(bound) if bound else None
        return Eq(_rand_term(rng, b), _rand_term(rng, b))
    if qdepth > 0 and r < 0.6:
        x = ("x", "y")[len(bound)] if len(bound) < 2 else f"z{len(bound)}"
        q = Exists if rng.random() < 0.5 else Forall
        return q(x, random_formula(rng, qdepth - 1, bound + (x,), size - 1))
    if r < 0.7:
        return Not(random_formula(rng, qdepth, bound, size - 1))
    op = rng.choice((And, Or, Imp))
    return op(random_formula(rng, qdepth, bound, size - 1),
              random_formula(rng, qdepth, bound, size - 1))


def _qdepth(f: Formula) -> int:
    return stats(f)["quantifier_depth"]


def lift_case(rng: random.Random) -> tuple:
    phi = random_formula(rng)
    host = rng.choice(HOSTS)
    size = rng.randint(1, 3)
    vals = [Fraction(v) for v in (-2, -1, 0, 1, 2, 3)] + [Fraction(1, 3), Fraction(1, 2)]
    els = {h: tuple(rng.choice(vals) for _ in range(size)) for h in FREE}
    s = tuple(rng.choice((Fraction(0), Fraction(0), Fraction(1), Fraction(2)))
              for _ in range(size))
    return phi, FiniteRing(host, size, els), s


def suite_lift(ctx: SuiteContext, count: int = 200) -> None:
    rng = random.Random(ctx.seed)
    for c in range(count):
        phi, m, s = lift_case(rng)
        t0 = time.perf_counter()
        lifted = S.lift(phi, "s")
        truth = pointwise_lift_oracle(phi, m, s)
        v = eval_bounded(lifted, m, {"s": s}, budget=100_000)
        bad = (v.holds and not truth) or (v.fails and truth)
        ctx.add(_case(f"lift/{c}", v.kind, print_formula(phi), m.describe() + f" s={show(s)}",
                      oracle=truth), t0, violation=bad)


def int_times_cases(seed: int, count: int = 20) -> list:
    rng = random.Random(seed)
    true = [Fraction(3) ** rng.randint(-6, 6) for _ in range(count)]
    false = []
    while len(false) < count:
        c = rng.choice((2, 4, 5, 7, -3, -1, 6)) * Fraction(3) ** rng.randint(-4, 4)
        if c != 0 and c not in false and not oracle_int_times(c, 3):
            false.append(c)
    return [(h, True) for h in true] + [(h, False) for h in false]


def suite_int_times(ctx: SuiteContext, count: int = 20) -> None:
    body = S.int_times().body
    for c, (h, expected) in enumerate(int_times_cases(ctx.seed, count)):
        t0 = time.perf_counter()
        m = germ_model(h)
        truth = oracle_int_times(h, 3)
        v = eval_bounded(body, m, budget=50_000)
        bad = (v.holds and not truth) or (v.fails and truth)
        missed = truth and not v.holds
        ctx.add(_case(f"int-times/{c}", v.kind, "IntTimes(h, p, tau*)", m.describe(),
                      oracle=truth, witness=v.witness), t0, violation=bad, failure=missed)


def suite_z_interp(ctx: SuiteContext, bound: int = 6) -> None:
    t0 = time.perf_counter()
    bad = []
    tau = Fraction(3)
    for k in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            f, g = tau ** l, tau ** k
            r = oracle_z_interp(f, g, tau)
            if r["sum"] != l + k or r["sigma_f"] != l or r["sigma_g"] != k:
                bad.append((l, k, "sum"))
            if r["order"] != r["abs_le"]:
                bad.append((l, k, "order"))
            if r["divides"] != ((l == 0) if k == 0 else l % k == 0):
                bad.append((l, k, "divides"))
    ctx.add(_case("z-interp/laws", HOLDS if not bad else FAILS, model="padic-q:3",
                  checked=(2 * bound + 1) ** 2,
                  counterexample={"cases": [list(map(str, b)) for b in bad[:5]]} if bad else None),
            t0, failure=bool(bad))


def suite_schemas(ctx: SuiteContext) -> None:
    for sch in S.all_schemas(2):
        t0 = time.perf_counter()
        text = print_formula(sch.body)
        back = parse_formula(text, language=None)
        ok = back == sch.body and set(sch.params) == set(sch.body.fv)
        ok = ok and language_of(sch.body) in (Language.RING, Language.RING_B)
        st = stats(sch.body)
        ctx.add(_case(f"schemas/{sch.name}", HOLDS if ok else FAILS, sch.name, None,
                      nodes=st["nodes"], quantifier_depth=st["quantifier_depth"],
                      language=st["language"]), t0, failure=not ok)


SUITES: dict = {
    "jacobson": suite_jacobson,
    "combine": suite_combine,
    "origin-zero": suite_origin_zero,
    "chunks-n8": suite_chunks,
    "germs": suite_germs,
    "limits": suite_limits,
    "lift": suite_lift,
    "int-times": suite_int_times,
    "z-interp": suite_z_interp,
    "schemas": suite_schemas,
    "empty": lambda ctx: None,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def run_suite(name: str, depth: int = 12, seed: int = 0, timings: bool = False) -> dict:
    if name not in SUITE_NAMES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
    ctx = SuiteContext(depth, seed, timings)
    names = [n for n in SUITES if n != "empty"] if name == "all" else [name]
    for n in names:
        SUITES[n](ctx)
    counts = {k: sum(c["verdict"] == k for c in ctx.cases) for k in (HOLDS, FAILS, UNKNOWN)}
    return {
        "suite": name,
        "seed": seed,
        "depth": depth,
        "cases": ctx.cases,
        "summary": {"cases": len(ctx.cases), **counts, "violations": ctx.violations,
                    "property_failures": ctx.failures,
                    "ok": ctx.violations == 0 and ctx.failures == 0},
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, default=str)
