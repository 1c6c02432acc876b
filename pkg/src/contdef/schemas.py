"""Named formula schemata over the function ring.

Each builder returns a :class:`Schema` whose free variables are exactly its
parameters.  Larger schemata are assembled by instantiating smaller ones
through capture-avoiding substitution, so every abbreviation is expanded
in the emitted tree.

Parameter conventions: ``sqsubseteq(f, g)`` states that the zero set of f
is contained in that of g; ``leq_s(f, g, s)`` states |f| <= |g| on the zero
set of s; ``strong_order(f, g)`` states g ⋐ f.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (ONE, ZERO, Add, And, Const, Eq, Exists, Forall, Formula, Imp, InB,
                      InO, Language, Mul, Neg, Not, Or, Term, Var, VarPool, all_vars, conj,
                      exists_many, forall_many, language_of, sub, substitute_many)

TAU = "tau*"


@dataclass(frozen=True)
class Schema:
    name: str
    params: tuple
    body: Formula

    def __post_init__(self):
        if set(self.params) != set(self.body.fv):
            raise ValueError(f"{self.name}: free variables {sorted(self.body.fv)} "
                             f"differ from params {self.params}")

    def __call__(self, *args) -> Formula:
        if len(args) != len(self.params):
            raise TypeError(f"{self.name} takes {len(self.params)} arguments")
        terms = [Var(a) if isinstance(a, str) else a for a in args]
        mapping = {p: t for p, t in zip(self.params, terms) if t != Var(p)}
        return substitute_many(self.body, mapping)

    @property
    def language(self) -> Language:
        return language_of(self.body)


def _v(*names: str) -> list[Var]:
    return [Var(n) for n in names]


# ------------------------------------------------------------------- Jacobson


@functools.lru_cache(maxsize=None)
def jac_membership(n: int) -> Schema:
    """g in Jac(f_1..f_n): ∀x ∃y_1..y_n ∃z ((1 + x·g)·z = 1 + y_1·f_1 + ... + y_n·f_n)."""
    if n < 1:
        raise ValueError("jac_membership needs n >= 1")
    fs = [f"f{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, n + 1)]
    x, g, z = _v("x", "g", "z")
    rhs: Term = ONE
    for y, f in zip(ys, fs):
        rhs = Add(rhs, Mul(Var(y), Var(f)))
    body = Eq(Mul(Add(ONE, Mul(x, g)), z), rhs)
    return Schema(f"JacMembership({n})", tuple(fs) + ("g",),
                  Forall("x", exists_many(ys + ["z"], body)))


@functools.lru_cache(maxsize=None)
def sqsubseteq() -> Schema:
    x, y, z, f, g = _v("x", "y", "z", "f", "g")
    body = Forall("x", Exists("y", Exists("z",
                  Eq(Mul(Add(ONE, Mul(x, g)), z), Add(ONE, Mul(y, f))))))
    return Schema("Sqsubseteq", ("f", "g"), body)


def sq(a, b) -> Formula:
    return sqsubseteq()(a, b)


@functools.lru_cache(maxsize=None)
def nonunit() -> Schema:
    return Schema("Nonunit", ("f",), Not(Exists("u", Eq(Mul(Var("f"), Var("u")), ONE))))


@functools.lru_cache(maxsize=None)
def unit() -> Schema:
    return Schema("Unit", ("f",), Exists("u", Eq(Mul(Var("f"), Var("u")), ONE)))


# --------------------------------------------------------- points and lattice


@functools.lru_cache(maxsize=None)
def point() -> Schema:
    """f has a single zero: f is a nonunit whose zero set is an atom."""
    g = "g"
    body = And(nonunit()("f"),
               Forall(g, Imp(And(sq(g, "f"), nonunit()(g)), sq("f", g))))
    return Schema("Point", ("f",), body)


@functools.lru_cache(maxsize=None)
def inter() -> Schema:
    """{f=0} ∩ {g=0} = {h=0} as the meet of the zero-set lattice."""
    k = "k"
    body = conj(sq("h", "f"), sq("h", "g"),
                Forall(k, Imp(And(sq(k, "f"), sq(k, "g")), sq(k, "h"))))
    return Schema("Inter", ("f", "g", "h"), body)


@functools.lru_cache(maxsize=None)
def isol() -> Schema:
    s, p, u = _v("s", "p", "u")
    body = conj(point()("p"), sq("p", "s"),
                Exists("u", And(sq(s, Mul(p, u)), Not(sq(s, u)))))
    return Schema("Isol", ("s", "p"), body)


# ----------------------------------------------------------------- lifting


class LiftError(ValueError):
    pass


def lift(phi: Formula, s: str = "s") -> Formula:
    """[phi](y, s): phi holds at every zero of s.

    Equations become s ⊑ P, O-atoms quantify over points of s; ∧ is kept,
    ¬ and ∃ go through points.  ∨, → and ∀ are first rewritten through
    ¬, ∧ and ∃.
    """
    pool = VarPool(all_vars(phi) | {s})
    if s in all_vars(phi):
        raise LiftError(f"variable {s!r} already occurs in the formula")
    return _lift(phi, s, pool)


def _desugar(phi: Formula) -> Formula:
    if isinstance(phi, Or):
        return Not(And(Not(phi.left), Not(phi.right)))
    if isinstance(phi, Imp):
        return Not(And(phi.left, Not(phi.right)))
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, Not(phi.body)))
    return phi


def _points_of(s: str, pool: VarPool, inner) -> Formula:
    p = pool.fresh_var("p")
    return Forall(p, Imp(And(point()(p), sq(p, s)), inner(p)))


def _lift(phi: Formula, s: str, pool: VarPool) -> Formula:
    phi = _desugar(phi)
    if isinstance(phi, Eq):
        P = phi.left if phi.right == ZERO else sub(phi.left, phi.right)
        return sq(s, P)
    if isinstance(phi, InO):
        def inner(p):
            f = pool.fresh_var("f")
            return Exists(f, And(InB(Var(f)), sq(p, sub(phi.arg, Var(f)))))
        return _points_of(s, pool, inner)
    if isinstance(phi, InB):
        raise LiftError("B-atoms cannot be lifted; expected a formula over L_ring ∪ {O}")
    if isinstance(phi, And):
        return And(_lift(phi.left, s, pool), _lift(phi.right, s, pool))
    if isinstance(phi, Not):
        return _points_of(s, pool, lambda p: Not(_lift(phi.arg, p, pool)))
    if isinstance(phi, Exists):
        return _points_of(s, pool, lambda p: Exists(phi.var, _lift(phi.body, p, pool)))
    raise LiftError(f"unsupported node {type(phi).__name__}")


def _lift_schema(name: str, params: Sequence[str], phi: Formula, s: str = "s") -> Schema:
    return Schema(name, tuple(params) + (s,), lift(phi, s))


def abs_le(a: Term, b: Term, c: str = "c") -> Formula:
    """|a| <= |b| as ∃c (c ∈ O ∧ a = b·c)."""
    return Exists(c, And(InO(Var(c)), Eq(a, Mul(b, Var(c)))))


def abs_lt(a: Term, b: Term) -> Formula:
    return And(abs_le(a, b), Not(abs_le(b, a)))


@functools.lru_cache(maxsize=None)
def leq_s() -> Schema:
    f, g = _v("f", "g")
    return _lift_schema("LeqS", ("f", "g"), abs_le(f, g))


@functools.lru_cache(maxsize=None)
def lt_s() -> Schema:
    f, g = _v("f", "g")
    return _lift_schema("LtS", ("f", "g"), abs_lt(f, g))


def four_squares_nonneg(t: Term) -> Formula:
    """t >= 0 over Q (Lagrange) and over real closed fields."""
    a, b, c, d = _v("a", "b", "c", "d")
    return exists_many("abcd", Eq(t, Add(Add(Mul(a, a), Mul(b, b)), Add(Mul(c, c), Mul(d, d)))))


@functools.lru_cache(maxsize=None)
def preceq_s() -> Schema:
    """f ≼ g at the zeros of s, with ≼ the field order."""
    f, g = _v("f", "g")
    return _lift_schema("PreceqS", ("f", "g"), four_squares_nonneg(sub(g, f)))


@functools.lru_cache(maxsize=None)
def prec_s() -> Schema:
    f, g = _v("f", "g")
    phi = And(four_squares_nonneg(sub(g, f)), Not(Eq(sub(g, f), ZERO)))
    return _lift_schema("PrecS", ("f", "g"), phi)


# -------------------------------------------------------------------- limits


@functools.lru_cache(maxsize=None)
def chi() -> Schema:
    g, s, p = "g", "s", "p"
    body = conj(point()(p), Not(isol()(s, p)),
                Or(inter()(g, s, p), inter()(g, s, ONE)))
    return Schema("Chi", ("g", "s", "p"), body)


@functools.lru_cache(maxsize=None)
def limit() -> Schema:
    """h(p0) is a limit value of f/g along the zeros of s at the zero p0 of p."""
    f, g, h, s, p, eps, v, q = _v("f", "g", "h", "s", "p", "eps", "v", "q")
    approach = conj(point()(q), Not(sq(q, Mul(p, v))), sq(q, s),
                    leq_s()(sub(f, Mul(g, h)), Mul(g, eps), q))
    main = Forall("eps", Forall("v", Imp(Not(sq(p, Mul(v, eps))), Exists("q", approach))))
    return Schema("Limit", ("f", "g", "h", "s", "p"), And(chi()("g", "s", "p"), main))


SIGMA = ("f", "g", "s", "p")


def phi_sigma(v: Term | str, f="f", g="g", s="s", p="p") -> Formula:
    return limit()(f, g, v, s, p)


@functools.lru_cache(maxsize=None)
def psi_sigma() -> Schema:
    a, a2, b, c, p, t, u, xi, xi2 = _v("alpha", "alpha'", "beta", "gamma", "p", TAU,
                                       "u", "xi", "xi'")
    le, lt = leq_s(), lt_s()

    def A(xi_: Var) -> Formula:
        return conj(phi_sigma(xi_), lt(Mul(xi_, t), u, p), le(u, xi_, p))

    abc = Mul(Mul(a, b), c)
    c1 = Imp(sq(p, sub(Mul(a, a2), ONE)), phi_sigma(a2))
    c2 = Imp(And(le(ONE, abc, p), le(abc, Mul(c, c), p)), phi_sigma(Mul(a, b)))
    c3 = Forall("u", Imp(And(le(ONE, Mul(u, c), p), le(Mul(u, c), Mul(c, c), p)),
                         Exists("xi", A(xi))))
    c4 = forall_many(["u", "xi", "xi'"], Imp(And(A(xi), A(xi2)), sq(p, sub(xi, xi2))))
    params = ("alpha", "alpha'", "beta", "gamma") + SIGMA + (TAU,)
    return Schema("PsiSigma", params, conj(c1, c2, c3, c4))


@functools.lru_cache(maxsize=None)
def lim_ch_times() -> Schema:
    p, t = _v("p", TAU)
    lt = lt_s()
    quant = forall_many(["alpha", "alpha'", "beta", "gamma"],
                        Imp(conj(phi_sigma("alpha"), phi_sigma("beta"), phi_sigma("gamma")),
                            psi_sigma()("alpha", "alpha'", "beta", "gamma", *SIGMA, TAU)))
    body = conj(lt(ZERO, t, p), lt(t, ONE, p), phi_sigma(t), quant)
    return Schema("LimChTimes", SIGMA + (TAU,), body)


@functools.lru_cache(maxsize=None)
def lim_bch_times() -> Schema:
    bounded = Exists("delta", Forall("alpha", Imp(phi_sigma("alpha"),
                                                  leq_s()("alpha", "delta", "p"))))
    return Schema("LimBChTimes", SIGMA + (TAU,),
                  And(lim_ch_times()(*SIGMA, TAU), bounded))


@functools.lru_cache(maxsize=None)
def int_times() -> Schema:
    """h(p0) is an integer power of tau*(p0)."""
    body = exists_many(["f", "g", "s"],
                       And(limit()("f", "g", "h", "s", "p"), lim_bch_times()(*SIGMA, TAU)))
    return Schema("IntTimes", ("h", "p", TAU), body)


@functools.lru_cache(maxsize=None)
def phi_sigma_plus() -> Schema:
    a, b, c, p, t, u, xi, xi2 = _v("alpha", "beta", "gamma", "p", TAU, "u", "xi", "xi'")
    pe, pr = preceq_s(), prec_s()

    def B(xi_: Var) -> Formula:
        return conj(phi_sigma(xi_), pe(xi_, u, p), pr(u, Add(xi_, t), p))

    c1 = phi_sigma(Neg(a))
    c2 = Imp(And(pe(Neg(c), Add(a, b), p), pe(Add(a, b), c, p)), phi_sigma(Add(a, b)))
    c3 = Forall("u", Imp(And(pe(Neg(c), u, p), pe(u, c, p)), Exists("xi", B(xi))))
    c4 = forall_many(["u", "xi", "xi'"], Imp(And(B(xi), B(xi2)), sq(p, sub(xi, xi2))))
    params = ("alpha", "beta", "gamma") + SIGMA + (TAU,)
    return Schema("PhiSigma", params, conj(c1, c2, c3, c4))


@functools.lru_cache(maxsize=None)
def lim_ch_plus() -> Schema:
    p, t = _v("p", TAU)
    quant = forall_many(["alpha", "beta", "gamma"],
                        Imp(conj(phi_sigma("alpha"), phi_sigma("beta"), phi_sigma("gamma")),
                            phi_sigma_plus()("alpha", "beta", "gamma", *SIGMA, TAU)))
    body = conj(prec_s()(ZERO, t, p), phi_sigma(t), quant)
    return Schema("LimChPlus", SIGMA + (TAU,), body)


@functools.lru_cache(maxsize=None)
def lim_bch_plus() -> Schema:
    bounded = Exists("delta", Forall("alpha", Imp(phi_sigma("alpha"),
                                                  preceq_s()("alpha", "delta", "p"))))
    return Schema("LimBChPlus", SIGMA + (TAU,), And(lim_ch_plus()(*SIGMA, TAU), bounded))


@functools.lru_cache(maxsize=None)
def int_plus() -> Schema:
    body = exists_many(["f", "g", "s"],
                       And(limit()("f", "g", "h", "s", "p"), lim_bch_plus()(*SIGMA, TAU)))
    return Schema("IntPlus", ("h", "p", TAU), body)


# ---------------------------------------------------------- local dimension


@functools.lru_cache(maxsize=None)
def strong_order() -> Schema:
    """g ⋐ f: ∀h (f ⊑ g·h → g ⊑ h)."""
    f, g, h = _v("f", "g", "h")
    return Schema("StrongOrder", ("f", "g"), Forall("h", Imp(sq(f, Mul(g, h)), sq(g, h))))


@functools.lru_cache(maxsize=None)
def chi_geq_k(k: int) -> Schema:
    """p has a single zero p0 and the local dimension at p0 is at least k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Schema("ChiGeqK(0)", ("p",), point()("p"))
    fs = [f"f{i}" for i in range(k + 1)]
    links = [strong_order()(fs[i + 1], fs[i]) for i in range(k)]
    disjoint = Exists("w", And(inter()(fs[k], "v", "w"), unit()("w")))
    chain = exists_many(fs, conj(*links, nonunit()(fs[0]), disjoint))
    body = And(point()("p"), Forall("v", Imp(Not(sq("p", "v")), chain)))
    return Schema(f"ChiGeqK({k})", ("p",), body)


@functools.lru_cache(maxsize=None)
def chi_k(k: int) -> Schema:
    return Schema(f"ChiK({k})", ("p",), And(chi_geq_k(k).body, Not(chi_geq_k(k + 1).body)))


def _z_k(k: int, integer: Schema, name: str) -> Schema:
    if k < 1:
        raise ValueError("Z_k needs k >= 1")
    inner = Forall("v", Imp(Not(sq("p", "v")),
                            Exists("q", And(Not(sq("q", "v")), integer("h", "q", TAU)))))
    return Schema(name, ("h", TAU), Forall("p", Imp(chi_k(k)("p"), inner)))


@functools.lru_cache(maxsize=None)
def z_k(k: int) -> Schema:
    return _z_k(k, int_times(), f"ZK({k})")


@functools.lru_cache(maxsize=None)
def z_k_plus(k: int) -> Schema:
    return _z_k(k, int_plus(), f"ZKPlus({k})")


# ------------------------------------------------------- Z interpretation


@functools.lru_cache(maxsize=None)
def z_interpretation() -> tuple[Schema, ...]:
    """Domain, equality, addition graph, order and divisibility for sigma.

    sigma(f) is the k with f(p0) = tau^k.  Addition is the ring product,
    since sigma(fg) = sigma(f) + sigma(g).  Multiplication of Z is
    0-definable from (+, |, <=), so these five relations suffice.
    """
    f, g, h, p = _v("f", "g", "h", "p")
    return (
        Schema("ZDomain", ("f", "p", TAU), int_times()("f", "p", TAU)),
        Schema("ZEq", ("f", "g", "p"), sq(p, sub(f, g))),
        Schema("ZAdd", ("f", "g", "h", "p"), sq(p, sub(h, Mul(f, g)))),
        Schema("ZLeq", ("f", "g", "p"), leq_s()(g, f, p)),
        Schema("ZDiv", ("f", "g", "p"), int_times()(f, p, g)),
    )


# ------------------------------------------------------------- registry


def _z(name):
    return lambda: next(s for s in z_interpretation() if s.name == name)


SCHEMAS = {
    "sqsubseteq": (sqsubseteq, 0),
    "jac": (jac_membership, 1),
    "jacmembership": (jac_membership, 1),
    "nonunit": (nonunit, 0),
    "point": (point, 0),
    "inter": (inter, 0),
    "isol": (isol, 0),
    "leqs": (leq_s, 0),
    "lts": (lt_s, 0),
    "preceqs": (preceq_s, 0),
    "precs": (prec_s, 0),
    "chi": (chi, 0),
    "limit": (limit, 0),
    "psisigma": (psi_sigma, 0),
    "limchtimes": (lim_ch_times, 0),
    "limbchtimes": (lim_bch_times, 0),
    "inttimes": (int_times, 0),
    "phisigma": (phi_sigma_plus, 0),
    "limchplus": (lim_ch_plus, 0),
    "limbchplus": (lim_bch_plus, 0),
    "intplus": (int_plus, 0),
    "strongorder": (strong_order, 0),
    "chigeqk": (chi_geq_k, 1),
    "chik": (chi_k, 1),
    "zk": (z_k, 1),
    "zkplus": (z_k_plus, 1),
    "zdomain": (_z("ZDomain"), 0),
    "zeq": (_z("ZEq"), 0),
    "zadd": (_z("ZAdd"), 0),
    "zleq": (_z("ZLeq"), 0),
    "zdiv": (_z("ZDiv"), 0),
}


def normalize_name(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def build(name: str, args: Sequence[int] = ()) -> Schema:
    key = normalize_name(name)
    if key not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}")
    builder, arity = SCHEMAS[key]
    if len(args) != arity:
        raise TypeError(f"schema {name!r} takes {arity} integer argument(s), got {len(args)}")
    return builder(*args)


def all_schemas(max_k: int = 2) -> list[Schema]:
    out = [b() for b, a in SCHEMAS.values() if a == 0]
    for k in range(0, max_k + 1):
        out += [chi_geq_k(k), chi_k(k)]
        if k >= 1:
            out += [jac_membership(k), z_k(k), z_k_plus(k)]
    seen, uniq = set(), []
    for s in out:
        if s.name not in seen:
            seen.add(s.name)
            uniq.append(s)
    return uniq
