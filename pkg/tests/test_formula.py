"""Formula core: parsing, printing, substitution, alpha-equivalence, languages."""

import pytest
from hypothesis import given, settings, strategies as st

from contdef.formula import (Add, And, Const, Eq, Exists, Forall, FormulaSyntaxError, Imp, InB,
                             InO, Language, Mul, Neg, Not, Or, UnknownPredicateError, Var,
                             VarPool, alpha_eq, check_language, conj, conjuncts, language_of,
                             parse_formula, parse_formulas, parse_term, pretty, print_formula,
                             stats, substitute, substitute_many)

x, y, z, f, g = (Var(n) for n in "xyzfg")


# -- strategies

names = st.sampled_from(["x", "y", "z", "f", "g", "tau*", "x'"])


def terms(depth=3):
    leaf = st.one_of(names.map(Var), st.sampled_from([0, 1]).map(Const))
    return st.recursive(leaf, lambda t: st.one_of(
        st.tuples(t, t).map(lambda p: Add(*p)),
        st.tuples(t, t).map(lambda p: Mul(*p)),
        t.map(Neg)), max_leaves=6)


def formulas():
    atom = st.one_of(st.tuples(terms(), terms()).map(lambda p: Eq(*p)),
                     terms().map(InB))
    return st.recursive(atom, lambda F: st.one_of(
        F.map(Not),
        st.tuples(F, F).map(lambda p: And(*p)),
        st.tuples(F, F).map(lambda p: Or(*p)),
        st.tuples(F, F).map(lambda p: Imp(*p)),
        st.tuples(names, F).map(lambda p: Exists(*p)),
        st.tuples(names, F).map(lambda p: Forall(*p))), max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_print_parse_round_trip(phi):
    assert parse_formula(print_formula(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas(), terms())
def test_substitution_never_captures(phi, t):
    out = substitute(phi, "x", t)
    # every free variable of t that met x stays free in the result
    if "x" in phi.fv:
        assert t.fv <= out.fv
    assert out.fv == (phi.fv - {"x"}) | (t.fv if "x" in phi.fv else frozenset())


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_alpha_eq_reflexive_and_rename_invariant(phi):
    assert alpha_eq(phi, phi)
    renamed = substitute(Exists("w9", phi), "w9", Var("w9"))
    assert alpha_eq(renamed, Exists("w9", phi))


def test_parse_examples():
    phi = parse_formula("(forall x (exists y (= (* x y) 1)))")
    assert phi == Forall("x", Exists("y", Eq(Mul(x, y), Const(1))))
    assert phi.fv == frozenset()
    assert parse_term("(+ x (- 1))") == Add(x, Neg(Const(1)))


def test_capture_avoiding_rename():
    phi = Exists("y", Eq(x, y))
    out = substitute(phi, "x", y)
    assert isinstance(out, Exists) and out.var == "y'"
    assert out.body == Eq(y, Var("y'"))
    assert print_formula(out) == "(exists y' (= y y'))"


def test_simultaneous_substitution():
    phi = Eq(x, y)
    assert substitute_many(phi, {"x": y, "y": x}) == Eq(y, x)


def test_bound_occurrences_untouched():
    phi = And(Eq(x, Const(0)), Forall("x", Eq(x, Const(1))))
    out = substitute(phi, "x", z)
    assert out == And(Eq(z, Const(0)), Forall("x", Eq(x, Const(1))))


def test_alpha_eq_distinguishes_free_names():
    a = Exists("u", Eq(Var("u"), x))
    b = Exists("v", Eq(Var("v"), x))
    c = Exists("v", Eq(Var("v"), y))
    assert alpha_eq(a, b)
    assert not alpha_eq(a, c)
    # bound vs free variable of the same name
    assert not alpha_eq(Exists("u", Eq(Var("u"), x)), Exists("x", Eq(x, x)))


@pytest.mark.parametrize("text,offset", [
    ("(= x", 4),
    ("(foo x y)", 1),
    ("(= x y) z", 8),
    ("(exists 3 (= x x))", 8),
    ("(= é 1x)", 6),  # byte offset, é is two bytes
])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text)
    assert e.value.offset == offset


def test_language_gate():
    with pytest.raises(UnknownPredicateError):
        parse_formula("(in-O x)", Language.RING_B)
    with pytest.raises(UnknownPredicateError):
        parse_formula("(in-B x)", Language.RING_O)
    with pytest.raises(UnknownPredicateError):
        parse_formula("(in-Q x)", None)
    assert parse_formula("(in-O x)", Language.RING_O) == InO(x)
    assert language_of(parse_formula("(= x x)")) is Language.RING
    assert language_of(And(InO(x), InB(y))) is None
    with pytest.raises(UnknownPredicateError):
        check_language(InB(x), Language.RING)


def test_stats_and_helpers():
    phi = parse_formula("(forall x (exists y (and (= x y) (in-B y))))")
    st_ = stats(phi)
    assert st_ == {"nodes": 8, "quantifiers": 2, "quantifier_depth": 2, "free_vars": [],
                   "language": "L_ring+B"}
    assert conjuncts(conj(Eq(x, x), Eq(y, y), Eq(z, z))) == [Eq(x, x), Eq(y, y), Eq(z, z)]
    assert pretty(phi) == "∀x ∃y ((x = y) ∧ (y ∈ B))"


def test_parse_formulas_skips_comments():
    out = parse_formulas("; header\n(= x y)\n\n(not (= x y))\n")
    assert out == [Eq(x, y), Not(Eq(x, y))]


def test_var_pool_fresh_names():
    pool = VarPool({"y", "y'"})
    assert pool.fresh_var("y") == "y'2"
    assert pool.fresh_var("y'2") == "y'2'"


def test_tau_star_identifier():
    assert parse_term("(* tau* x)") == Mul(Var("tau*"), x)
