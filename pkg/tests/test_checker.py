"""Three-valued evaluation: examples, soundness against field oracles, schema matching, suites."""

import random
from fractions import Fraction as F

import pytest

from contdef import schemas as S
from contdef.checker import (FAILS, HOLDS, UNKNOWN, FiniteRing, SymbolicGerm, eval_bounded,
                             field_eval, germ_model, int_times_cases, match_schema,
                             oracle_int_times, oracle_z_interp, power_index, random_formula,
                             report_json, run_suite)
from contdef.formula import Exists, Forall, Var, parse_formula, substitute_many
from contdef.germs import limit_construction
from contdef.scalars import OrderedQ, PAdicQ

Q, P3 = OrderedQ(), PAdicQ(3)


def verdict(text, model, **kw):
    return eval_bounded(parse_formula(text, None), model, **kw)


# -- specification examples

@pytest.mark.parametrize("lemmas", [True, False])
def test_sq_holds(lemmas):
    m = FiniteRing(Q, 2, {"f": (0, 1), "g": (0, 3)})
    assert eval_bounded(S.sqsubseteq().body, m, lemmas=lemmas).holds


@pytest.mark.parametrize("lemmas", [True, False])
def test_sq_never_holds_when_false(lemmas):
    m = FiniteRing(Q, 3, {"f": (0, 1, 0), "g": (0, 2, 5)})
    v = eval_bounded(S.sqsubseteq().body, m, lemmas=lemmas, depth=1)
    assert not v.holds


def test_counterexample_reproduces():
    m = FiniteRing(Q, 3, {"f": (0, 1, 0), "g": (0, 2, 5)})
    body = S.sqsubseteq().body
    v = eval_bounded(body, m, lemmas=False, depth=1)
    assert v.fails
    x = tuple(F(c) for c in v.counterexample["x"].strip("()").split(","))
    assert eval_bounded(body.body, m, {"x": x}, lemmas=False).fails


@pytest.mark.parametrize("text,host,n,kind", [
    ("(forall x (= x x))", Q, 1, HOLDS),
    ("(forall x (= (* x x) x))", Q, 2, FAILS),
    ("(exists x (= (* x x) (+ 1 1)))", Q, 1, FAILS),
    ("(exists x (and (= (* x x) x) (not (= x 0))))", Q, 3, HOLDS),
    ("(forall x (exists y (= (* x y) 0)))", P3, 2, HOLDS),
])
def test_closed_formulas(text, host, n, kind):
    assert verdict(text, FiniteRing(host, n)).kind == kind


def test_unassigned_variable():
    with pytest.raises(ValueError):
        verdict("(= f 0)", FiniteRing(Q, 1))


def test_budget_gives_unknown():
    v = verdict("(forall x (= (* x x) x))", FiniteRing(Q, 2), budget=1)
    assert v.kind == UNKNOWN and "budget" in v.reason


def test_in_O_and_in_B_atoms():
    m = FiniteRing(P3, 2, {"f": (3, F(1, 3)), "g": (1, 9)})
    assert verdict("(in-B g)", m).holds
    assert verdict("(in-B f)", m).fails
    assert verdict("(exists c (and (in-B c) (= f (* g c))))", m).fails


# -- soundness against the field: one-point models are the field itself

@pytest.mark.parametrize("seed", range(60))
def test_one_point_model_never_contradicts_field(seed):
    rng = random.Random(seed)
    phi = random_formula(rng)
    host = (Q, P3)[seed % 2]
    env = {"h1": rng.choice([F(0), F(1), F(-2), F(1, 3)]), "h2": rng.choice([F(0), F(3), F(-1)])}
    truth = field_eval(phi, env, host)
    m = FiniteRing(host, 1, {k: (v,) for k, v in env.items()})
    v = eval_bounded(phi, m, budget=50_000)
    assert not (v.holds and not truth) and not (v.fails and truth)


@pytest.mark.parametrize("seed", range(10))
def test_depth_monotone(seed):
    rng = random.Random(100 + seed)
    phi = random_formula(rng)
    m = FiniteRing(Q, 2, {"h1": (1, 0), "h2": (F(1, 2), 3)})
    v1 = eval_bounded(phi, m, depth=1, budget=50_000)
    v2 = eval_bounded(phi, m, depth=2, budget=50_000)
    if v1.kind != UNKNOWN:
        assert v2.kind == v1.kind


# -- schema matching

def test_match_modulo_alpha():
    inst = S.sqsubseteq()(Var("a"), Var("b"))
    core = substitute_many(inst.body.body.body, {"x": Var("q"), "y": Var("r"), "z": Var("t")})
    renamed = Forall("q", Exists("r", Exists("t", core)))
    assert renamed != inst
    for phi in (inst, renamed):
        sch, binding = match_schema(phi)
        assert sch.name == "Sqsubseteq" and binding == {"f": Var("a"), "g": Var("b")}
    assert match_schema(parse_formula("(= x y)")) is None


# -- oracles

@pytest.mark.parametrize("h,expected", [(9, True), (2, False), (1, True), (F(1, 27), True),
                                        (-3, False), (6, False)])
def test_oracle_int_times(h, expected):
    assert oracle_int_times(h, 3) is expected


@pytest.mark.parametrize("tau", [1, 2, 0, F(1, 3)])
def test_oracle_int_times_rejects_tau(tau):
    with pytest.raises(ValueError):
        oracle_int_times(9, tau)


def test_oracle_z_interp_example():
    r = oracle_z_interp(27, 9, 3)
    assert (r["sigma_f"], r["sigma_g"], r["sum"]) == (3, 2, 5)
    assert r["order"] and r["abs_le"] and not r["divides"]
    assert oracle_z_interp(F(1, 9), F(1, 3), 3)["divides"]
    with pytest.raises(ValueError):
        oracle_z_interp(2, 9, 3)


def test_power_index():
    assert power_index(F(1, 81), 3) == -4
    assert power_index(0, 3) is None
    assert power_index(10, 3) is None


# -- germ models

@pytest.mark.parametrize("h,expected", [(9, True), (2, False), (F(1, 3), True), (5, False)])
def test_int_times_on_germ(h, expected):
    v = eval_bounded(S.int_times().body, germ_model(h), budget=50_000)
    assert v.holds is expected
    assert not (v.fails and expected)


@pytest.mark.parametrize("h,kind", [(7, HOLDS), (8, FAILS)])
def test_limit_on_germ(h, kind):
    m = germ_model(7)
    f, p, s = limit_construction([7], m.witness)
    env = {"f": m.eval_expr(f), "g": m.eval_expr(p), "s": m.eval_expr(s), "h": m.const(h),
           "p": m.eval_expr(p)}
    assert eval_bounded(S.limit().body, m, env).kind == kind


def test_limit_false_for_isolated_zero():
    m = germ_model(7)
    f, p, _ = limit_construction([7], m.witness)
    env = {"f": m.eval_expr(f), "g": m.eval_expr(p), "s": m.eval_expr(p), "h": m.const(7),
           "p": m.eval_expr(p)}
    assert eval_bounded(S.limit().body, m, env).fails


def test_symbolic_germ_sample():
    m = SymbolicGerm(N=2, layers=3)
    assert m.K == 5 and m.sample[0] == (F(0),)
    assert len(m.sample) == 1 + 2 * 5 * 3 + 2
    assert m.tail_index(len(m.sample) - 3) and not m.tail_index(1)


def test_int_times_cases_balanced():
    cases = int_times_cases(0)
    assert sum(e for _, e in cases) == 20 and len(cases) == 40
    assert all(oracle_int_times(h, 3) is e for h, e in cases)


# -- suites

def test_suite_determinism():
    a = report_json(run_suite("lift", seed=3))
    assert a == report_json(run_suite("lift", seed=3))
    assert a != report_json(run_suite("lift", seed=4))


@pytest.mark.parametrize("name", ["combine", "origin-zero", "z-interp", "schemas", "limits"])
def test_suites_ok(name):
    rep = run_suite(name)
    assert rep["summary"]["ok"] and rep["summary"]["cases"] > 0


def test_suite_errors_and_empty():
    with pytest.raises(KeyError):
        run_suite("bogus")
    rep = run_suite("empty")
    assert rep["summary"] == {"cases": 0, HOLDS: 0, FAILS: 0, UNKNOWN: 0, "violations": 0,
                              "property_failures": 0, "ok": True}


def test_timings_recorded_only_when_asked():
    assert run_suite("z-interp")["cases"][0]["millis"] is None
    assert run_suite("z-interp", timings=True)["cases"][0]["millis"] >= 0
