"""K^X on finite point sets: combination of generators and the Jacobson oracle."""

import itertools
from fractions import Fraction as F

import pytest

from contdef.ring import (ConjugationProvider, HomogenizedProvider, IdealGens, PointSet,
                          RingElement, ValuedProvider, combine, combine_many, dump_model, indicator,
                          is_unit, jac_oracle, jac_unit_criterion, load_model, pseudo_inverse,
                          zero_set, zero_set_inclusion)
from contdef.scalars import Gaussian, GaussianQ, OrderedQ, PAdicQ

X2 = PointSet.of_size(2)
X3 = PointSet.of_size(3)


def el(pts, *vals):
    return RingElement.of(pts, vals)


def test_point_set_validation():
    with pytest.raises(ValueError):
        PointSet(())
    with pytest.raises(ValueError):
        PointSet(("a", "a"))
    with pytest.raises(ValueError):
        RingElement.of(X2, [1, 2, 3])


def test_arithmetic_and_zero_sets():
    f, g = el(X3, 0, 1, 2), el(X3, 3, 0, 2)
    assert (f * g).values == (0, 0, 4)
    assert zero_set(f) == {"x1"}
    assert not is_unit(f) and is_unit(f + RingElement.const(X3, 1))
    assert pseudo_inverse(el(X3, 0, 2, F(1, 3))).values == (0, F(1, 2), 3)
    assert indicator(X3, [0, 2]).values == (1, 0, 1)
    with pytest.raises(ValueError):
        f + el(X2, 1, 1)


def test_combine_example():
    h = combine(el(X2, 0, 1), el(X2, 1, 0), HomogenizedProvider((1, 0, 1)), OrderedQ())
    assert h.values == (1, 1)
    assert zero_set(h) == frozenset()


@pytest.mark.parametrize("provider,host", [
    (HomogenizedProvider((1, 0, 1)), OrderedQ()),
    (HomogenizedProvider((2, 0, 0, 1)), PAdicQ(3)),
    (ValuedProvider(PAdicQ(3)), PAdicQ(3)),
    (ValuedProvider(PAdicQ(5)), PAdicQ(5)),
])
def test_combine_exhaustive(provider, host):
    vecs = [RingElement.of(X3, v) for v in itertools.product((-1, 0, 1, 2), repeat=3)]
    for f, g in itertools.product(vecs, repeat=2):
        assert zero_set(combine(f, g, provider, host)) == zero_set(f) & zero_set(g)


def test_combine_many_folds():
    gens = [el(X3, 0, 1, 0), el(X3, 0, 0, 2), el(X3, 0, 5, 0)]
    h = combine_many(gens, HomogenizedProvider(), OrderedQ())
    assert zero_set(h) == {"x1"}
    with pytest.raises(ValueError):
        combine_many([], HomogenizedProvider(), OrderedQ())


def test_conjugation_provider():
    f = RingElement(X2, (Gaussian(1, 1), Gaussian(0)))
    g = RingElement(X2, (Gaussian(2), Gaussian(0)))
    h = combine(f, g, ConjugationProvider(), GaussianQ())
    assert h.values[0] == 6 and h.values[1] == 0


@pytest.mark.parametrize("provider,host", [
    (ValuedProvider(PAdicQ(3)), PAdicQ(5)),
    (ValuedProvider(PAdicQ(3)), OrderedQ()),
    (ConjugationProvider(), OrderedQ()),
    (HomogenizedProvider(), GaussianQ()),
])
def test_provider_host_mismatch(provider, host):
    with pytest.raises(ValueError):
        combine(el(X2, 1, 0), el(X2, 0, 1), provider, host)


@pytest.mark.parametrize("gens,g,expected", [
    ([(0, 1)], (0, 3), True),
    ([(0, 1, 0)], (0, 2, 5), False),
    ([(1, 1, 1)], (0, 0, 7), True),      # I is the whole ring
    ([(0, 1, 1), (0, 0, 1)], (0, 4, 9), True),
    ([(0, 0, 0)], (0, 0, 1), False),
])
def test_jac_oracle_examples(gens, g, expected):
    pts = PointSet.of_size(len(g))
    I = IdealGens(tuple(RingElement.of(pts, v) for v in gens))
    assert jac_oracle(I, RingElement.of(pts, g)) is expected
    assert zero_set_inclusion(I, RingElement.of(pts, g)) is expected


def test_jac_unit_criterion_three_valued():
    I = IdealGens((el(X2, 0, 1),))
    pool = [el(X2, a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    assert jac_unit_criterion(I, el(X2, 0, 5), pool) is True
    assert jac_unit_criterion(I, el(X2, 1, 0), pool) is False
    assert jac_unit_criterion(I, el(X2, 1, 0), []) is None
    assert jac_unit_criterion(IdealGens((el(X2, 1, 1),)), el(X2, 1, 0), []) is True
    # a pool without -1 at x1 cannot refute g = (1, 0)
    assert jac_unit_criterion(I, el(X2, 1, 0), [el(X2, 0, 0)]) is None


def test_model_round_trip():
    spec = load_model({"host": "padic-q:3", "points": ["a", "b"],
                       "elements": {"f": ["1/3", 0]}})
    assert spec.elements["f"].values == (F(1, 3), 0)
    assert load_model(dump_model(spec)).elements == spec.elements


@pytest.mark.parametrize("data", [
    "{}", '{"points": []}', '{"points": ["a"], "elements": {"f": [1, 2]}}',
    '{"points": ["a"], "host": "padic-q:6"}', '{"points": ["a"], "elements": {"f": ["1/0"]}}',
])
def test_bad_models(data):
    with pytest.raises(ValueError):
        load_model(data)
