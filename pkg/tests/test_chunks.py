"""Chunk predicate, finite classification and the multiplicative transport."""

import itertools
from fractions import Fraction as F

import pytest

from contdef.chunks import (NOT_A_CHUNK, AdditiveZ, MultiplicativePAdic, classify_finite_chunk,
                            enumerate_chunks, is_chunk, symmetric_intervals, transported)
from contdef.scalars import PAdicQ

MUL3 = MultiplicativePAdic(PAdicQ(3))


@pytest.mark.parametrize("T,tau,clause", [
    ([-2, -1, 0, 1, 2], 1, None),
    ([-1, 0, 1, 2], 1, 1),
    ([-3, -1, 0, 1, 3], 1, 2),
    ([-2, -1, 0, 1, 2], 2, 3),    # u = 0 has two anchors, -1 and 0
    ([-2, -1, 1, 2], 1, 2),
    ([-4, -2, 0, 2, 4], 2, None),
])
def test_is_chunk_clauses(T, tau, clause):
    r = is_chunk(T, tau)
    assert r.ok is (clause is None)
    assert r.clause == clause


def test_is_chunk_preconditions():
    with pytest.raises(ValueError):
        is_chunk([0, 1, 2], 5)
    with pytest.raises(ValueError):
        is_chunk([-1, 0, 1], -1)
    with pytest.raises(ValueError):
        is_chunk([F(1, 3), 1, 3], F(1, 3), MUL3)   # |1/3| > 1


@pytest.mark.parametrize("T,tau,n", [
    ([-2, -1, 0, 1, 2], 1, 2),
    ([-3, 0, 3], 3, 1),
    ([-3, -1, 0, 1, 3], 1, NOT_A_CHUNK),
    ([F(1, 9), F(1, 3), 1, 3, 9], F(3), 2),
])
def test_classify(T, tau, n):
    group = MUL3 if isinstance(tau, F) else AdditiveZ()
    assert classify_finite_chunk(T, tau, group) == n


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_is_exactly_symmetric_intervals(n):
    assert enumerate_chunks(n) == symmetric_intervals(n)


def test_enumeration_small_cases():
    assert enumerate_chunks(1) == [(-1, 0, 1)]
    assert enumerate_chunks(3, tau=2) == [(-2, 0, 2)] + [
        (-4, -2, 0, 2, 4), (-6, -4, -2, 0, 2, 4, 6)]
    assert enumerate_chunks(2, MUL3) == [(F(1, 3), 1, 3), (F(1, 9), F(1, 3), 1, 3, 9)]


def test_enumeration_guard():
    with pytest.raises(ValueError):
        enumerate_chunks(13)
    with pytest.raises(ValueError):
        enumerate_chunks(0)


def test_classifier_soundness_n5():
    universe = list(range(-5, 6))
    rest = [a for a in universe if a != 1]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            T = [1, *extra]
            assert (classify_finite_chunk(T, 1) != NOT_A_CHUNK) == bool(is_chunk(T, 1))


def test_transport_matches_valuations():
    powers = [F(3) ** e for e in range(-3, 4)]
    rest = [a for a in powers if a != 3]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            T = [F(3), *extra]
            assert bool(is_chunk(T, F(3), MUL3)) == transported(T, F(3), MUL3)


def test_transport_rejects_repeated_valuations():
    assert not transported([F(3), F(6), F(1), F(1, 3)], F(3), MUL3)
