"""Host fields, sizes, nu_m, rational roots, homogenization and the valued (u, v) pair."""

from fractions import Fraction as F

import pytest

from contdef.scalars import (Gaussian, GaussianQ, OrderedQ, PAdicQ, conj, homogenize, nu_m,
                             padic_valuation, parse_host, rational_roots, uv_valued)


@pytest.mark.parametrize("x,p,v", [
    (F(18), 3, 2), (F(1, 9), 3, -2), (F(5, 7), 3, 0), (F(0), 3, None), (F(-50), 5, 2),
])
def test_valuation(x, p, v):
    assert padic_valuation(x, p) == v


@pytest.mark.parametrize("host,x,size", [
    (OrderedQ(), F(-3, 2), F(3, 2)),
    (PAdicQ(3), F(9), F(1, 9)),
    (PAdicQ(3), F(1, 3), F(3)),
    (PAdicQ(3), F(0), F(0)),
])
def test_sizes(host, x, size):
    assert host.size(x) == size


def test_in_O():
    assert PAdicQ(3).in_O(F(3, 2))
    assert not PAdicQ(3).in_O(F(2, 3))
    assert OrderedQ().in_O(F(-1))
    assert not OrderedQ().in_O(F(3, 2))


def test_ultrametric_inequality_exhaustive():
    h = PAdicQ(3)
    vals = [F(n, d) for n in range(-12, 13) for d in (1, 3, 9, 2)]
    for a in vals[::3]:
        for b in vals[::5]:
            assert h.size(a + b) <= max(h.size(a), h.size(b))


@pytest.mark.parametrize("host,xs,expected", [
    (OrderedQ(), [F(1), F(-3), F(3)], F(-3)),
    (OrderedQ(), [F(2), F(-2)], F(2)),
    (PAdicQ(3), [F(3), F(1, 3), F(2, 3)], F(1, 3)),
    (PAdicQ(3), [F(0), F(0)], F(0)),
])
def test_nu_m_first_norm_attaining(host, xs, expected):
    assert nu_m(xs, host) == expected


def test_nu_m_empty():
    with pytest.raises(ValueError):
        nu_m([], OrderedQ())


@pytest.mark.parametrize("coeffs,roots", [
    ((1, 0, 1), []),
    ((-2, 1), [F(2)]),
    ((0, -1, 0, 1), [F(-1), F(0), F(1)]),
    ((-1, 0, 4), [F(-1, 2), F(1, 2)]),
    ((2, 0, -1), []),
])
def test_rational_roots(coeffs, roots):
    assert rational_roots(coeffs) == roots


def test_rational_roots_of_zero_polynomial():
    with pytest.raises(ValueError):
        rational_roots((0, 0))


def test_homogenize_identity_and_strings():
    h = homogenize((1, 0, 1))
    assert h.identity_holds()
    assert str(h.q) == "x^2 + y^2"
    assert str(h.u) == "x" and str(h.v) == "y"
    h3 = homogenize((2, 0, 0, 1))
    assert h3.identity_holds()
    for a in range(-4, 5):
        for b in range(-4, 5):
            if (a, b) != (0, 0):
                assert h3.combined(F(a), F(b)) != 0


@pytest.mark.parametrize("coeffs", [(-1, 0, 1), (0, 1), (1, 1, 2)])
def test_homogenize_rejects(coeffs):
    with pytest.raises(ValueError):
        homogenize(coeffs)


def test_homogenize_degree_zero():
    with pytest.raises(ValueError):
        homogenize((1,))


@pytest.mark.parametrize("x,y,region,combined", [
    (F(1), F(1), "U", F(4)),    # x - y = 0 is strictly smaller than |2|
    (F(1), F(-1), "V", F(4)),
    (F(1), F(2), "V", F(1)),    # |-1| = 1 is not below |3| = 1/3
    (F(1), F(4), "U", F(25)),   # |-3| = 1/3 < |5| = 1
    (F(0), F(0), "Z", F(0)),
])
def test_uv_valued_regions(x, y, region, combined):
    u, v, r = uv_valued(x, y, PAdicQ(3))
    assert r == region
    assert x * u + y * v == combined


def test_uv_valued_grid():
    for p in (3, 5):
        for a in range(-3, 4):
            for b in range(-3, 4):
                u, v, r = uv_valued(F(a), F(b), PAdicQ(p))
                square = (a + b) ** 2 if r == "U" else (a - b) ** 2
                assert a * u + b * v == square
                assert (square == 0) == (a == b == 0)


def test_uv_valued_needs_padic():
    with pytest.raises(TypeError):
        uv_valued(1, 2, OrderedQ())


def test_gaussian_conjugation_norm():
    z = Gaussian(F(2), F(-3))
    assert z * conj(z) == 13
    assert (z + 1) - z == 1
    with pytest.raises(TypeError):
        GaussianQ().size(z)


@pytest.mark.parametrize("text,name", [
    ("ordered-q", "ordered-q"), ("padic-q:5", "padic-q:5"), ("Q", "ordered-q"),
])
def test_parse_host(text, name):
    assert parse_host(text).name == name


@pytest.mark.parametrize("text", ["padic-q:4", "reals", "padic-q:1"])
def test_parse_host_rejects(text):
    with pytest.raises(ValueError):
        parse_host(text)
