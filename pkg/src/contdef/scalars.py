"""Exact host fields, absolute values and the scalar constructions behind
the combination of generators: homogenized forms, the valued piecewise
pair (u, v), and conjugation on Q(i).

Elements of the rational hosts are ``fractions.Fraction`` values.  The
size of an element is always reported as a nonnegative Fraction: the usual
absolute value for the ordered host and p^(-v(x)) for the p-adic one, so
sizes of both hosts compare with ordinary ``<=``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Number = Fraction | int


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def padic_valuation(x: Number, p: int) -> int | None:
    """v_p(x), or None for x = 0 (standing in for +infinity)."""
    x = as_fraction(x)
    if x == 0:
        return None
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True, order=True)
class ValueClass:
    """|x| as an element of the value set; ordered by ``size``."""

    size: Fraction
    valuation: int | None = None


class Host:
    name: str = "host"
    ordered: bool = False
    valued: bool = False

    def size(self, x) -> Fraction:
        raise NotImplementedError

    def abs_class(self, x) -> ValueClass:
        return ValueClass(self.size(x))

    def in_O(self, x) -> bool:
        return self.size(x) <= 1

    def le_abs(self, a, b) -> bool:
        return self.size(a) <= self.size(b)

    def lt_abs(self, a, b) -> bool:
        return self.size(a) < self.size(b)

    def norm(self, xs: Sequence) -> Fraction:
        if not xs:
            raise ValueError("norm of an empty vector")
        return max(self.size(x) for x in xs)

    def nu(self, xs: Sequence):
        return nu_m(xs, self)

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


class OrderedQ(Host):
    name = "ordered-q"
    ordered = True

    def size(self, x) -> Fraction:
        return abs(as_fraction(x))


class PAdicQ(Host):
    valued = True

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not a prime")
        self.p = p
        self.name = f"padic-q:{p}"

    def valuation(self, x) -> int | None:
        return padic_valuation(x, self.p)

    def size(self, x) -> Fraction:
        v = self.valuation(x)
        return Fraction(0) if v is None else Fraction(self.p) ** (-v)

    def abs_class(self, x) -> ValueClass:
        return ValueClass(self.size(x), self.valuation(x))


@dataclass(frozen=True)
class Gaussian:
    """a + b·i with rational a, b."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @staticmethod
    def lift(x) -> "Gaussian":
        return x if isinstance(x, Gaussian) else Gaussian(as_fraction(x))

    def __add__(self, o):
        o = Gaussian.lift(o)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-Gaussian.lift(o))

    def __rsub__(self, o):
        return Gaussian.lift(o) - self

    def __mul__(self, o):
        o = Gaussian.lift(o)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return isinstance(o, Gaussian) and self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __str__(self):
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


class GaussianQ(Host):
    """Q(i); carries no absolute value, only conjugation."""

    name = "gaussian-q"

    def size(self, x) -> Fraction:
        raise TypeError("Q(i) is used without an absolute value")


def conj(z: Gaussian) -> Gaussian:
    z = Gaussian.lift(z)
    return Gaussian(z.re, -z.im)


def parse_host(text: str) -> Host:
    text = text.strip().lower()
    if text in ("ordered-q", "ordered", "q"):
        return OrderedQ()
    if text.startswith("padic-q:") or text.startswith("padic:"):
        return PAdicQ(int(text.split(":", 1)[1]))
    if text in ("gaussian-q", "q(i)"):
        return GaussianQ()
    raise ValueError(f"unknown host {text!r} (expected ordered-q or padic-q:<p>)")


def nu_m(xs: Sequence, host: Host):
    """The coordinate selected by the rule: x_1 if it attains the norm,
    else the first x_i with |x_i| = ||x|| > |x_j| for all j < i."""
    if len(xs) == 0:
        raise ValueError("nu_m needs at least one coordinate")
    best_i, best = 0, host.size(xs[0])
    for i in range(1, len(xs)):
        s = host.size(xs[i])
        if s > best:
            best_i, best = i, s
    return xs[best_i]


# -------------------------------------------------------------- polynomials


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def poly_eval(coeffs: Sequence, x):
    """Horner evaluation; ``coeffs`` ascending (a_0, a_1, ..., a_d)."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs: Sequence) -> list[Fraction]:
    """All rational roots of a nonzero univariate polynomial, ascending
    coefficient order, via the rational root theorem."""
    cs = [as_fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("the zero polynomial has every element as a root")
    roots: set[Fraction] = set()
    if cs[0] == 0:
        roots.add(Fraction(0))
        while cs and cs[0] == 0:
            cs.pop(0)
    if len(cs) <= 1:
        return sorted(roots)
    lcm = math.lcm(*(c.denominator for c in cs))
    ints = [int(c * lcm) for c in cs]
    g = math.gcd(*ints)
    ints = [i // g for i in ints]
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and poly_eval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


@dataclass(frozen=True)
class BinaryForm:
    """Polynomial in x, y stored as {(i, j): coeff} for coeff·x^i·y^j."""

    terms: tuple

    @staticmethod
    def of(d: dict) -> "BinaryForm":
        return BinaryForm(tuple(sorted((k, as_fraction(c)) for k, c in d.items() if c != 0)))

    def __call__(self, x, y):
        return sum((c * x ** i * y ** j for (i, j), c in self.terms), 0)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, o: "BinaryForm") -> "BinaryForm":
        d = self.as_dict()
        for k, c in o.terms:
            d[k] = d.get(k, 0) + c
        return BinaryForm.of(d)

    def __mul__(self, o: "BinaryForm") -> "BinaryForm":
        d: dict = {}
        for (i, j), c in self.terms:
            for (k, l), e in o.terms:
                d[(i + k, j + l)] = d.get((i + k, j + l), 0) + c * e
        return BinaryForm.of(d)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms, key=lambda t: (-t[0][0], t[0][1])):
            mono = "·".join(s for s in (f"x^{i}" if i > 1 else "x" if i else "",
                                        f"y^{j}" if j > 1 else "y" if j else "") if s)
            coef = "" if c == 1 and mono else str(c)
            parts.append(f"{coef}{'·' if coef and mono else ''}{mono}")
        return " + ".join(parts)


X_FORM = BinaryForm.of({(1, 0): 1})
Y_FORM = BinaryForm.of({(0, 1): 1})


@dataclass(frozen=True)
class Homogenization:
    q: BinaryForm
    u: BinaryForm
    v: BinaryForm

    def combined(self, a, b):
        return a * self.u(a, b) + b * self.v(a, b)

    def identity_holds(self) -> bool:
        return X_FORM * self.u + Y_FORM * self.v == self.q


def homogenize(coeffs: Sequence, candidates: Iterable = ()) -> Homogenization:
    """Build q = x^d + a_{d-1}x^{d-1}y + ... + a_0 y^d together with
    u = x^{d-1} and v = a_{d-1}x^{d-1} + ... + a_0 y^{d-1}, so x·u + y·v = q.

    ``coeffs`` is ascending (a_0, ..., a_{d-1}, 1).  Root-freeness over Q is
    certified by the rational root theorem plus the caller's candidates.
    """
    cs = [as_fraction(c) for c in coeffs]
    d = len(cs) - 1
    if d < 1:
        raise ValueError("degree must be at least 1")
    if cs[-1] != 1:
        raise ValueError("polynomial must be monic")
    roots = rational_roots(cs)
    if roots:
        raise ValueError(f"polynomial has the root {roots[0]} in K")
    for c in candidates:
        if poly_eval(cs, c) == 0:
            raise ValueError(f"polynomial has the root {c} in K")
    q = BinaryForm.of({(i, d - i): cs[i] for i in range(d + 1)})
    u = BinaryForm.of({(d - 1, 0): 1})
    v = BinaryForm.of({(i, d - 1 - i): cs[i] for i in range(d)})
    return Homogenization(q, u, v)


def uv_valued(x, y, host: PAdicQ) -> tuple[Fraction, Fraction, str]:
    """Piecewise (u, v) on the valued host and the region label U, V or Z."""
    if not isinstance(host, PAdicQ):
        raise TypeError("uv_valued needs a p-adic host")
    x, y = as_fraction(x), as_fraction(y)
    d, s = x - y, x + y
    if d == 0 and s == 0:
        return Fraction(0), Fraction(0), "Z"
    if host.size(d) < host.size(s):
        return s, s, "U"
    return d, -d, "V"
