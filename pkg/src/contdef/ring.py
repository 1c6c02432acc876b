"""The function ring K^X on a finite point set X.

X carries the discrete topology, so every map X -> K is continuous and
the ring is the finite product of copies of K.  Its maximal ideals are
the point kernels {f : f(x) = 0}; that gives an exact Jacobson oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .scalars import (GaussianQ, Host, Homogenization, OrderedQ, PAdicQ, as_fraction,
                      conj, homogenize, parse_host, uv_valued)


@dataclass(frozen=True)
class PointSet:
    labels: tuple
    coords: tuple | None = None

    def __post_init__(self):
        if not self.labels:
            raise ValueError("point set must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("point labels must be distinct")

    @staticmethod
    def of_size(n: int) -> "PointSet":
        return PointSet(tuple(f"x{i + 1}" for i in range(n)))

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class RingElement:
    points: PointSet
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.points):
            raise ValueError("element must be total on the point set")

    @staticmethod
    def of(points: PointSet, values: Iterable) -> "RingElement":
        return RingElement(points, tuple(as_fraction(v) if not hasattr(v, "im") else v
                                         for v in values))

    @staticmethod
    def const(points: PointSet, c) -> "RingElement":
        return RingElement.of(points, [c] * len(points))

    def _check(self, o: "RingElement") -> None:
        if o.points != self.points:
            raise ValueError("elements live on different point sets")

    def __add__(self, o):
        self._check(o)
        return RingElement(self.points, tuple(a + b for a, b in zip(self.values, o.values)))

    def __sub__(self, o):
        self._check(o)
        return RingElement(self.points, tuple(a - b for a, b in zip(self.values, o.values)))

    def __mul__(self, o):
        self._check(o)
        return RingElement(self.points, tuple(a * b for a, b in zip(self.values, o.values)))

    def __neg__(self):
        return RingElement(self.points, tuple(-a for a in self.values))

    def at(self, label):
        return self.values[self.points.index(label)]

    def zero_indices(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.values) if v == 0)

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def zero_set(f: RingElement) -> frozenset:
    """Labels of the points where f vanishes."""
    return frozenset(f.points.labels[i] for i in f.zero_indices())


def is_unit(f: RingElement) -> bool:
    return not f.zero_indices()


def pseudo_inverse(f: RingElement) -> RingElement:
    """1/f off the zero set, 0 on it."""
    return RingElement(f.points, tuple(0 * v if v == 0 else 1 / v for v in f.values))


def indicator(points: PointSet, idx: Iterable[int]) -> RingElement:
    idx = set(idx)
    return RingElement.of(points, [1 if i in idx else 0 for i in range(len(points))])


# ----------------------------------------------------------- combination


class UVProvider:
    """A pair (u, v) of scalar maps with x·u(x,y) + y·v(x,y) = 0 only at 0."""

    name = "provider"

    def check_host(self, host: Host) -> None:
        pass

    def uv(self, x, y):
        raise NotImplementedError


class HomogenizedProvider(UVProvider):
    def __init__(self, coeffs: Sequence = (1, 0, 1)):
        self.h: Homogenization = homogenize(coeffs)
        self.name = f"homogenized{tuple(str(c) for c in coeffs)}"

    def check_host(self, host: Host) -> None:
        if not isinstance(host, (OrderedQ, PAdicQ)):
            raise ValueError(f"{self.name} certified root-free over Q only, not {host}")

    def uv(self, x, y):
        return self.h.u(x, y), self.h.v(x, y)


class ValuedProvider(UVProvider):
    def __init__(self, host: PAdicQ):
        self.host = host
        self.name = f"uv-valued:{host.p}"

    def check_host(self, host: Host) -> None:
        if host != self.host:
            raise ValueError(f"{self.name} does not match host {host}")

    def uv(self, x, y):
        u, v, _ = uv_valued(x, y, self.host)
        return u, v


class ConjugationProvider(UVProvider):
    name = "conjugation"

    def check_host(self, host: Host) -> None:
        if not isinstance(host, GaussianQ):
            raise ValueError("conjugation provider needs the Q(i) host")

    def uv(self, x, y):
        return conj(x), conj(y)


def combine(f: RingElement, g: RingElement, provider: UVProvider, host: Host) -> RingElement:
    """h = f·u(f,g) + g·v(f,g); zero set of h is the intersection."""
    provider.check_host(host)
    f._check(g)
    vals = []
    for a, b in zip(f.values, g.values):
        u, v = provider.uv(a, b)
        vals.append(a * u + b * v)
    return RingElement(f.points, tuple(vals))


def combine_many(gens: Sequence[RingElement], provider: UVProvider, host: Host) -> RingElement:
    if not gens:
        raise ValueError("need at least one generator")
    out = gens[0]
    for g in gens[1:]:
        out = combine(out, g, provider, host)
    return out


# ------------------------------------------------------------- Jacobson


@dataclass(frozen=True)
class IdealGens:
    gens: tuple

    def __post_init__(self):
        if not self.gens:
            raise ValueError("ideal needs at least one generator")

    def common_zeros(self) -> frozenset:
        out = self.gens[0].zero_indices()
        for g in self.gens[1:]:
            out &= g.zero_indices()
        return out


@dataclass(frozen=True)
class PointKernel:
    """The maximal ideal {f : f(x_i) = 0}."""

    index: int

    def contains(self, f: RingElement) -> bool:
        return f.values[self.index] == 0


def maximal_ideals(points: PointSet) -> list[PointKernel]:
    return [PointKernel(i) for i in range(len(points))]


def jac_oracle(I: IdealGens, g: RingElement) -> bool:
    """g in Jac(I): g lies in every maximal ideal containing I."""
    points = I.gens[0].points
    over = [m for m in maximal_ideals(points) if all(m.contains(f) for f in I.gens)]
    return all(m.contains(g) for m in over)


def zero_set_inclusion(I: IdealGens, g: RingElement) -> bool:
    return I.common_zeros() <= g.zero_indices()


def unit_mod(I: IdealGens, u: RingElement) -> bool:
    """u is a unit in K^X / I: nonzero at every common zero of I."""
    return all(u.values[i] != 0 for i in I.common_zeros())


def jac_unit_criterion(I: IdealGens, g: RingElement, pool: Sequence[RingElement]) -> bool | None:
    """Three-valued test of: for every h, 1 + h·g is a unit modulo I.

    Returns None when the pool neither refutes the claim nor the
    coordinatewise certificate applies.
    """
    Z = I.common_zeros()
    if not Z:
        return True
    if not pool:
        return None
    one = RingElement.const(g.points, 1)
    for h in pool:
        if not unit_mod(I, one + h * g):
            return False
    # 1 + h(x)g(x) at a common zero x is 1 for every h exactly when g(x) = 0
    if all(g.values[i] == 0 for i in Z):
        return True
    return None


# ------------------------------------------------------------- model I/O


@dataclass
class FiniteModelSpec:
    host: Host
    points: PointSet
    elements: dict = field(default_factory=dict)


def load_model(data: dict | str) -> FiniteModelSpec:
    """Parse {host, points, elements: {name: ["a/b", ...]}}."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        host = parse_host(data.get("host", "ordered-q"))
        points = PointSet(tuple(str(p) for p in data["points"]))
        elements = {name: RingElement.of(points, vals)
                    for name, vals in data.get("elements", {}).items()}
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"bad model file: {e}") from e
    return FiniteModelSpec(host, points, elements)


def dump_model(spec: FiniteModelSpec) -> dict:
    return {
        "host": spec.host.name,
        "points": list(spec.points.labels),
        "elements": {k: [str(v) for v in e.values] for k, e in spec.elements.items()},
    }
