"""Exact Heisenberg group arithmetic and the nilmanifold sequence k -> e(k^2 t / m^2).

Elements are triples (a, b, c) of the upper unitriangular matrix
[[1, a, c], [0, 1, b], [0, 0, 1]] with exact rational entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .groups import FiniteAbelianGroup, GroupFunction, e
from .polymaps import GroupOps, degree_check

Q = Fraction


@dataclass(frozen=True)
class HeisenbergElement:
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def identity(cls) -> "HeisenbergElement":
        return cls()

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return HeisenbergElement(self.a + other.a, self.b + other.b,
                                 self.c + other.c + self.a * other.b)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.a, -self.b, self.a * self.b - self.c)

    def __pow__(self, k: int) -> "HeisenbergElement":
        base = self if k >= 0 else self.inverse()
        out, k = HeisenbergElement(), abs(int(k))
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in (self.a, self.b, self.c))

    @property
    def in_fundamental_domain(self) -> bool:
        return all(0 <= x < 1 for x in (self.a, self.b, self.c))

    @property
    def is_central(self) -> bool:
        return self.a == 0 and self.b == 0

    def matrix(self) -> list[list[Fraction]]:
        return [[Q(1), self.a, self.c], [Q(0), Q(1), self.b], [Q(0), Q(0), Q(1)]]

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


H_OPS = GroupOps(mul=HeisenbergElement.__mul__, inv=HeisenbergElement.inverse,
                 identity=HeisenbergElement())


def heis_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return g * h


def heis_inv(g: HeisenbergElement) -> HeisenbergElement:
    return g.inverse()


def heis_pow(g: HeisenbergElement, k: int) -> HeisenbergElement:
    return g ** k


def generator(m: int, t: int) -> HeisenbergElement:
    """M with entries a = 2t/m, b = 1/m, c = t/m^2."""
    return HeisenbergElement(Q(2 * t, m), Q(1, m), Q(t, m * m))


def closed_form_power(m: int, t: int, k: int) -> HeisenbergElement:
    return HeisenbergElement(Q(2 * k * t, m), Q(k, m), Q(k * k * t, m * m))


def reduce_to_fundamental_domain(g: HeisenbergElement) -> tuple[HeisenbergElement, HeisenbergElement]:
    """Return (g gamma, gamma) with gamma integral and g gamma in [0,1)^3.

    Right multiplication by (p, q, r) shifts b by q, a by p and c by r + a q,
    so q, p and then r are forced by the half-open convention.
    """
    q = -math.floor(g.b)
    p = -math.floor(g.a)
    r = -math.floor(g.c + g.a * q)
    gamma = HeisenbergElement(p, q, r)
    return g * gamma, gamma


def nilmanifold_value(point: HeisenbergElement) -> complex:
    """The function D -> C sending an element to e(c)."""
    return e(float(point.c))


def pipeline_value(m: int, t: int, k: int) -> complex:
    point, _ = reduce_to_fundamental_domain(generator(m, t) ** k)
    return nilmanifold_value(point)


def _check_params(m: int, t: int):
    if not 1 < t < m:
        raise ValueError(f"need 1 < t < m, got t={t}, m={m}")


def heis_sequence(m: int, t: int) -> GroupFunction:
    """k -> g(M^k Gamma) on Z_m, computed through exact reduction."""
    _check_params(m, t)
    group = FiniteAbelianGroup((m,))
    return GroupFunction(group, np.array([pipeline_value(m, t, k) for k in range(m)]), bound=1.0)


def heis_sequence_direct(m: int, t: int) -> GroupFunction:
    """k -> lambda^{k^2} with lambda = e(t/m^2), via exact k^2 t mod m^2."""
    _check_params(m, t)
    group = FiniteAbelianGroup((m,))
    return GroupFunction(group, np.array([e(((k * k * t) % (m * m)) / (m * m)) for k in range(m)]), bound=1.0)


def heis_table(m: int, t: int) -> list[tuple[int, complex, complex, float]]:
    """Rows (k, pipeline value, direct value, |difference|)."""
    pipe, direct = heis_sequence(m, t).values, heis_sequence_direct(m, t).values
    return [(k, complex(pipe[k]), complex(direct[k]), float(abs(pipe[k] - direct[k]))) for k in range(m)]


# -- filtration and V-polynomials --------------------------------------------------

def filtration_contains(level: int, g: HeisenbergElement) -> bool:
    """F_0 = F_1 = H, F_2 = centre, F_3 = 1."""
    if level <= 1:
        return True
    if level == 2:
        return g.is_central
    return g == HeisenbergElement()


def quotient_ops(level: int) -> tuple[Callable[[HeisenbergElement], object], GroupOps]:
    """Projection H -> H/F_level and the group law of the quotient."""
    if level <= 1:
        return (lambda g: ()), GroupOps(lambda x, y: (), lambda x: (), ())
    if level == 2:
        return ((lambda g: (g.a, g.b)),
                GroupOps(lambda x, y: (x[0] + y[0], x[1] + y[1]), lambda x: (-x[0], -x[1]), (Q(0), Q(0))))
    return (lambda g: g), H_OPS


def commutator(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return g.inverse() * h.inverse() * g * h


def filtration_is_valid(generators: list[HeisenbergElement], top: int = 3) -> bool:
    """F_{i+1} in F_i and [F_i, H] in F_{i+1}, checked on the given elements."""
    for i in range(top):
        for g in generators:
            if filtration_contains(i + 1, g) and not filtration_contains(i, g):
                return False
            if not filtration_contains(i, g):
                continue
            for h in generators:
                if not filtration_contains(i + 1, commutator(g, h)):
                    return False
    return True


def v_polynomial_levels(phi: Callable[[int], HeisenbergElement], box: range = range(-8, 9),
                        shifts: range = range(-2, 3), top: int = 3) -> dict[int, bool]:
    """For each level i in 0..top, whether phi mod F_i has Leibman degree <= i on the box."""
    out = {}
    for level in range(top + 1):
        proj, ops = quotient_ops(level)
        out[level] = degree_check(lambda k: proj(phi(k)), level, box, shifts, ops)
    return out


def v_polynomial_check(phi: Callable[[int], HeisenbergElement], box: range = range(-8, 9),
                       shifts: range = range(-2, 3), top: int = 3) -> bool:
    return all(v_polynomial_levels(phi, box, shifts, top).values())
