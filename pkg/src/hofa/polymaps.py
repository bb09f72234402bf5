"""Polynomial maps in the sense of Leibman, with a binomial basis for abelian targets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Any, Callable, Sequence

import numpy as np

from .groups import FiniteAbelianGroup


def binom(x: int, j: int) -> int:
    """Extended binomial coefficient x(x-1)...(x-j+1)/j!, valid for negative x."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    num = 1
    for i in range(j):
        num *= x - i
    return num // factorial(j)


@dataclass(frozen=True)
class GroupOps:
    """Multiplication, inverse and identity of a target group, plus an equality test."""
    mul: Callable[[Any, Any], Any]
    inv: Callable[[Any], Any]
    identity: Any
    eq: Callable[[Any, Any], bool] = lambda a, b: a == b


def abelian_ops(group: FiniteAbelianGroup) -> GroupOps:
    mod = group.cyclic_factors
    return GroupOps(
        mul=lambda a, b: tuple((x + y) % m for x, y, m in zip(a, b, mod)),
        inv=lambda a: tuple((-x) % m for x, m in zip(a, mod)),
        identity=(0,) * group.rank,
    )


INTEGER_OPS = GroupOps(mul=lambda a, b: a + b, inv=lambda a: -a, identity=0)


@dataclass(frozen=True)
class BinomialPolyMap:
    """x -> sum_terms a * prod_i C(x_i, n_i) from Z^d into a finite abelian group."""
    target: FiniteAbelianGroup
    d: int
    terms: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self):
        clean = []
        for coeff, exps in self.terms:
            coeff = tuple(int(c) for c in np.atleast_1d(coeff))
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.d or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps}")
            clean.append((self.target.reduce(coeff), exps))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    def __call__(self, x) -> tuple[int, ...]:
        x = (x,) if isinstance(x, (int, np.integer)) else tuple(x)
        if len(x) != self.d:
            raise ValueError(f"expected {self.d} coordinates")
        out = [0] * self.target.rank
        for coeff, exps in self.terms:
            scalar = 1
            for xi, ni in zip(x, exps):
                scalar *= binom(int(xi), ni)
            for r, c in enumerate(coeff):
                out[r] += scalar * c
        return tuple(v % m for v, m in zip(out, self.target.cyclic_factors))


def _shift(g, h):
    if isinstance(g, tuple):
        return tuple(a + b for a, b in zip(g, h))
    return g + h


def leibman_derivative(phi: Callable, h, ops: GroupOps = INTEGER_OPS) -> Callable:
    """g -> phi(g)^{-1} phi(g h) for a map from Z^d (or Z) into a group."""
    return lambda g: ops.mul(ops.inv(phi(g)), phi(_shift(g, h)))


def iterated_derivative(phi: Callable, shifts: Sequence, ops: GroupOps = INTEGER_OPS) -> Callable:
    out = phi
    for h in shifts:
        out = leibman_derivative(out, h, ops)
    return out


def _box_points(box) -> list:
    """``box`` is a range (one variable) or a sequence of ranges (Z^d)."""
    if isinstance(box, range):
        return list(box)
    return list(itertools.product(*box))


def degree_check(phi: Callable, k: int, box, shifts=None, ops: GroupOps = INTEGER_OPS) -> bool:
    """True iff every (k+1)-fold Leibman derivative of phi vanishes on the box.

    Base points run over ``box`` and each shift over ``shifts`` (default: the box
    itself minus zero).  A finite box only falsifies, it never proves.
    """
    bases = _box_points(box)
    shift_pool = [h for h in _box_points(shifts if shifts is not None else box)
                  if (any(h) if isinstance(h, tuple) else h != 0)]
    cache: dict = {}

    def cached(g):
        if g not in cache:
            cache[g] = phi(g)
        return cache[g]

    for hs in itertools.product(shift_pool, repeat=k + 1):
        d = iterated_derivative(cached, hs, ops)
        for g in bases:
            if not ops.eq(d(g), ops.identity):
                return False
    return True


def polynomial_degree(phi: Callable, box, shifts=None, ops: GroupOps = INTEGER_OPS, k_max: int = 6) -> int | None:
    """Smallest k <= k_max passing ``degree_check``, or None."""
    for k in range(k_max + 1):
        if degree_check(phi, k, box, shifts, ops):
            return k
    return None


# -- brute-force spanning on a grid ---------------------------------------------

def grid_degree_constraints(side: int, k: int, modulus: int) -> np.ndarray:
    """Coefficient rows (over the side x side grid) of every (k+1)-fold derivative
    on Z^2 whose 2^(k+1) evaluation points stay inside the grid."""
    cells = list(itertools.product(range(side), repeat=2))
    pos = {c: i for i, c in enumerate(cells)}
    steps = [h for h in itertools.product(range(-(side - 1), side), repeat=2) if any(h)]
    rows = set()
    for g in cells:
        for hs in itertools.combinations_with_replacement(steps, k + 1):
            row = [0] * len(cells)
            ok = True
            for eps in itertools.product((0, 1), repeat=k + 1):
                p = (g[0] + sum(e * h[0] for e, h in zip(eps, hs)),
                     g[1] + sum(e * h[1] for e, h in zip(eps, hs)))
                if p not in pos:
                    ok = False
                    break
                row[pos[p]] += (-1) ** (k + 1 - sum(eps))
            if ok:
                rows.add(tuple(r % modulus for r in row))
    rows.discard(tuple([0] * len(cells)))
    return np.array(sorted(rows), dtype=np.int64).reshape(-1, len(cells))


def grid_degree_survivors(side: int, k: int, modulus: int = 2) -> set[tuple[int, ...]]:
    """All maps grid -> Z_modulus with Leibman degree <= k on the grid (brute force)."""
    cells = side * side
    total = modulus ** cells
    if total > 2 ** 20:
        raise ValueError("grid too large for brute force")
    maps = np.stack(np.unravel_index(np.arange(total), (modulus,) * cells), axis=1).astype(np.int64)
    cons = grid_degree_constraints(side, k, modulus)
    ok = np.all(np.mod(maps @ cons.T, modulus) == 0, axis=1)
    return {tuple(r) for r in maps[ok].tolist()}


def binomial_span(side: int, k: int, modulus: int = 2) -> set[tuple[int, ...]]:
    """Restrictions to the grid of all combinations of C(x,i)C(y,j), i+j <= k."""
    group = FiniteAbelianGroup((modulus,))
    exps = [(i, j) for i in range(k + 1) for j in range(k + 1 - i)]
    cells = list(itertools.product(range(side), repeat=2))
    out = set()
    for coeffs in itertools.product(range(modulus), repeat=len(exps)):
        phi = BinomialPolyMap(group, 2, tuple(((c,), e) for c, e in zip(coeffs, exps)))
        out.add(tuple(phi(c)[0] for c in cells))
    return out
