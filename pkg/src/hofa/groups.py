"""Finite abelian groups Z_{m_1} x ... x Z_{m_r}, functions on them, and characters.

Elements are enumerated lexicographically (first factor most significant), which
is numpy's C order for an array of shape ``cyclic_factors``.  Functions are dense
complex vectors in that order.  Averages are normalized (uniform Haar measure).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from . import sampling

MAX_ORDER = 2 ** 20
DEFAULT_TOL = 1e-9


def e(x):
    """e(x) = exp(2 pi i x)."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    cyclic_factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(m) for m in self.cyclic_factors)
        if any(m < 2 for m in factors):
            raise ValueError(f"cyclic factors must be >= 2, got {factors}")
        order = int(np.prod(factors, dtype=object)) if factors else 1
        if order > MAX_ORDER:
            raise ValueError(f"group order {order} exceeds cap {MAX_ORDER}")
        object.__setattr__(self, "cyclic_factors", factors)

    @classmethod
    def cyclic(cls, m: int) -> "FiniteAbelianGroup":
        return cls((m,))

    @property
    def order(self) -> int:
        return int(np.prod(self.cyclic_factors)) if self.cyclic_factors else 1

    @property
    def rank(self) -> int:
        return len(self.cyclic_factors)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        if not self.cyclic_factors:
            return "Z_1"
        return " x ".join(f"Z_{m}" for m in self.cyclic_factors)

    # -- element indexing -------------------------------------------------

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates of all elements, shape (order, rank), in enumeration order."""
        if not self.cyclic_factors:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.unravel_index(np.arange(self.order), self.cyclic_factors)
        return np.stack(grids, axis=1).astype(np.int64)

    def index(self, coords) -> np.ndarray | int:
        """Flat index of element(s); the last axis of ``coords`` holds coordinates."""
        c = np.asarray(coords, dtype=np.int64)
        if not self.cyclic_factors:
            return np.zeros(c.shape[:-1], dtype=np.int64) if c.ndim > 1 else 0
        c = np.mod(c, self.cyclic_factors)
        idx = np.ravel_multi_index(tuple(np.moveaxis(c, -1, 0)), self.cyclic_factors)
        return int(idx) if np.ndim(idx) == 0 else idx

    def element(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.coords[index])

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.coords]

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(c) % m for c, m in zip(coords, self.cyclic_factors))

    def add(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.cyclic_factors))

    def neg(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple((-a) % m for a, m in zip(x, self.cyclic_factors))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[i, j]`` is the index of element_i + element_j."""
        c = self.coords
        return self.index(c[:, None, :] + c[None, :, :])

    @cached_property
    def neg_index(self) -> np.ndarray:
        return self.index(-self.coords)

    def sum_index(self, *index_arrays: np.ndarray) -> np.ndarray:
        """Index of the sum of elements given by broadcastable index arrays."""
        total = 0
        for idx in index_arrays:
            total = total + self.coords[np.asarray(idx)]
        if isinstance(total, int):
            return np.asarray(0)
        return self.index(total)

    # -- characters -------------------------------------------------------

    def characters(self) -> list["Character"]:
        return [Character(self, f) for f in self.elements()]

    @cached_property
    def character_table(self) -> np.ndarray:
        """Row ``c`` is the character with frequency element_c evaluated on all x."""
        if not self.rank:
            return np.ones((1, 1), dtype=complex)
        phase = np.zeros((self.order, self.order))
        for i, m in enumerate(self.cyclic_factors):
            col = self.coords[:, i]
            phase += np.mod(np.outer(col, col), m) / m
        return e(phase)

    # -- sampling ---------------------------------------------------------

    def random_indices(self, seed: int, n: int, stream: int = 0, start: int = 0) -> np.ndarray:
        """Indices of samples ``start..start+n-1`` of a seeded uniform stream."""
        if not self.cyclic_factors:
            return np.zeros(n, dtype=np.int64)
        rows = sampling.integer_rows(seed, stream, start, start + n, self.cyclic_factors)
        return self.index(rows)

    def random_element(self, rng: np.random.Generator) -> tuple[int, ...]:
        return tuple(int(rng.integers(0, m)) for m in self.cyclic_factors)

    def to_json(self) -> dict:
        return {"cyclic_factors": list(self.cyclic_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteAbelianGroup":
        return cls(tuple(data["cyclic_factors"]))


def enumerate_elements(group: FiniteAbelianGroup) -> list[tuple[int, ...]]:
    return group.elements()


@dataclass(frozen=True)
class Character:
    group: FiniteAbelianGroup
    freq: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "freq", self.group.reduce(self.freq))

    @property
    def is_trivial(self) -> bool:
        return not any(self.freq)

    def phase(self, coords) -> np.ndarray:
        """sum_i c_i x_i / m_i, each term reduced mod 1 in exact integers."""
        c = np.asarray(coords, dtype=np.int64)
        freq = np.asarray(self.freq, dtype=np.int64)
        moduli = np.asarray(self.group.cyclic_factors, dtype=np.int64)
        return np.sum(np.mod(c * freq, moduli) / moduli, axis=-1)

    def __call__(self, x) -> complex:
        return complex(e(self.phase(np.asarray(x))))

    def values(self) -> np.ndarray:
        if not self.group.rank:
            return np.ones(1, dtype=complex)
        return e(self.phase(self.group.coords))

    def as_function(self) -> "GroupFunction":
        return GroupFunction(self.group, self.values(), bound=1.0)

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, self.group.add(self.freq, other.freq))

    def __pow__(self, k: int) -> "Character":
        return Character(self.group, tuple(k * c for c in self.freq))

    def conj(self) -> "Character":
        return Character(self.group, self.group.neg(self.freq))


@dataclass(frozen=True, eq=False)
class GroupFunction:
    group: FiniteAbelianGroup
    values: np.ndarray
    bound: float | None = field(default=None)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.group.order:
            raise ValueError(f"expected {self.group.order} values, got {vals.shape[0]}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        sup = float(np.max(np.abs(vals))) if vals.size else 0.0
        if self.bound is None:
            object.__setattr__(self, "bound", sup)
        elif sup > self.bound * (1 + 1e-12) + 1e-12:
            raise ValueError(f"declared bound {self.bound} < sup |f| = {sup}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_callable(cls, group: FiniteAbelianGroup, fn: Callable[[tuple[int, ...]], complex]):
        return cls(group, [fn(x) for x in group.elements()])

    @classmethod
    def constant(cls, group: FiniteAbelianGroup, c: complex = 1.0):
        return cls(group, np.full(group.order, c, dtype=complex))

    @classmethod
    def indicator(cls, group: FiniteAbelianGroup, elements) -> "GroupFunction":
        vals = np.zeros(group.order, dtype=complex)
        for x in elements:
            vals[group.index(group.reduce(x))] = 1.0
        return cls(group, vals)

    @classmethod
    def random(cls, group: FiniteAbelianGroup, rng: np.random.Generator, bound: float = 1.0):
        """Random function with values uniform in the disc of radius ``bound``."""
        r = bound * np.sqrt(rng.random(group.order))
        return cls(group, r * e(rng.random(group.order)), bound=bound)

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "GroupFunction"):
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def __add__(self, other):
        if isinstance(other, GroupFunction):
            self._check(other)
            return GroupFunction(self.group, self.values + other.values)
        return GroupFunction(self.group, self.values + other)

    def __sub__(self, other):
        if isinstance(other, GroupFunction):
            self._check(other)
            return GroupFunction(self.group, self.values - other.values)
        return GroupFunction(self.group, self.values - other)

    def __mul__(self, other):
        if isinstance(other, GroupFunction):
            self._check(other)
            return GroupFunction(self.group, self.values * other.values)
        return GroupFunction(self.group, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return GroupFunction(self.group, -self.values, bound=self.bound)

    def conj(self) -> "GroupFunction":
        return GroupFunction(self.group, self.values.conj(), bound=self.bound)

    def shift(self, t_index: int) -> "GroupFunction":
        """x -> f(x + t)."""
        return GroupFunction(self.group, self.values[self.group.add_table[:, t_index]], bound=self.bound)

    def __call__(self, x) -> complex:
        return complex(self.values[self.group.index(self.group.reduce(x))])

    def mean(self) -> complex:
        return complex(self.values.mean())

    def allclose(self, other: "GroupFunction", tol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.values - other.values), initial=0.0) <= tol)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroupFunction":
        group = FiniteAbelianGroup.from_json(data["group"])
        vals = np.asarray(data["values"], dtype=float)
        if vals.ndim != 2 or vals.shape[1] != 2:
            raise ValueError("values must be a list of [re, im] pairs")
        return cls(group, vals[:, 0] + 1j * vals[:, 1])


# -- inner products, norms, Fourier -------------------------------------------

def scalar_product(f: GroupFunction, g: GroupFunction) -> complex:
    """Normalized inner product E_x f(x) conj(g(x))."""
    f._check(g)
    return complex(np.mean(f.values * g.values.conj()))


def lp_norm(f: GroupFunction, p: float) -> float:
    if p <= 0:
        raise ValueError("p must be positive")
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    return float(np.mean(np.abs(f.values) ** p) ** (1.0 / p))


def fourier_transform(f: GroupFunction, fast: bool = True) -> np.ndarray:
    """Fourier coefficients lambda_chi = (f, chi), indexed by frequency enumeration order.

    ``fast`` uses numpy's multidimensional FFT over the cyclic factors; the naive
    O(|A|^2) path multiplies by the character table.
    """
    group = f.group
    if not group.rank:
        return f.values.copy()
    if fast:
        arr = f.values.reshape(group.cyclic_factors)
        return np.fft.fftn(arr).reshape(-1) / group.order
    return group.character_table.conj() @ f.values / group.order


def fourier_coefficients(f: GroupFunction) -> dict[Character, complex]:
    lam = fourier_transform(f)
    return {Character(f.group, c): complex(v) for c, v in zip(f.group.elements(), lam)}


def inverse_fourier(group: FiniteAbelianGroup, coeffs: np.ndarray) -> GroupFunction:
    """f(x) = sum_chi lambda_chi chi(x)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if not group.rank:
        return GroupFunction(group, coeffs)
    arr = coeffs.reshape(group.cyclic_factors)
    return GroupFunction(group, np.fft.ifftn(arr).reshape(-1) * group.order)


def random_element(group: FiniteAbelianGroup, rng: np.random.Generator) -> tuple[int, ...]:
    return group.random_element(rng)


def iter_subsets(n: int, nonempty: bool = False) -> Iterator[frozenset[int]]:
    """Subsets of {1..n} ordered by size, then lexicographically."""
    for size in range(1 if nonempty else 0, n + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            yield frozenset(combo)
