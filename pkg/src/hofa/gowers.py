"""Gowers uniformity norms, Gowers inner products and corner convolutions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import sampling
from .configurations import configuration_mean
from .groups import (DEFAULT_TOL, FiniteAbelianGroup, GroupFunction, fourier_transform,
                     iter_subsets, lp_norm)

IMAG_TOL = 1e-9


class DiagnosticError(ArithmeticError):
    """A quantity that must be real came out with a non-negligible imaginary part."""


def conjugates(subset) -> bool:
    """Conjugation rule: conjugate iff the subset (or cube vertex) has odd weight."""
    if isinstance(subset, (frozenset, set)):
        return len(subset) % 2 == 1
    return sum(subset) % 2 == 1


def _maybe_conj(vals: np.ndarray, conj: bool) -> np.ndarray:
    return vals.conj() if conj else vals


def _as_index(group: FiniteAbelianGroup, t) -> int:
    if isinstance(t, (int, np.integer)):
        return int(t)
    return group.index(group.reduce(t))


def delta(f: GroupFunction, t) -> GroupFunction:
    """(Delta_t f)(x) = f(x) conj(f(x + t)); ``t`` is an element tuple or index."""
    ti = _as_index(f.group, t)
    shifted = f.values[f.group.add_table[:, ti]]
    return GroupFunction(f.group, f.values * shifted.conj(), bound=f.bound ** 2)


# -- exact norms -------------------------------------------------------------

def _power_recursive(vals: np.ndarray, k: int, add: np.ndarray) -> float:
    if k == 1:
        return float(abs(vals.mean()) ** 2)
    derived = vals[None, :] * vals[add].conj()  # row t: Delta_t f
    if k == 2:
        return float(np.mean(np.abs(derived.mean(axis=1)) ** 2))
    per_t = np.array([_power_recursive(row, k - 1, add) for row in derived])
    return float(per_t.mean())


def gowers_power_exact(f: GroupFunction, k: int) -> float:
    """||f||_{U_k}^{2^k}, via ||f||_{U_k}^{2^k} = E_t ||Delta_t f||_{U_{k-1}}^{2^{k-1}}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    add = f.group.add_table
    return _power_recursive(f.values, k, add)


def gowers_norm_exact(f: GroupFunction, k: int) -> float:
    return max(gowers_power_exact(f, k), 0.0) ** (1.0 / 2 ** k)


def gowers_norm_nested(f: GroupFunction, k: int) -> float:
    """Definition-level evaluation: the full (k+1)-fold average of the cube product."""
    if k < 1:
        raise ValueError("k must be >= 1")
    power = gowers_inner_product(FunctionSystem.constant(f, k))
    if abs(power.imag) > IMAG_TOL:
        raise DiagnosticError(f"U_{k} power has imaginary part {power.imag:.3e}")
    return max(power.real, 0.0) ** (1.0 / 2 ** k)


def u2_via_fourier(f: GroupFunction) -> float:
    lam = fourier_transform(f)
    return float(np.sum(np.abs(lam) ** 4) ** 0.25)


# -- sampled norms -----------------------------------------------------------

@dataclass(frozen=True)
class SampledNorm:
    """Monte-Carlo estimate of ||f||_{U_k}.

    ``power``/``power_stderr`` estimate ||f||_{U_k}^{2^k}; ``estimate`` is the
    2^k-th root of the power clamped at zero and ``stderr`` its delta-method error.
    """
    estimate: float
    stderr: float
    power: float
    power_stderr: float
    k: int
    num_samples: int


def _cube_products(f: GroupFunction, k: int, seed: int, start: int, stop: int) -> np.ndarray:
    group = f.group
    r = group.rank
    rows = np.zeros((stop - start, (k + 1) * r), dtype=np.int64)
    if r:
        rows = sampling.integer_rows(seed, 0, start, stop, list(group.cyclic_factors) * (k + 1))
    pts = rows.reshape(stop - start, k + 1, r)
    out = np.ones(stop - start, dtype=complex)
    for v in itertools.product((0, 1), repeat=k):
        c = pts[:, 0, :] + np.tensordot(pts[:, 1:, :], np.array(v), axes=([1], [0])) if k else pts[:, 0, :]
        vals = f.values[group.index(c)] if r else f.values[np.zeros(len(c), dtype=int)]
        out *= _maybe_conj(vals, sum(v) % 2 == 1)
    return out


def gowers_norm_sampled(f: GroupFunction, k: int, num_samples: int, seed: int,
                        workers: int = 1) -> SampledNorm:
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    vals = sampling.map_samples(lambda a, b: _cube_products(f, k, seed, a, b).real, num_samples, workers)
    mean, se = sampling.mean_and_stderr(vals)
    mean = float(mean)
    root = 1.0 / 2 ** k
    est = max(mean, 0.0) ** root
    if mean > 0:
        se_root = root * mean ** (root - 1) * se
    else:
        se_root = se ** root
    return SampledNorm(est, float(se_root), mean, se, k, num_samples)


# -- function systems ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FunctionSystem:
    """Functions indexed by subsets of {1..dim}.

    ``corner=False`` indexes by all subsets (Gowers inner product); ``corner=True``
    by the nonempty subsets K_n (corner convolution).
    """
    dim: int
    entries: Mapping[frozenset, GroupFunction]
    corner: bool = False

    def __post_init__(self):
        entries = {frozenset(s): f for s, f in self.entries.items()}
        expected = set(iter_subsets(self.dim, nonempty=self.corner))
        missing = expected - set(entries)
        if missing:
            raise ValueError(f"incomplete function system: missing {sorted(map(sorted, missing))}")
        extra = set(entries) - expected
        if extra:
            raise ValueError(f"unexpected index sets {sorted(map(sorted, extra))}")
        groups = {f.group for f in entries.values()}
        if len(groups) != 1:
            raise ValueError("all functions in a system must share one group")
        object.__setattr__(self, "entries", entries)

    @property
    def group(self) -> FiniteAbelianGroup:
        return next(iter(self.entries.values())).group

    def index_sets(self) -> list[frozenset]:
        return list(iter_subsets(self.dim, nonempty=self.corner))

    def __getitem__(self, subset) -> GroupFunction:
        return self.entries[frozenset(subset)]

    def replace(self, subset, g: GroupFunction) -> "FunctionSystem":
        entries = dict(self.entries)
        entries[frozenset(subset)] = g
        return FunctionSystem(self.dim, entries, self.corner)

    @classmethod
    def constant(cls, f: GroupFunction, dim: int, corner: bool = False) -> "FunctionSystem":
        return cls(dim, {s: f for s in iter_subsets(dim, nonempty=corner)}, corner)

    @classmethod
    def random(cls, group: FiniteAbelianGroup, dim: int, rng: np.random.Generator,
               corner: bool = False, bound: float = 1.0) -> "FunctionSystem":
        return cls(dim, {s: GroupFunction.random(group, rng, bound)
                         for s in iter_subsets(dim, nonempty=corner)}, corner)


def gowers_inner_product(system: FunctionSystem) -> complex:
    """(F) = E_{x,t} prod_{S subset [k]} f_S^{eps(S)}(x + sum_{i in S} t_i)."""
    if system.corner:
        raise ValueError("Gowers inner product needs a system over all subsets")
    terms = [((0, *sorted(s)), _maybe_conj(system[s].values, conjugates(s)))
             for s in system.index_sets()]
    return configuration_mean(system.group, system.dim + 1, terms)


def gcs_gap(system: FunctionSystem) -> float:
    """prod_S ||f_S||_{U_k} - |(F)|; nonnegative by Gowers-Cauchy-Schwarz."""
    k = system.dim
    rhs = float(np.prod([gowers_norm_exact(system[s], k) for s in system.index_sets()]))
    return rhs - abs(gowers_inner_product(system))


def corner_convolution_all(system: FunctionSystem) -> np.ndarray:
    """K_n(F)(x) for every x, in element enumeration order."""
    if not system.corner:
        raise ValueError("corner convolution needs a system over nonempty subsets")
    terms = [((0, *sorted(s)), _maybe_conj(system[s].values, conjugates(s)))
             for s in system.index_sets()]
    return configuration_mean(system.group, system.dim + 1, terms, keep_first=True)


def corner_convolution(system: FunctionSystem, x) -> complex:
    """K_n(F)(x) = E_{t_1..t_n} prod_{S in K_n} f_S^{eps(S)}(x + sum_{i in S} t_i)."""
    if not system.corner:
        raise ValueError("corner convolution needs a system over nonempty subsets")
    group = system.group
    xi = _as_index(group, x)
    terms = []
    for s in system.index_sets():
        vals = _maybe_conj(system[s].values, conjugates(s))
        terms.append((tuple(i - 1 for i in sorted(s)), vals[group.add_table[:, xi]]))
    return configuration_mean(group, system.dim, terms)


def cornineq_bound(system: FunctionSystem, j: int) -> float:
    n = system.dim
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in [1, {n}]")
    out = 1.0
    for s in system.index_sets():
        f = system[s]
        out *= gowers_norm_exact(f, n) if j in s else lp_norm(f, 2 ** (n - 1))
    return out


def cornineq_gap(system: FunctionSystem, x, j: int) -> float:
    """Corner bound minus |K_n(F)(x)|; nonnegative for every j in [n]."""
    return cornineq_bound(system, j) - abs(corner_convolution(system, x))


def gowers_norms(f: GroupFunction, k_max: int) -> dict[int, float]:
    return {k: gowers_norm_exact(f, k) for k in range(1, k_max + 1)}
