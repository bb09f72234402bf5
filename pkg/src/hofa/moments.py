"""Configuration moments, the joint distributions D_n(f), and moments of limit objects."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import sampling
from .configurations import configuration_mean
from .groups import FiniteAbelianGroup, GroupFunction, e, iter_subsets

EXACT_CAP = 10 ** 7
GOLDEN = (1 + math.sqrt(5)) / 2
ALPHA = math.sqrt(2) - 1

# sampling streams
_STREAM_MOMENT = 1
_STREAM_DN = 2
_STREAM_ROOTED = 3
_STREAM_TORUS = 4
_STREAM_HEIS = 5


@dataclass(frozen=True)
class Term:
    power: int = 1
    conjugate: bool = False


@dataclass(frozen=True, eq=False)
class MomentSpec:
    """A decorated hypergraph on [n]: edge S carries a power and a conjugation flag."""
    n: int
    terms: Mapping[frozenset, Term]

    def __post_init__(self):
        clean = {}
        for s, t in self.terms.items():
            s = frozenset(int(i) for i in s)
            if not s or not s <= set(range(1, self.n + 1)):
                raise ValueError(f"edge {sorted(s)} is not a nonempty subset of [1..{self.n}]")
            if not isinstance(t, Term):
                t = Term(*t)
            if t.power < 0:
                raise ValueError("powers must be nonnegative")
            if t.power:
                clean[s] = t
        if not clean:
            raise ValueError("a moment needs at least one edge with positive power")
        ordered = {s: clean[s] for s in iter_subsets(self.n, nonempty=True) if s in clean}
        object.__setattr__(self, "terms", ordered)

    @property
    def simple(self) -> bool:
        return all(t.power <= 1 for t in self.terms.values())

    @property
    def degree(self) -> int:
        return max(len(s) for s in self.terms) - 1

    def relabel(self, perm: Sequence[int]) -> "MomentSpec":
        """Apply i -> perm[i-1] to every vertex."""
        return MomentSpec(self.n, {frozenset(perm[i - 1] for i in s): t for s, t in self.terms.items()})

    def key(self) -> tuple:
        return (self.n, tuple((tuple(sorted(s)), t.power, t.conjugate) for s, t in self.terms.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, MomentSpec) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def label(self) -> str:
        parts = []
        for s, t in self.terms.items():
            name = "".join(str(i) for i in sorted(s))
            parts.append(("~" if t.conjugate else "") + name + (f"^{t.power}" if t.power != 1 else ""))
        return f"n{self.n}:" + ".".join(parts)

    def to_json(self) -> dict:
        return {"n": self.n, "terms": [{"subset": sorted(s), "power": t.power, "conjugate": t.conjugate}
                                       for s, t in self.terms.items()]}

    @classmethod
    def from_json(cls, data: dict) -> "MomentSpec":
        terms = {}
        for item in data["terms"]:
            s = frozenset(item["subset"])
            if s in terms:
                raise ValueError(f"duplicate edge {sorted(s)}")
            terms[s] = Term(int(item.get("power", 1)), bool(item.get("conjugate", False)))
        return cls(int(data["n"]), terms)

    # common shapes
    @classmethod
    def single_edge(cls, n: int, subset: Iterable[int], conjugate: bool = False, power: int = 1) -> "MomentSpec":
        return cls(n, {frozenset(subset): Term(power, conjugate)})

    @classmethod
    def triangle(cls) -> "MomentSpec":
        return cls(3, {frozenset({1, 2}): Term(), frozenset({1, 3}): Term(), frozenset({2, 3}): Term()})

    @classmethod
    def full_edge(cls, k: int) -> "MomentSpec":
        return cls(k, {frozenset(range(1, k + 1)): Term()})

    @classmethod
    def cube(cls, k: int) -> "MomentSpec":
        """The U_k cube: variable 1 is the base point, edges {1} + T, conjugated iff |T| is odd."""
        terms = {}
        for t in [frozenset()] + list(iter_subsets(k, nonempty=True)):
            terms[frozenset({1} | {i + 1 for i in t})] = Term(1, len(t) % 2 == 1)
        return cls(k + 1, terms)


def all_simple_specs(n_max: int) -> list[MomentSpec]:
    """Every simple moment on n <= n_max variables (each edge absent, plain or conjugated)."""
    out = []
    for n in range(1, n_max + 1):
        subsets = list(iter_subsets(n, nonempty=True))
        for states in itertools.product((None, False, True), repeat=len(subsets)):
            terms = {s: Term(1, c) for s, c in zip(subsets, states) if c is not None}
            if terms:
                out.append(MomentSpec(n, terms))
    return out


def _factor(values: np.ndarray, term: Term) -> np.ndarray:
    v = values.conj() if term.conjugate else values
    return v ** term.power


# -- finite groups -----------------------------------------------------------------

def moment_exact(f: GroupFunction, spec: MomentSpec, cap: int = EXACT_CAP) -> complex:
    size = f.group.order ** spec.n
    if size > cap:
        raise ValueError(f"|A|^n = {size} exceeds the exact cap {cap}; use moment_sampled")
    terms = [(tuple(i - 1 for i in sorted(s)), _factor(f.values, t)) for s, t in spec.terms.items()]
    return configuration_mean(f.group, spec.n, terms)


def _sum_indices(group: FiniteAbelianGroup, xs: np.ndarray, subsets: Sequence[frozenset]) -> list[np.ndarray]:
    """Element indices of sum_{i in S} x_i for each S; xs has shape (N, n, rank)."""
    out = []
    for s in subsets:
        cols = [i - 1 for i in sorted(s)]
        out.append(group.index(xs[:, cols, :].sum(axis=1)))
    return out


def _draw_elements(group: FiniteAbelianGroup, seed: int, stream: int, start: int, stop: int, count: int) -> np.ndarray:
    r = group.rank
    if r == 0:
        return np.zeros((stop - start, count, 0), dtype=np.int64)
    rows = sampling.integer_rows(seed, stream, start, stop, list(group.cyclic_factors) * count)
    return rows.reshape(stop - start, count, r)


def _moment_samples(f: GroupFunction, spec: MomentSpec, seed: int, start: int, stop: int) -> np.ndarray:
    xs = _draw_elements(f.group, seed, _STREAM_MOMENT, start, stop, spec.n)
    out = np.ones(stop - start, dtype=complex)
    for idx, t in zip(_sum_indices(f.group, xs, list(spec.terms)), spec.terms.values()):
        out *= _factor(f.values[idx], t)
    return out


def moment_sampled(f: GroupFunction, spec: MomentSpec, num_samples: int, seed: int,
                   workers: int = 1) -> tuple[complex, float]:
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    vals = sampling.map_samples(lambda a, b: _moment_samples(f, spec, seed, a, b), num_samples, workers)
    mean, se = sampling.mean_and_stderr(vals)
    return complex(mean), se


@dataclass(eq=False)
class EmpiricalDistribution:
    """Samples of (f(sum_{i in S} x_i))_S over nonempty S in size-then-lex order."""
    n: int
    samples: np.ndarray
    bound: float | None = None

    @property
    def subsets(self) -> list[frozenset]:
        return list(iter_subsets(self.n, nonempty=True))

    @property
    def dimension(self) -> int:
        return 2 ** self.n - 1

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, subset) -> np.ndarray:
        return self.samples[:, self.subsets.index(frozenset(subset))]

    def moment(self, spec: MomentSpec) -> tuple[complex, float]:
        """Empirical mixed moment for a spec on at most n variables."""
        if spec.n > self.n:
            raise ValueError("spec uses more variables than the distribution")
        prod = np.ones(len(self.samples), dtype=complex)
        for s, t in spec.terms.items():
            prod *= _factor(self.column(s), t)
        mean, se = sampling.mean_and_stderr(prod)
        return complex(mean), se

    def mixed_moments(self, order: int = 4) -> dict[tuple, complex]:
        """E prod of coordinates (conjugated or not) for every multiset of size 1..order."""
        slots = [(j, c) for j in range(self.dimension) for c in (False, True)]
        out = {}
        for size in range(1, order + 1):
            for combo in itertools.combinations_with_replacement(slots, size):
                prod = np.ones(len(self.samples), dtype=complex)
                for j, c in combo:
                    col = self.samples[:, j]
                    prod *= col.conj() if c else col
                out[combo] = complex(prod.mean())
        return out

    def moment_distance(self, other: "EmpiricalDistribution", order: int = 4) -> float:
        a, b = self.mixed_moments(order), other.mixed_moments(order)
        return max(abs(a[key] - b[key]) for key in a)


def _dn_samples(f: GroupFunction, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    xs = _draw_elements(f.group, seed, _STREAM_DN, start, stop, n)
    idx = _sum_indices(f.group, xs, list(iter_subsets(n, nonempty=True)))
    return np.stack([f.values[i] for i in idx], axis=1)


def _rooted_samples(f: GroupFunction, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    group = f.group
    draws = _draw_elements(group, seed, _STREAM_ROOTED, start, stop, n + 1)
    x, ts = draws[:, 0, :], draws[:, 1:, :]
    root = group.index(x)
    cols = []
    for s in iter_subsets(n, nonempty=True):
        vertex = group.index(x + ts[:, [i - 1 for i in sorted(s)], :].sum(axis=1))
        cols.append(f.values[group.add_table[vertex, group.neg_index[root]]])
    return np.stack(cols, axis=1)


def sample_Dn(f: GroupFunction, n: int, num_samples: int, seed: int, workers: int = 1) -> EmpiricalDistribution:
    """N draws of D_n(f) from uniform (x_1, ..., x_n)."""
    data = sampling.map_samples(lambda a, b: _dn_samples(f, n, seed, a, b), num_samples, workers)
    return EmpiricalDistribution(n, data.reshape(num_samples, 2 ** n - 1), f.bound)


def sample_Dn_rooted(f: GroupFunction, n: int, num_samples: int, seed: int,
                     workers: int = 1) -> EmpiricalDistribution:
    """N draws of D_n(f) from uniform linear cubes x + sum v_i t_i translated to the root 0."""
    data = sampling.map_samples(lambda a, b: _rooted_samples(f, n, seed, a, b), num_samples, workers)
    return EmpiricalDistribution(n, data.reshape(num_samples, 2 ** n - 1), f.bound)


def cayley_hypergraph_density(group: FiniteAbelianGroup, subset: Iterable[int], k: int) -> float:
    """|{(x_1..x_k): sum x_i in S}| / |A|^k, by convolving counting vectors."""
    if k < 1:
        raise ValueError("k must be >= 1")
    members = np.zeros(group.order, dtype=bool)
    members[list(subset)] = True
    counts = np.zeros(group.order, dtype=object)
    counts[group.index(group.zero)] = 1
    for _ in range(k):
        nxt = np.zeros(group.order, dtype=object)
        for y in range(group.order):
            nxt[group.add_table[y]] += counts[y]
        counts = nxt
    return float(sum(counts[members]) / group.order ** k)


def cayley_edge_count_bruteforce(group: FiniteAbelianGroup, subset: Iterable[int], k: int) -> int:
    members = set(subset)
    count = 0
    for xs in itertools.product(range(group.order), repeat=k):
        total = group.index(group.zero)
        for x in xs:
            total = group.add_table[total, x]
        count += int(total) in members
    return count


# -- limit objects -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LimitObject:
    """A bounded function on a torus [0,1)^d or on the Heisenberg nilmanifold.

    ``evaluator`` is vectorized: torus kind receives an (N, d) array of points,
    heisenberg kind receives three arrays (a, b, c) of reduced coordinates.
    The root is 0 (torus) or the identity coset.
    """
    kind: str
    evaluator: Callable
    bound: float
    d: int = 0
    characters: tuple | None = None  # torus trigonometric polynomial: ((coeff, freq), ...)

    def __post_init__(self):
        if self.kind not in ("torus", "heisenberg"):
            raise ValueError(f"unknown limit kind {self.kind!r}")


def torus_trig_limit(terms: Sequence[tuple[complex, tuple[int, ...]]]) -> LimitObject:
    """g(x) = sum_j c_j e(xi_j . x) on [0,1)^d."""
    terms = tuple((complex(c), tuple(int(a) for a in xi)) for c, xi in terms)
    d = len(terms[0][1])
    freqs = np.array([xi for _, xi in terms], dtype=float).reshape(-1, d)
    coeffs = np.array([c for c, _ in terms])

    def evaluate(x: np.ndarray) -> np.ndarray:
        return e(x @ freqs.T) @ coeffs

    bound = float(np.sum(np.abs(coeffs)))
    return LimitObject("torus", evaluate, bound, d, terms)


def example1_limit() -> LimitObject:
    return torus_trig_limit([(1, (1, 0)), (1, (0, 1))])


def example2_limit() -> LimitObject:
    return LimitObject("heisenberg", lambda a, b, c: e(c), 1.0)


def constant_limit(value: complex = 1.0, d: int = 1) -> LimitObject:
    return torus_trig_limit([(value, (0,) * d)])


def torus_moment_exact(obj: LimitObject, spec: MomentSpec) -> complex:
    """Exact moment of a trigonometric polynomial: expand every factor into characters
    and keep the products whose frequency vanishes in every variable."""
    if obj.characters is None:
        raise ValueError("exact torus moments need a trigonometric-polynomial limit")
    factors = []
    for s, t in spec.terms.items():
        for _ in range(t.power):
            factors.append((s, t.conjugate))
    total = 0j
    for choice in itertools.product(obj.characters, repeat=len(factors)):
        freq = np.zeros((spec.n, obj.d), dtype=np.int64)
        coeff = 1 + 0j
        for (s, conj), (c, xi) in zip(factors, choice):
            sign = -1 if conj else 1
            coeff *= np.conj(c) if conj else c
            for i in s:
                freq[i - 1] += sign * np.array(xi)
        if not freq.any():
            total += coeff
    return complex(total)


def _torus_samples(obj: LimitObject, spec: MomentSpec, seed: int, start: int, stop: int) -> np.ndarray:
    u = sampling.uniform_rows(seed, _STREAM_TORUS, start, stop, spec.n * obj.d).reshape(-1, spec.n, obj.d)
    out = np.ones(stop - start, dtype=complex)
    for s, t in spec.terms.items():
        pts = np.mod(u[:, [i - 1 for i in sorted(s)], :].sum(axis=1), 1.0)
        out *= _factor(obj.evaluator(pts), t)
    return out


def heis_mul_arrays(g, h):
    return g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]


def reduce_arrays(a, b, c):
    """Floating-point reduction of H elements to the [0,1)^3 fundamental domain."""
    q = -np.floor(b)
    p = -np.floor(a)
    c2 = c + a * q
    r = -np.floor(c2)
    return a + p, b + q, c2 + r


def rooted_hk_cube(n: int, u: np.ndarray) -> dict[frozenset, tuple]:
    """Vertices of random rooted cubes in H, indexed by nonempty subsets.

    ``u`` has shape (N, 3n + C(n,2)): H coordinates for each codimension-1
    face {v_i = 1} followed by central coordinates for each codimension-2 face
    {v_i = v_j = 1}.  The vertex S is prod_{i in S} g_i (increasing i) times
    prod_{i<j in S} z_ij, and the root is the identity.
    """
    N = u.shape[0]
    gs = [(u[:, 3 * i], u[:, 3 * i + 1], u[:, 3 * i + 2]) for i in range(n)]
    pairs = list(itertools.combinations(range(n), 2))
    zs = {p: u[:, 3 * n + j] for j, p in enumerate(pairs)}
    out = {}
    for s in iter_subsets(n, nonempty=True):
        cur = (np.zeros(N), np.zeros(N), np.zeros(N))
        for i in sorted(s):
            cur = heis_mul_arrays(cur, gs[i - 1])
        central = sum((zs[(i - 1, j - 1)] for i, j in itertools.combinations(sorted(s), 2)), np.zeros(N))
        out[s] = (cur[0], cur[1], cur[2] + central)
    return out


def _heis_samples(obj: LimitObject, spec: MomentSpec, seed: int, start: int, stop: int) -> np.ndarray:
    n = spec.n
    width = 3 * n + n * (n - 1) // 2
    u = sampling.uniform_rows(seed, _STREAM_HEIS, start, stop, width)
    verts = rooted_hk_cube(n, u)
    out = np.ones(stop - start, dtype=complex)
    for s, t in spec.terms.items():
        out *= _factor(obj.evaluator(*reduce_arrays(*verts[s])), t)
    return out


def moment_on_limit(obj: LimitObject, spec: MomentSpec, num_samples: int, seed: int,
                    workers: int = 1) -> tuple[complex, float]:
    if obj.kind == "heisenberg":
        if not spec.simple:
            raise ValueError("nilmanifold moments are defined for simple specs only")
        fn = lambda a, b: _heis_samples(obj, spec, seed, a, b)
    else:
        fn = lambda a, b: _torus_samples(obj, spec, seed, a, b)
    vals = sampling.map_samples(fn, num_samples, workers)
    mean, se = sampling.mean_and_stderr(vals)
    return complex(mean), se


# -- example sequences and convergence -------------------------------------------------

def example1_function(m: int, a: int | None = None) -> GroupFunction:
    """k -> e(k/m) + e(a k/m) on Z_m, with a = round(golden ratio * m) by default."""
    a = round(GOLDEN * m) if a is None else a
    k = np.arange(m)
    group = FiniteAbelianGroup((m,))
    return GroupFunction(group, e(k / m) + e(((a * k) % m) / m), bound=2.0)


def example2_function(m: int, alpha: float = ALPHA) -> GroupFunction:
    """k -> lambda^{k^2} with lambda = e(floor(alpha m)/m^2)."""
    from .heisenberg import heis_sequence
    return heis_sequence(m, int(math.floor(alpha * m)))


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    spec_id: str
    value: complex
    limit: complex
    stderr: float = 0.0
    limit_stderr: float = 0.0

    @property
    def gap(self) -> float:
        return abs(self.value - self.limit)


def convergence_report(sequence: Callable[[int], GroupFunction], ms: Sequence[int],
                       specs: Mapping[str, MomentSpec], limit: LimitObject, num_samples: int = 10 ** 5,
                       seed: int = 0, sampled: bool | None = None, exact_limit: bool | None = None,
                       workers: int = 1) -> list[ConvergenceRow]:
    """Moments of f_m against the limit for every m and spec.

    ``sampled=None`` evaluates f_m exactly when |A|^n is within the exact cap.
    The limit side is exact for trigonometric torus limits unless
    ``exact_limit=False``.
    """
    if exact_limit is None:
        exact_limit = limit.kind == "torus" and limit.characters is not None
    limits = {}
    for sid, spec in specs.items():
        if exact_limit:
            limits[sid] = (torus_moment_exact(limit, spec), 0.0)
        else:
            limits[sid] = moment_on_limit(limit, spec, num_samples, seed, workers)
    rows = []
    for m in ms:
        f = sequence(m)
        for sid, spec in specs.items():
            use_sampling = sampled if sampled is not None else f.group.order ** spec.n > EXACT_CAP
            if use_sampling:
                val, se = moment_sampled(f, spec, num_samples, seed, workers)
            else:
                val, se = moment_exact(f, spec), 0.0
            lim, lse = limits[sid]
            rows.append(ConvergenceRow(m, sid, val, lim, se, lse))
    return rows


def fmt(x: float) -> str:
    return f"{x:.12g}"


CSV_HEADER = ("m", "spec_id", "re", "im", "limit_re", "limit_im", "gap")


def report_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.m, r.spec_id, fmt(r.value.real), fmt(r.value.imag),
                         fmt(r.limit.real), fmt(r.limit.imag), fmt(r.gap)])
    return buf.getvalue()


def gap_trend_slope(rows: Sequence[ConvergenceRow], spec_id: str | None = None) -> float:
    """Least-squares slope of gap against m (all specs pooled unless one is given)."""
    sel = [r for r in rows if spec_id is None or r.spec_id == spec_id]
    ms = np.array([r.m for r in sel], dtype=float)
    gaps = np.array([r.gap for r in sel])
    if len(set(ms)) < 2:
        return 0.0
    return float(np.polyfit(ms, gaps, 1)[0])
