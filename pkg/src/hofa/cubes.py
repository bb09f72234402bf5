"""Discrete cubes, cube morphisms, cubespaces and the nilspace axioms.

Vertices of {0,1}^n are enumerated lexicographically, so vertex ``(v_1..v_n)``
has index ``sum v_i 2^(n-i)`` and the all-ones vertex is last.  A cube of
dimension n in a finite set of ``N`` points is a length-2^n vector of point
indices in that order.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import FiniteAbelianGroup

MORPHISM_CAP = 10 ** 6
MAX_POINTS = 81
MAX_DIM = 4


def vertices(n: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=n))


def vertex_index(v: Sequence[int]) -> int:
    out = 0
    for bit in v:
        out = 2 * out + int(bit)
    return out


def weight_parity(n: int) -> np.ndarray:
    """(-1)^{h(v)} for every vertex of {0,1}^n."""
    return np.array([(-1) ** sum(v) for v in vertices(n)], dtype=np.int64)


# -- cube morphisms -------------------------------------------------------------

# A coordinate symbol is (i, flip): i = 0 is the constant ``flip``; i >= 1 is
# v_i XOR flip, i.e. var(i) for flip = 0 and negvar(i) = 1 - v_i for flip = 1.
Symbol = tuple[int, int]


def _symbol_name(sym: Symbol) -> str:
    i, flip = sym
    if i == 0:
        return str(flip)
    return f"~v{i}" if flip else f"v{i}"


@dataclass(frozen=True)
class CubeMorphism:
    """A map {0,1}^n -> {0,1}^m given by one symbol per output coordinate."""
    n: int
    m: int
    coords: tuple[Symbol, ...]

    def __post_init__(self):
        coords = tuple((int(i), int(f)) for i, f in self.coords)
        if len(coords) != self.m:
            raise ValueError(f"need {self.m} coordinate symbols, got {len(coords)}")
        for i, f in coords:
            if not 0 <= i <= self.n or f not in (0, 1):
                raise ValueError(f"bad symbol {(i, f)} for source dimension {self.n}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def identity(cls, n: int) -> "CubeMorphism":
        return cls(n, n, tuple((i, 0) for i in range(1, n + 1)))

    @classmethod
    def parse(cls, n: int, names: Sequence[str]) -> "CubeMorphism":
        syms = []
        for name in names:
            if name in ("0", "1"):
                syms.append((0, int(name)))
            elif name.startswith("~v"):
                syms.append((int(name[2:]), 1))
            elif name.startswith("v"):
                syms.append((int(name[1:]), 0))
            else:
                raise ValueError(f"unknown symbol {name!r}")
        return cls(n, len(syms), tuple(syms))

    def __call__(self, w: Sequence[int]) -> tuple[int, ...]:
        return tuple((w[i - 1] if i else 0) ^ f for i, f in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(_symbol_name(s) for s in self.coords) + ")"

    @property
    def vertex_map(self) -> np.ndarray:
        """Target vertex index of every source vertex."""
        return np.array([vertex_index(self(w)) for w in vertices(self.n)], dtype=np.int64)

    def compose(self, inner: "CubeMorphism") -> "CubeMorphism":
        """``self o inner``: first ``inner`` ({0,1}^p -> {0,1}^n), then ``self``."""
        if inner.m != self.n:
            raise ValueError("dimension mismatch in composition")
        out = []
        for i, f in self.coords:
            if i == 0:
                out.append((0, f))
            else:
                j, g = inner.coords[i - 1]
                out.append((j, f ^ g))
        return CubeMorphism(inner.n, self.m, tuple(out))

    @property
    def is_bijective(self) -> bool:
        if self.n != self.m:
            return False
        return sorted(i for i, _ in self.coords) == list(range(1, self.n + 1))


def enumerate_cube_morphisms(n: int, m: int, cap: int = MORPHISM_CAP) -> list[CubeMorphism]:
    """All (2n+2)^m cube morphisms {0,1}^n -> {0,1}^m."""
    if n < 0 or m < 0:
        raise ValueError("dimensions must be nonnegative")
    count = (2 * n + 2) ** m
    if count > cap:
        raise ValueError(f"{count} morphisms exceed cap {cap}")
    symbols = [(i, f) for i in range(n + 1) for f in (0, 1)]
    return [CubeMorphism(n, m, combo) for combo in itertools.product(symbols, repeat=m)]


def brute_force_morphism_maps(n: int, m: int) -> set[tuple[int, ...]]:
    """Vertex maps of all {0,1}^n -> {0,1}^m maps that extend to affine maps Z^n -> Z^m."""
    if n > 2 or m > 2:
        raise ValueError("brute-force oracle is limited to dimensions <= 2")
    verts_n, verts_m = vertices(n), vertices(m)
    found = set()
    for images in itertools.product(range(2 ** m), repeat=2 ** n):
        img = [np.array(verts_m[j]) for j in images]
        base = img[0]
        steps = [img[vertex_index(tuple(int(i == j) for i in range(n)))] - base for j in range(n)]
        if all(np.array_equal(img[vertex_index(v)], base + sum((v[j] * steps[j] for j in range(n)), np.zeros(m, dtype=int)))
               for v in verts_n):
            found.add(tuple(images))
    return found


def apply_morphism(psi: CubeMorphism, cube: Sequence) -> list:
    """Pull back a cube c in C^m along psi: the n-cube w -> c(psi(w))."""
    cube = list(cube)
    if len(cube) != 2 ** psi.m:
        raise ValueError(f"cube has {len(cube)} vertices, morphism expects {2 ** psi.m}")
    return [cube[j] for j in psi.vertex_map]


def cube_automorphisms(k: int) -> list[CubeMorphism]:
    """All k! 2^k automorphisms of {0,1}^k (coordinate permutations with reflections)."""
    out = []
    for perm in itertools.permutations(range(1, k + 1)):
        for flips in itertools.product((0, 1), repeat=k):
            out.append(CubeMorphism(k, k, tuple(zip(perm, flips))))
    return out


def automorphism_sign(sigma: CubeMorphism) -> int:
    """(-1)^m with m the number of ones in sigma(0^k)."""
    if not sigma.is_bijective:
        raise ValueError(f"{sigma} is not an automorphism")
    return -1 if sum(sigma((0,) * sigma.n)) % 2 else 1


# -- cubes in abelian groups -----------------------------------------------------

def _cube_coords(group: FiniteAbelianGroup, cube) -> np.ndarray:
    arr = np.asarray(cube, dtype=np.int64)
    if arr.ndim == 1:  # element indices
        return group.coords[arr]
    return np.mod(arr, group.cyclic_factors)


def linear_cube_membership(group: FiniteAbelianGroup, n: int, cube) -> bool:
    """Membership in C^n of the linear structure: f(v) = f(0) + sum v_i (f(e_i) - f(0))."""
    c = _cube_coords(group, cube)
    if c.shape[0] != 2 ** n:
        raise ValueError("cube has the wrong number of vertices")
    base = c[0]
    steps = np.array([c[2 ** (n - 1 - i)] - base for i in range(n)]).reshape(n, group.rank)
    v = np.array(vertices(n), dtype=np.int64).reshape(2 ** n, n)
    expected = np.mod(base + v @ steps, group.cyclic_factors)
    return bool(np.array_equal(expected, np.mod(c, group.cyclic_factors)))


def linear_cube_sample(group: FiniteAbelianGroup, n: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    x = np.array(group.random_element(rng))
    ts = np.array([group.random_element(rng) for _ in range(n)]).reshape(n, group.rank)
    v = np.array(vertices(n), dtype=np.int64).reshape(2 ** n, n)
    pts = np.mod(x + v @ ts, group.cyclic_factors)
    return [tuple(int(a) for a in p) for p in pts]


def linear_cubes(group: FiniteAbelianGroup, n: int) -> np.ndarray:
    """All |A|^(n+1) linear n-cubes as rows of element indices (with repetition removed)."""
    params = np.array(list(itertools.product(range(group.order), repeat=n + 1)), dtype=np.int64)
    params = params.reshape(-1, n + 1)
    coords = group.coords[params]  # (count, n+1, r)
    v = np.array(vertices(n), dtype=np.int64).reshape(2 ** n, n)
    pts = coords[:, None, 0, :] + np.einsum("vi,cir->cvr", v, coords[:, 1:, :])
    return np.unique(group.index(pts).reshape(-1, 2 ** n), axis=0)


def degree_k_functionals(k: int, n: int) -> np.ndarray:
    """Row per morphism phi: {0,1}^{k+1} -> {0,1}^n of the alternating-sum coefficients."""
    sign = weight_parity(k + 1)
    rows = []
    for phi in enumerate_cube_morphisms(k + 1, n):
        row = np.zeros(2 ** n, dtype=np.int64)
        np.add.at(row, phi.vertex_map, sign)
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, 2 ** n)


def degree_k_membership(group: FiniteAbelianGroup, k: int, n: int, cube) -> bool:
    """f in C^n(D_k(A)) iff every (k+1)-dimensional alternating sum f(phi(v)) vanishes."""
    c = _cube_coords(group, cube)
    if c.shape[0] != 2 ** n:
        raise ValueError("cube has the wrong number of vertices")
    sums = degree_k_functionals(k, n) @ c
    return bool(np.all(np.mod(sums, group.cyclic_factors) == 0))


def degree_k_member_mask(group: FiniteAbelianGroup, k: int, n: int, cubes: np.ndarray) -> np.ndarray:
    """Vectorized ``degree_k_membership`` over rows of element indices."""
    coords = group.coords[np.asarray(cubes, dtype=np.int64)]  # (N, 2^n, r)
    sums = np.einsum("mv,Nvr->Nmr", degree_k_functionals(k, n), coords)
    return np.all(np.mod(sums, group.cyclic_factors) == 0, axis=(1, 2))


def degree_k_cube_count(order: int, k: int, n: int) -> int:
    return order ** sum(comb(n, i) for i in range(min(n, k) + 1))


def degree_k_cubes(group: FiniteAbelianGroup, k: int, n: int) -> np.ndarray:
    """All cubes of D_k(A) in dimension n: f(v) = sum_{|S|<=k} a_S prod_{i in S} v_i."""
    monomials = [s for d in range(min(n, k) + 1) for s in itertools.combinations(range(n), d)]
    basis = np.array([[int(all(v[i] for i in s)) for v in vertices(n)] for s in monomials], dtype=np.int64)
    count = group.order ** len(monomials)
    choice = np.stack(np.unravel_index(np.arange(count), (group.order,) * len(monomials)), axis=1)
    coeffs = group.coords[choice]  # (count, #monomials, r)
    pts = np.einsum("sv,csr->cvr", basis, coeffs)
    return np.unique(group.index(pts).reshape(count, 2 ** n), axis=0)


def all_maps(num_points: int, n: int) -> np.ndarray:
    """Every map {0,1}^n -> [num_points] as rows (brute-force oracle)."""
    width = 2 ** n
    total = num_points ** width
    if total > 5 * 10 ** 6:
        raise ValueError(f"{total} maps exceed the brute-force cap")
    return np.stack(np.unravel_index(np.arange(total), (num_points,) * width), axis=1).astype(np.int64)


# -- cubespaces -------------------------------------------------------------------

class _RowSet:
    """Set of equal-width integer rows with vectorized membership."""

    def __init__(self, rows: np.ndarray, base: int):
        rows = np.asarray(rows, dtype=np.int64)
        self.width = rows.shape[1]
        self.base = max(base, 2)
        self.packed = self.base ** self.width < 2 ** 62
        if self.packed:
            self.weights = self.base ** np.arange(self.width - 1, -1, -1, dtype=np.int64)
            self.codes = np.unique(rows @ self.weights)
        else:
            self.keys = {tuple(r) for r in rows.tolist()}

    def contains(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.width)
        if self.packed:
            return np.isin(rows @ self.weights, self.codes)
        return np.array([tuple(r) in self.keys for r in rows.tolist()], dtype=bool)


@dataclass(eq=False)
class Cubespace:
    """A finite set ``range(points)`` with explicit cube lists C^n for n = 0..max_dim.

    C^0 defaults to all points.  Rows of ``cubes[n]`` are kept sorted and unique,
    which fixes the lexicographic order used for failure witnesses.
    """
    points: int
    cubes: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.points > MAX_POINTS:
            raise ValueError(f"{self.points} points exceed cap {MAX_POINTS}")
        clean = {}
        for n, rows in self.cubes.items():
            n = int(n)
            arr = np.asarray(rows, dtype=np.int64).reshape(-1, 2 ** n)
            if arr.size and (arr.min() < 0 or arr.max() >= self.points):
                raise ValueError(f"cube vertex out of range in dimension {n}")
            clean[n] = np.unique(arr, axis=0) if arr.size else arr
        clean.setdefault(0, np.arange(self.points, dtype=np.int64).reshape(-1, 1))
        self.cubes = dict(sorted(clean.items()))
        self._sets: dict[int, _RowSet] = {}

    @property
    def max_dim(self) -> int:
        return max(self.cubes)

    def cube_set(self, n: int) -> _RowSet:
        if n not in self._sets:
            self._sets[n] = _RowSet(self.cubes[n], self.points)
        return self._sets[n]

    def is_cube(self, cube: Sequence[int]) -> bool:
        n = int(np.log2(len(cube)))
        return bool(self.cube_set(n).contains(np.asarray(cube))[0])

    # -- constructors ---------------------------------------------------------

    @classmethod
    def linear(cls, group: FiniteAbelianGroup, max_dim: int) -> "Cubespace":
        return cls(group.order, {n: linear_cubes(group, n) for n in range(max_dim + 1)})

    @classmethod
    def degree_k(cls, group: FiniteAbelianGroup, k: int, max_dim: int) -> "Cubespace":
        return cls(group.order, {n: degree_k_cubes(group, k, n) for n in range(max_dim + 1)})

    @classmethod
    def from_predicate(cls, points: int, max_dim: int,
                       predicate: Callable[[int, tuple[int, ...]], bool]) -> "Cubespace":
        cubes = {}
        for n in range(max_dim + 1):
            rows = all_maps(points, n)
            cubes[n] = rows[[predicate(n, tuple(r)) for r in rows.tolist()]]
        return cls(points, cubes)

    def without_cube(self, n: int, cube: Sequence[int]) -> "Cubespace":
        rows = self.cubes[n]
        keep = ~np.all(rows == np.asarray(cube, dtype=np.int64), axis=1)
        return Cubespace(self.points, {**self.cubes, n: rows[keep]})

    def with_cube(self, n: int, cube: Sequence[int]) -> "Cubespace":
        rows = np.vstack([self.cubes[n], np.asarray(cube, dtype=np.int64).reshape(1, -1)])
        return Cubespace(self.points, {**self.cubes, n: rows})

    def to_json(self) -> dict:
        return {"points": self.points,
                "cubes": {str(n): rows.tolist() for n, rows in self.cubes.items() if n > 0}}

    @classmethod
    def from_json(cls, data: dict) -> "Cubespace":
        return cls(int(data["points"]), {int(n): rows for n, rows in data["cubes"].items()})


# -- axiom checking ----------------------------------------------------------------

@dataclass
class AxiomCheck:
    name: str
    passed: bool
    witness: dict | None = None


@dataclass
class AxiomReport:
    checks: list[AxiomCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self) -> AxiomCheck | None:
        return next((c for c in self.checks if not c.passed), None)


def check_composition(space: Cubespace, n_max: int) -> AxiomCheck:
    for m in range(n_max + 1):
        cubes = space.cubes[m]
        if not len(cubes):
            continue
        for n in range(n_max + 1):
            target = space.cube_set(n)
            for psi in enumerate_cube_morphisms(n, m):
                pulled = cubes[:, psi.vertex_map]
                ok = target.contains(pulled)
                if not ok.all():
                    bad = int(np.argmin(ok))
                    return AxiomCheck("composition", False, {
                        "morphism": str(psi), "source_dim": n, "target_dim": m,
                        "cube": cubes[bad].tolist(), "image": pulled[bad].tolist()})
    return AxiomCheck("composition", True)


def check_ergodicity(space: Cubespace) -> AxiomCheck:
    if 1 not in space.cubes:
        return AxiomCheck("ergodicity", False, {"reason": "no 1-cubes given"})
    present = space.cube_set(1)
    pairs = np.array(list(itertools.product(range(space.points), repeat=2)), dtype=np.int64).reshape(-1, 2)
    ok = present.contains(pairs)
    if not ok.all():
        return AxiomCheck("ergodicity", False, {"missing_1_cube": pairs[int(np.argmin(ok))].tolist()})
    return AxiomCheck("ergodicity", True)


def _face_vertices(n: int, i: int) -> list[int]:
    """Indices of the face {v_i = 0} (i is 1-based), in the face's own lexicographic order."""
    return [vertex_index(v) for v in vertices(n) if v[i - 1] == 0]


def enumerate_corners(space: Cubespace, n: int) -> list[tuple[int, ...]]:
    """Maps {0,1}^n minus 1^n whose restriction to each face {v_i=0} lies in C^{n-1}.

    Returned as tuples over the 2^n - 1 corner vertices in lexicographic order.
    """
    width = 2 ** n
    lower = [tuple(r) for r in space.cubes[n - 1].tolist()]
    partial = [tuple([-1] * width)]
    assigned: set[int] = set()
    for i in range(1, n + 1):
        face = _face_vertices(n, i)
        overlap = [pos for pos, vtx in enumerate(face) if vtx in assigned]
        groups: dict[tuple, list[tuple]] = defaultdict(list)
        for c in lower:
            groups[tuple(c[p] for p in overlap)].append(c)
        new = []
        for row in partial:
            key = tuple(row[face[p]] for p in overlap)
            for c in groups.get(key, ()):
                r = list(row)
                for pos, vtx in enumerate(face):
                    r[vtx] = c[pos]
                new.append(tuple(r))
        partial = new
        assigned.update(face)
    return sorted(r[:-1] for r in partial)


def completion_counts(space: Cubespace, n: int) -> tuple[list[tuple[int, ...]], Counter]:
    corners = enumerate_corners(space, n)
    counts = Counter(tuple(r[:-1]) for r in space.cubes[n].tolist())
    return corners, counts


def check_gluing(space: Cubespace, n: int) -> AxiomCheck:
    corners, counts = completion_counts(space, n)
    for corner in corners:
        if counts[corner] == 0:
            return AxiomCheck(f"gluing[{n}]", False, {"dimension": n, "corner": list(corner)})
    return AxiomCheck(f"gluing[{n}]", True)


def check_nilspace_axioms(space: Cubespace, n_max: int | None = None) -> AxiomReport:
    """Composition up to n_max, ergodicity, and gluing in dimensions 1..n_max+1."""
    if n_max is None:
        n_max = space.max_dim - 1
    if n_max + 1 > space.max_dim:
        raise ValueError(f"cube lists up to dimension {n_max + 1} are required")
    if n_max + 1 > MAX_DIM + 1:
        raise ValueError(f"dimension cap {MAX_DIM} exceeded")
    checks = [check_composition(space, n_max), check_ergodicity(space)]
    checks += [check_gluing(space, n) for n in range(1, n_max + 2)]
    return AxiomReport(checks)


def k_step_witness(space: Cubespace, k: int) -> dict | None:
    """First (k+1)-corner without exactly one completion, or None."""
    n = k + 1
    if n > space.max_dim:
        raise ValueError(f"cubes of dimension {n} are required")
    corners, counts = completion_counts(space, n)
    for corner in corners:
        if counts[corner] != 1:
            return {"dimension": n, "corner": list(corner), "completions": counts[corner]}
    return None


def check_k_step(space: Cubespace, k: int) -> bool:
    return k_step_witness(space, k) is None


# -- three-cubes --------------------------------------------------------------------

def three_cube_map(v: Sequence[int]) -> Callable[[Sequence[int]], tuple[int, ...]]:
    """Phi_v: {0,1}^n -> {-1,0,1}^n, w -> ((1 - 2 v_j)(1 - w_j))_j."""
    v = tuple(v)
    return lambda w: tuple((1 - 2 * vj) * (1 - wj) for vj, wj in zip(v, w))


def omega(v: Sequence[int]) -> tuple[int, ...]:
    return three_cube_map(v)((0,) * len(v))


def three_cube_points(n: int) -> list[tuple[int, ...]]:
    return list(itertools.product((-1, 0, 1), repeat=n))


def three_cube_homs(group: FiniteAbelianGroup, n: int) -> np.ndarray:
    """All maps T_n -> A (rows over three_cube_points(n)) whose every Phi_v-restriction is linear."""
    pts = three_cube_points(n)
    pos = {p: i for i, p in enumerate(pts)}
    total = group.order ** len(pts)
    if total > 5 * 10 ** 6:
        raise ValueError("three-cube enumeration exceeds the brute-force cap")
    maps = np.stack(np.unravel_index(np.arange(total), (group.order,) * len(pts)), axis=1)
    keep = np.ones(total, dtype=bool)
    verts = vertices(n)
    linear = _RowSet(linear_cubes(group, n), group.order)
    for v in verts:
        phi = three_cube_map(v)
        cols = [pos[phi(w)] for w in verts]
        keep &= linear.contains(maps[:, cols])
    return maps[keep]


def omega_pullbacks(homs: np.ndarray, n: int) -> np.ndarray:
    """omega o t for each hom t, as n-cubes."""
    pos = {p: i for i, p in enumerate(three_cube_points(n))}
    return homs[:, [pos[omega(v)] for v in vertices(n)]]


# -- concatenation and cocycles ----------------------------------------------------

def adjacent(f1: Sequence, f2: Sequence) -> bool:
    """f1(v,1) = f2(v,0) for every v (last coordinate)."""
    return list(f1[1::2]) == list(f2[0::2])


def concatenate(f1: Sequence, f2: Sequence) -> list:
    if len(f1) != len(f2):
        raise ValueError("cubes of different dimension")
    if not adjacent(f1, f2):
        raise ValueError("cubes are not adjacent")
    out = list(f1)
    out[1::2] = list(f2[1::2])
    return out


@dataclass(eq=False)
class Cocycle:
    """A function on C^k of a cubespace.

    Additive cocycles take values in ``target`` (rows of element coordinates);
    multiplicative ones (``target is None``) take unit complex values.
    """
    k: int
    cubes: np.ndarray
    values: np.ndarray
    target: FiniteAbelianGroup | None = None
    tol: float = 1e-9

    def __post_init__(self):
        self.cubes = np.asarray(self.cubes, dtype=np.int64).reshape(-1, 2 ** self.k)
        if self.target is None:
            self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        else:
            self.values = np.mod(np.asarray(self.values, dtype=np.int64).reshape(len(self.cubes), -1),
                                 self.target.cyclic_factors)
        self._pos = {tuple(r): i for i, r in enumerate(self.cubes.tolist())}

    @property
    def multiplicative(self) -> bool:
        return self.target is None

    def value(self, cube: Sequence[int]):
        i = self._pos[tuple(int(a) for a in cube)]
        return self.values[i]

    def perturbed(self, index: int, delta) -> "Cocycle":
        vals = self.values.copy()
        if self.multiplicative:
            vals[index] = vals[index] * delta
        else:
            vals[index] = vals[index] + np.asarray(delta)
        return Cocycle(self.k, self.cubes, vals, self.target, self.tol)

    # value-group arithmetic
    def _scale(self, a, sign: int):
        if self.multiplicative:
            return a if sign == 1 else np.conj(a)
        return np.mod(sign * a, self.target.cyclic_factors)

    def _add(self, a, b):
        if self.multiplicative:
            return a * b
        return np.mod(a + b, self.target.cyclic_factors)

    def _equal(self, a, b) -> bool:
        if self.multiplicative:
            return abs(a - b) <= self.tol
        return bool(np.array_equal(np.mod(a, self.target.cyclic_factors), np.mod(b, self.target.cyclic_factors)))

    def _fmt(self, a):
        return complex(a) if self.multiplicative else [int(x) for x in a]


@dataclass
class CocycleReport:
    sign_law: bool
    concatenation_law: bool
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.sign_law and self.concatenation_law


def check_cocycle(rho: Cocycle) -> CocycleReport:
    """Check rho(f o sigma) = s(sigma) rho(f) and rho(f1 + f2) = rho(f1) + rho(f2)."""
    autos = [(s, automorphism_sign(s), s.vertex_map) for s in cube_automorphisms(rho.k)]
    for i, f in enumerate(rho.cubes):
        for sigma, sign, vmap in autos:
            g = f[vmap]
            key = tuple(g.tolist())
            if key not in rho._pos:
                return CocycleReport(False, True, {"law": "sign", "cube": f.tolist(), "automorphism": str(sigma),
                                                   "reason": "image is not a cube"})
            lhs, rhs = rho.value(g), rho._scale(rho.values[i], sign)
            if not rho._equal(lhs, rhs):
                return CocycleReport(False, True, {"law": "sign", "cube": f.tolist(), "automorphism": str(sigma),
                                                   "lhs": rho._fmt(lhs), "rhs": rho._fmt(rhs)})
    by_bottom: dict[tuple, list[int]] = defaultdict(list)
    for i, f in enumerate(rho.cubes.tolist()):
        by_bottom[tuple(f[0::2])].append(i)
    for i, f1 in enumerate(rho.cubes.tolist()):
        for j in by_bottom.get(tuple(f1[1::2]), ()):
            f2 = rho.cubes[j].tolist()
            f3 = concatenate(f1, f2)
            key = tuple(f3)
            if key not in rho._pos:
                return CocycleReport(True, False, {"law": "concatenation", "f1": f1, "f2": f2,
                                                   "reason": "concatenation is not a cube"})
            lhs = rho.value(f3)
            rhs = rho._add(rho.values[i], rho.values[j])
            if not rho._equal(lhs, rhs):
                return CocycleReport(True, False, {"law": "concatenation", "f1": f1, "f2": f2,
                                                   "lhs": rho._fmt(lhs), "rhs": rho._fmt(rhs)})
    return CocycleReport(True, True)


def coboundary(space: Cubespace, f, k: int, target: FiniteAbelianGroup | None = None, tol: float = 1e-9) -> Cocycle:
    """The cocycle c -> sum_v (-1)^{h(v)} f(c(v)) on C^k (multiplicative: prod f^{eps(v)}).

    ``f`` maps points to target coordinates (additive) or to unit complex numbers
    (multiplicative, ``target=None``).
    """
    cubes = space.cubes[k]
    sign = weight_parity(k)
    if target is None:
        vals = np.asarray(f, dtype=complex).reshape(-1)
        if np.any(np.abs(vals) == 0):
            raise ValueError("multiplicative coboundary needs nonvanishing values")
        if np.any(np.abs(np.abs(vals) - 1) > tol):
            raise ValueError("multiplicative coboundary needs unit-modulus values")
        at = vals[cubes]
        prod = np.prod(np.where(sign == 1, at, at.conj()), axis=1)
        return Cocycle(k, cubes, prod, None, tol)
    vals = np.asarray(f, dtype=np.int64).reshape(space.points, -1)
    sums = np.einsum("v,cvr->cr", sign, vals[cubes])
    return Cocycle(k, cubes, sums, target, tol)


def zero_cocycle(space: Cubespace, k: int, target: FiniteAbelianGroup) -> Cocycle:
    cubes = space.cubes[k]
    return Cocycle(k, cubes, np.zeros((len(cubes), target.rank), dtype=np.int64), target)


# -- Z_{n,k} face groups --------------------------------------------------------------

def faces(n: int, d: int) -> list[list[int]]:
    """Vertex index lists of all d-dimensional faces of {0,1}^n."""
    out = []
    for free in itertools.combinations(range(n), d):
        fixed = [i for i in range(n) if i not in free]
        for vals in itertools.product((0, 1), repeat=len(fixed)):
            assign = dict(zip(fixed, vals))
            out.append([vertex_index(v) for v in vertices(n)
                        if all(v[i] == a for i, a in assign.items())])
    return out


def face_generators(group: FiniteAbelianGroup, n: int, k: int) -> np.ndarray:
    """g_{F,a}: a (-1)^{h(v)} on a (k+1)-dimensional face F, zero elsewhere."""
    sign = weight_parity(n)
    gens = []
    if k + 1 <= n:
        for face in faces(n, k + 1):
            for a in group.coords:
                g = np.zeros((2 ** n, group.rank), dtype=np.int64)
                g[face] = sign[face, None] * a
                gens.append(np.mod(g, group.cyclic_factors))
    return np.array(gens, dtype=np.int64).reshape(-1, 2 ** n, group.rank)


def z_nk_bruteforce(group: FiniteAbelianGroup, n: int, k: int, star: bool = False) -> np.ndarray:
    """All m: {0,1}^n -> A summing to zero on every (n-k)-face (inside K_n if ``star``).

    Rows are element-index vectors over the 2^n vertices.
    """
    maps = all_maps(group.order, n)
    coords = group.coords[maps]  # (M, 2^n, r)
    d = max(n - k, 0)
    keep = np.ones(len(maps), dtype=bool)
    for face in faces(n, d):
        if star and 0 in face:
            continue
        s = np.mod(coords[:, face, :].sum(axis=1), group.cyclic_factors)
        keep &= np.all(s == 0, axis=1)
    return maps[keep]


def subgroup_span(group: FiniteAbelianGroup, width: int, generators: np.ndarray) -> np.ndarray:
    """Subgroup of A^width generated by the given coordinate arrays (BFS closure)."""
    shape = (width, group.rank)
    zero = np.zeros(shape, dtype=np.int64)
    gens = [np.mod(g, group.cyclic_factors) for g in generators]
    seen = {zero.tobytes(): zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = np.mod(x + g, group.cyclic_factors)
                key = y.tobytes()
                if key not in seen:
                    seen[key] = y
                    nxt.append(y)
        frontier = nxt
    elems = np.array(list(seen.values())).reshape(-1, *shape)
    idx = group.index(elems).reshape(len(elems), width)
    return np.unique(idx, axis=0)


@dataclass
class ZnkReport:
    n: int
    k: int
    bruteforce_size: int
    span_size: int
    span_equals_bruteforce: bool
    forgetting_surjective: bool

    @property
    def passed(self) -> bool:
        return self.span_equals_bruteforce and self.forgetting_surjective


def _row_set(rows: np.ndarray) -> set[tuple]:
    return {tuple(r) for r in np.asarray(rows).tolist()}


def z_nk_span_check(group: FiniteAbelianGroup, n: int, k: int) -> ZnkReport:
    brute = z_nk_bruteforce(group, n, k)
    span = subgroup_span(group, 2 ** n, face_generators(group, n, k))
    star = z_nk_bruteforce(group, n, k, star=True)
    forgotten = {r[1:] for r in _row_set(brute)}
    star_rest = {r[1:] for r in _row_set(star)}
    return ZnkReport(n, k, len(brute), len(span), _row_set(brute) == _row_set(span),
                     forgotten == star_rest)


def dual_pairing_kernel(group: FiniteAbelianGroup, n: int, annihilators: np.ndarray,
                        cubes: np.ndarray) -> np.ndarray:
    """Mask of cubes f with sum_v <m(v), f(v)> = 0 in R/Z for every annihilator m.

    The dual of Z_{m_1} x ... x Z_{m_r} is identified with the group itself via
    <a, x> = sum_i a_i x_i / m_i.
    """
    moduli = np.asarray(group.cyclic_factors, dtype=np.int64)
    lcm = int(np.lcm.reduce(moduli))
    scale = lcm // moduli
    a = (group.coords[annihilators] * scale).reshape(len(annihilators), -1).astype(float)
    f = group.coords[cubes].reshape(len(cubes), -1).astype(float)
    ok = np.ones(len(cubes), dtype=bool)
    for start in range(0, len(a), 2048):
        pair = np.rint(f @ a[start:start + 2048].T).astype(np.int64)
        ok &= np.all(np.mod(pair, lcm) == 0, axis=1)
    return ok


def duality_check(group: FiniteAbelianGroup, n: int, k: int) -> bool:
    """C^n(D_k(A)) equals the annihilator of Z_{n,k}(dual A), over all maps {0,1}^n -> A."""
    maps = all_maps(group.order, n)
    z = z_nk_bruteforce(group, n, k)
    in_kernel = dual_pairing_kernel(group, n, z, maps)
    member = degree_k_member_mask(group, k, n, maps)
    return bool(np.array_equal(in_kernel, member))


def bruteforce_degree_k_count(group: FiniteAbelianGroup, k: int, n: int) -> int:
    return int(degree_k_member_mask(group, k, n, all_maps(group.order, n)).sum())


def morphism_closure_holds(n_max: int = 2) -> bool:
    """Composing any two enumerated morphisms yields an enumerated morphism."""
    for p, n, m in itertools.product(range(n_max + 1), repeat=3):
        targets = set(enumerate_cube_morphisms(p, m))
        for outer in enumerate_cube_morphisms(n, m):
            for inner in enumerate_cube_morphisms(p, n):
                if outer.compose(inner) not in targets:
                    return False
    return True


def iter_mutations(space: Cubespace, rng: np.random.Generator, count: int,
                   dims: Iterable[int]) -> list[tuple[str, int, list[int], Cubespace]]:
    """Random single-cube mutations: drop an existing cube or add a non-cube."""
    dims = list(dims)
    out = []
    while len(out) < count:
        n = int(rng.choice(dims))
        rows = space.cubes[n]
        if rng.random() < 0.5 and len(rows):
            row = rows[int(rng.integers(len(rows)))].tolist()
            out.append(("remove", n, row, space.without_cube(n, row)))
        else:
            row = rng.integers(0, space.points, size=2 ** n).tolist()
            if space.cube_set(n).contains(np.asarray(row))[0]:
                continue
            out.append(("add", n, row, space.with_cube(n, row)))
    return out
