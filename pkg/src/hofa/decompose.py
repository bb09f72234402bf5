"""Fourier-threshold regularity decomposition and inverse certificate for U_2."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .gowers import u2_via_fourier
from .groups import (Character, FiniteAbelianGroup, GroupFunction, e, fourier_transform,
                     inverse_fourier, lp_norm, scalar_product)

BOUND_TOL = 1e-9
FREQ_CAP = 4
MAX_THRESHOLD_STEPS = 60

Schedule = Callable[[float, int], float]


def default_schedule(eps: float, m: int) -> float:
    return eps


@dataclass(frozen=True, eq=False)
class NilspacePolynomialCertificate:
    """f_s = g o phi with phi = (chi_1, ..., chi_d): A -> torus^d and
    g(theta) = sum_j c_j e(theta_j)."""
    group: FiniteAbelianGroup
    characters: tuple[Character, ...]
    g_coeffs: np.ndarray
    complexity: int
    balance: float

    @property
    def d(self) -> int:
        return len(self.characters)

    def morphism(self) -> np.ndarray:
        """phi(x) in [0,1)^d for every element x (rows in element order)."""
        if not self.characters:
            return np.zeros((self.group.order, 0))
        cols = [np.mod(ch.phase(self.group.coords), 1.0) for ch in self.characters]
        return np.stack(cols, axis=1)

    def g(self, theta: np.ndarray) -> np.ndarray:
        return e(theta) @ self.g_coeffs if self.d else np.zeros(len(theta), dtype=complex)

    def evaluate(self) -> GroupFunction:
        return GroupFunction(self.group, self.g(self.morphism()))

    def to_json(self) -> dict:
        return {"characters": [list(ch.freq) for ch in self.characters],
                "g_coeffs": [[float(c.real), float(c.imag)] for c in self.g_coeffs],
                "complexity": self.complexity, "balance": self.balance}


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    f_s: GroupFunction
    f_e: GroupFunction
    f_r: GroupFunction
    certificate: NilspacePolynomialCertificate
    threshold: float
    diagnostics: dict = field(default_factory=dict)


def complexity_of(coeffs: np.ndarray) -> int:
    """max(d, ceil(sum |c_j|)): character count and the Lipschitz-type coefficient bound."""
    return max(len(coeffs), math.ceil(float(np.sum(np.abs(coeffs))) - 1e-12)) if len(coeffs) else 0


def _check_bounded(f: GroupFunction):
    sup = float(np.max(np.abs(f.values))) if f.group.order else 0.0
    if sup > 1 + BOUND_TOL:
        raise ValueError(f"input must satisfy |f| <= 1, got sup |f| = {sup:.6g}")


def u2_decompose(f: GroupFunction, eps: float, schedule: Schedule = default_schedule,
                 n_max: int = 8) -> DecompositionResult:
    """f = f_s + f_e + f_r with f_s the Fourier projection onto |lambda| >= delta.

    delta runs over 1, 1/2, 1/4, ... and stops at the first value with
    ||f_r||_{U_2} <= schedule(eps, m), m the complexity of the structured part.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_bounded(f)
    group = f.group
    lam = fourier_transform(f).reshape(-1)
    mags = np.abs(lam)
    for j in range(MAX_THRESHOLD_STEPS + 1):
        delta = 2.0 ** -j
        keep = np.flatnonzero(mags >= delta)
        coeffs = lam[keep]
        m = complexity_of(coeffs)
        rest = lam.copy()
        rest[keep] = 0
        if float(np.sum(np.abs(rest) ** 4)) ** 0.25 <= schedule(eps, m):
            break
    spectrum = np.zeros_like(lam)
    spectrum[keep] = coeffs
    f_s = inverse_fourier(group, spectrum)
    f_e = GroupFunction.constant(group, 0.0)
    f_r = GroupFunction(group, f.values - f_s.values)
    chars = tuple(Character(group, tuple(int(a) for a in group.coords[i])) for i in keep)
    cert = NilspacePolynomialCertificate(group, chars, coeffs, m, balance_report(group, chars, n_max))
    structured = f_s + f_e
    diagnostics = {
        "l1_f_e": lp_norm(f_e, 1),
        "u2_f_r": u2_via_fourier(f_r),
        "inner_f_r_structured": complex(scalar_product(f_r, structured)),
        "u2_stability": u2_via_fourier(structured) - u2_via_fourier(f),
        "tolerance": schedule(eps, m),
        "sup_f_s": float(np.max(np.abs(f_s.values))),
        "sup_bound": float(np.max(np.abs(f.values)) + np.sum(np.abs(rest))),
        "num_characters": len(chars),
        "parseval_cap": 1.0 / delta ** 2,
    }
    return DecompositionResult(f_s, f_e, f_r, cert, delta, diagnostics)


def u2_inverse_certificate(f: GroupFunction, eps: float) -> tuple[Character, complex]:
    """A character with |(f, chi)| >= eps^2 whenever ||f||_{U_2} >= eps.

    ||f||_{U_2}^4 = sum |lambda|^4 <= max |lambda|^2 sum |lambda|^2 <= max |lambda|^2.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_bounded(f)
    norm = u2_via_fourier(f)
    if norm < eps:
        raise ValueError(f"||f||_U2 = {norm:.12g} is below eps = {eps:.12g}; no certificate")
    lam = fourier_transform(f).reshape(-1)
    i = int(np.argmax(np.abs(lam)))
    chi = Character(f.group, tuple(int(a) for a in f.group.coords[i]))
    return chi, complex(scalar_product(f, chi.as_function()))


def _dependency_exists(group: FiniteAbelianGroup, characters: Sequence[Character], cap: int) -> bool:
    """Is some nonzero r in [-cap, cap]^d with prod chi_j^{r_j} trivial?"""
    freqs = np.array([ch.freq for ch in characters], dtype=np.int64).reshape(len(characters), -1)
    for r in itertools.product(range(-cap, cap + 1), repeat=len(characters)):
        if not any(r):
            continue
        combo = np.mod(np.array(r) @ freqs, group.cyclic_factors)
        if not combo.any():
            return True
    return False


def cube_discrepancy(group: FiniteAbelianGroup, characters: Sequence[Character], n: int,
                     cap: int = FREQ_CAP) -> float:
    """sup over characters of (torus^d)^{n+1} with frequencies <= cap of
    |E over pushed-forward linear n-cubes - E over uniform torus cubes|.

    Linear cubes are parametrized by (x, t_1..t_n), which the pushforward maps
    to independent copies of phi(A); a test character has mean 1 there iff each
    parameter block lands in the annihilator, and mean 0 under the uniform
    measure unless it is trivial.  The value is therefore 0 or 1.
    """
    del n  # the parameter blocks are independent, so the supremum does not depend on n
    return 1.0 if _dependency_exists(group, characters, cap) else 0.0


def balance_report(group: FiniteAbelianGroup, characters: Sequence[Character], n_max: int = 8,
                   cap: int = FREQ_CAP) -> float:
    """Smallest b = 2^-j (with 1/b <= n_max) such that the cube discrepancy is
    at most b in every dimension n <= 1/b."""
    if not characters:
        return 0.0
    disc = {n: cube_discrepancy(group, characters, n, cap) for n in range(1, n_max + 1)}
    best = 1.0
    j = 0
    while 2 ** (j + 1) <= n_max:
        b = 2.0 ** -(j + 1)
        if all(disc[n] <= b for n in range(1, int(1 / b) + 1)):
            best = b
            j += 1
        else:
            break
    return best
