import numpy as np
import pytest
from hypothesis import given, settings

from conftest import bounded_functions
from hofa.decompose import (balance_report, complexity_of, cube_discrepancy, u2_decompose,
                            u2_inverse_certificate)
from hofa.gowers import gowers_norm_exact, u2_via_fourier
from hofa.groups import Character, FiniteAbelianGroup, GroupFunction, scalar_product


def chi(group, *freq):
    return Character(group, freq)


def test_single_character_is_fully_structured():
    group = FiniteAbelianGroup((12,))
    f = chi(group, 5).as_function()
    res = u2_decompose(f, 0.1)
    assert res.threshold == 1.0
    assert np.allclose(res.f_s.values, f.values) and np.allclose(res.f_r.values, 0)
    assert res.certificate.d == 1 and res.certificate.complexity == 1
    assert res.certificate.characters[0].freq == (5,)


def test_zero_function():
    f = GroupFunction.constant(FiniteAbelianGroup((7,)), 0.0)
    res = u2_decompose(f, 0.5)
    assert res.certificate.d == 0 and res.certificate.complexity == 0
    assert np.all(res.f_s.values == 0)


def test_character_plus_noise():
    group = FiniteAbelianGroup((64,))
    rng = np.random.default_rng(7)
    noise = 0.3 * np.exp(2j * np.pi * rng.random(64))
    f = GroupFunction(group, 0.6 * chi(group, 9).as_function().values + noise)
    res = u2_decompose(f, 0.3)
    freqs = {c.freq for c in res.certificate.characters}
    assert (9,) in freqs
    assert res.diagnostics["u2_f_r"] <= 0.3


@settings(max_examples=25)
@given(bounded_functions(max_order=24))
def test_decomposition_invariants(f):
    eps = 0.2
    res = u2_decompose(f, eps)
    total = res.f_s.values + res.f_e.values + res.f_r.values
    assert np.max(np.abs(total - f.values)) <= 1e-12
    assert res.diagnostics["l1_f_e"] == 0
    assert res.diagnostics["u2_f_r"] <= res.diagnostics["tolerance"] + 1e-12
    assert abs(res.diagnostics["inner_f_r_structured"]) <= 1e-9
    assert abs(scalar_product(res.f_r, res.f_s)) <= 1e-9
    # structured part keeps U_2 mass: ||f_s||^4 + ||f_r||^4 = ||f||^4
    lhs = u2_via_fourier(res.f_s) ** 4 + u2_via_fourier(res.f_r) ** 4
    assert abs(lhs - u2_via_fourier(f) ** 4) <= 1e-9
    # Parseval bounds the number of characters above the threshold
    assert res.certificate.d <= res.diagnostics["parseval_cap"] + 1e-9
    assert res.diagnostics["sup_f_s"] <= res.diagnostics["sup_bound"] + 1e-9
    # the certificate reproduces f_s
    assert np.max(np.abs(res.certificate.evaluate().values - res.f_s.values)) <= 1e-10
    assert res.certificate.complexity == complexity_of(res.certificate.g_coeffs)


def test_certificate_morphism_in_torus():
    group = FiniteAbelianGroup((4, 6))
    f = GroupFunction(group, 0.5 * chi(group, 1, 2).as_function().values
                      + 0.5 * chi(group, 3, 0).as_function().values)
    cert = u2_decompose(f, 0.05).certificate
    phi = cert.morphism()
    assert phi.shape == (24, 2) and np.all((phi >= 0) & (phi < 1))
    data = cert.to_json()
    assert sorted(map(tuple, data["characters"])) == [(1, 2), (3, 0)]


def test_schedule_controls_stopping():
    group = FiniteAbelianGroup((32,))
    rng = np.random.default_rng(1)
    f = GroupFunction.random(group, rng)
    loose = u2_decompose(f, 0.9)
    tight = u2_decompose(f, 0.9, schedule=lambda eps, m: eps / (1 + m) ** 2)
    assert tight.certificate.d >= loose.certificate.d
    assert tight.diagnostics["u2_f_r"] <= tight.diagnostics["tolerance"] + 1e-12


def test_rejects_bad_input():
    group = FiniteAbelianGroup((5,))
    with pytest.raises(ValueError):
        u2_decompose(GroupFunction.constant(group, 0.5), 0.0)
    with pytest.raises(ValueError):
        u2_decompose(GroupFunction.constant(group, 2.0), 0.1)


def test_inverse_certificate_finds_character():
    group = FiniteAbelianGroup((16,))
    f = GroupFunction(group, 0.5 * chi(group, 3).as_function().values)
    ch, corr = u2_inverse_certificate(f, 0.4)
    assert ch.freq == (3,) and abs(corr - 0.5) < 1e-12


@settings(max_examples=25)
@given(bounded_functions(max_order=30))
def test_inverse_bound(f):
    norm = gowers_norm_exact(f, 2)
    eps = 0.9 * norm
    if eps <= 0:
        return
    _, corr = u2_inverse_certificate(f, eps)
    assert abs(corr) >= eps ** 2 - 1e-12


def test_inverse_refuses_small_norm():
    group = FiniteAbelianGroup((64,))
    delta = GroupFunction.indicator(group, [(0,)])
    assert u2_via_fourier(delta) < 0.2
    with pytest.raises(ValueError):
        u2_inverse_certificate(delta, 0.5)


def test_cube_discrepancy_examples():
    g8 = FiniteAbelianGroup((8,))
    assert cube_discrepancy(g8, [chi(g8, 1)], 2) == 0.0
    assert cube_discrepancy(g8, [chi(g8, 2)], 2) == 1.0  # 4 * 2 = 0 mod 8
    assert cube_discrepancy(g8, [chi(g8, 1), chi(g8, 3)], 1) == 1.0  # 3 chi_1 = chi_3


def test_balance_shrinks_then_saturates():
    bs = {m: balance_report(FiniteAbelianGroup((m,)), [Character(FiniteAbelianGroup((m,)), (1,))])
          for m in (4, 8, 16, 32, 64)}
    assert bs[4] == 1.0 and bs[8] < bs[4]
    ms = sorted(bs)
    assert all(bs[b] <= bs[a] for a, b in zip(ms, ms[1:]))
    assert balance_report(FiniteAbelianGroup((5,)), []) == 0.0
