import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bounded_functions
from hofa.groups import Character, FiniteAbelianGroup, GroupFunction
from hofa.moments import (CSV_HEADER, MomentSpec, Term, all_simple_specs, cayley_edge_count_bruteforce,
                          cayley_hypergraph_density, constant_limit, convergence_report, example1_function,
                          example1_limit, example2_function, example2_limit, gap_trend_slope, moment_exact, moment_on_limit,
                          moment_sampled, report_to_csv, sample_Dn, sample_Dn_rooted, torus_moment_exact,
                          torus_trig_limit)


def brute_moment(f, spec):
    """Nested loops over A^n, independent of the vectorized path."""
    group = f.group
    elems = list(group.elements())
    total = 0j
    for xs in itertools.product(elems, repeat=spec.n):
        prod = 1 + 0j
        for s, t in spec.terms.items():
            point = tuple(sum(xs[i - 1][r] for i in s) % group.cyclic_factors[r] for r in range(group.rank))
            v = f.values[group.index(np.array(point))]
            prod *= (np.conj(v) if t.conjugate else v) ** t.power
        total += prod
    return total / group.order ** spec.n


def test_triangle_on_character_vanishes():
    chi = Character(FiniteAbelianGroup((5,)), (1,)).as_function()
    assert abs(moment_exact(chi, MomentSpec.triangle())) < 1e-12


def test_triangle_on_indicator_counts_triangles():
    group = FiniteAbelianGroup((5,))
    S = {1, 4}
    f = GroupFunction.indicator(group, [(s,) for s in S])
    count = sum(1 for a, b, c in itertools.product(range(5), repeat=3)
                if (a + b) % 5 in S and (a + c) % 5 in S and (b + c) % 5 in S)
    assert abs(moment_exact(f, MomentSpec.triangle()) - count / 125) < 1e-12


@settings(max_examples=15)
@given(bounded_functions(max_order=8), st.sampled_from(all_simple_specs(2) + [MomentSpec.triangle()]))
def test_exact_matches_nested_loops(f, spec):
    assert abs(moment_exact(f, spec) - brute_moment(f, spec)) < 1e-10


def test_powers_and_conjugates():
    f = GroupFunction.random(FiniteAbelianGroup((6,)), np.random.default_rng(3))
    spec = MomentSpec.single_edge(1, [1], conjugate=True, power=2)
    assert abs(moment_exact(f, spec) - np.mean(np.conj(f.values) ** 2)) < 1e-12
    mixed = MomentSpec(2, {frozenset({1}): Term(2, False), frozenset({1, 2}): Term(1, True)})
    assert abs(moment_exact(f, mixed) - brute_moment(f, mixed)) < 1e-12


def test_sampled_within_four_sigma():
    f = GroupFunction.random(FiniteAbelianGroup((7, 3)), np.random.default_rng(11))
    for spec in [MomentSpec.triangle(), MomentSpec.cube(2), MomentSpec.full_edge(2)]:
        val, se = moment_sampled(f, spec, 20000, seed=4)
        assert abs(val - moment_exact(f, spec)) <= 4 * se + 1e-12


def test_spec_validation_and_json():
    with pytest.raises(ValueError):
        MomentSpec(2, {frozenset({3}): Term()})
    with pytest.raises(ValueError):
        MomentSpec(2, {frozenset({1}): Term(0)})
    spec = MomentSpec.cube(2)
    assert MomentSpec.from_json(spec.to_json()) == spec
    assert spec.label() == "n3:1.~12.~13.123"
    assert len(all_simple_specs(2)) == 2 + 26


@settings(max_examples=15)
@given(bounded_functions(max_order=7), st.permutations([1, 2, 3]))
def test_relabel_invariance(f, perm):
    spec = MomentSpec(3, {frozenset({1, 2}): Term(), frozenset({3}): Term(1, True), frozenset({1, 2, 3}): Term()})
    assert abs(moment_exact(f, spec) - moment_exact(f, spec.relabel(perm))) < 1e-10


@settings(max_examples=15)
@given(bounded_functions(max_order=9, max_rank=1), st.integers(0, 8))
def test_cube_moment_invariant_under_character_twist(f, freq):
    chi = Character(f.group, (freq % f.group.cyclic_factors[0],)).as_function()
    twisted = GroupFunction(f.group, f.values * chi.values)
    for k in (2, 3):
        spec = MomentSpec.cube(k)
        assert abs(moment_exact(twisted, spec) - moment_exact(f, spec)) < 1e-10


def test_dn_shape_and_columns():
    f = GroupFunction.random(FiniteAbelianGroup((5,)), np.random.default_rng(0))
    dist = sample_Dn(f, 3, 1000, seed=1)
    assert dist.samples.shape == (1000, 7) and dist.dimension == 7
    assert [sorted(s) for s in dist.subsets] == [[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]]
    values = set(np.round(f.values, 12))
    assert set(np.round(dist.column({1, 3}), 12)) <= values


def test_dn_of_constant_is_constant():
    f = GroupFunction.constant(FiniteAbelianGroup((4,)), 0.5 + 0.5j)
    dist = sample_Dn(f, 2, 200, seed=0)
    assert np.all(dist.samples == 0.5 + 0.5j)


def test_dn_moments_match_exact():
    f = GroupFunction.random(FiniteAbelianGroup((6,)), np.random.default_rng(2))
    dist = sample_Dn(f, 3, 30000, seed=5)
    for spec in [MomentSpec.triangle(), MomentSpec.cube(2)]:
        val, se = dist.moment(spec)
        assert abs(val - moment_exact(f, spec)) <= 4 * se


def test_rooted_and_plain_sampling_agree():
    f = GroupFunction.random(FiniteAbelianGroup((7,)), np.random.default_rng(8))
    a = sample_Dn(f, 2, 40000, seed=1)
    b = sample_Dn_rooted(f, 2, 40000, seed=2)
    for spec in all_simple_specs(2)[:10]:
        (va, sa), (vb, sb) = a.moment(spec), b.moment(spec)
        assert abs(va - vb) <= 4 * np.hypot(sa, sb) + 1e-12
    assert a.moment_distance(b, order=2) < 0.1


def test_mixed_moment_keys():
    f = GroupFunction.random(FiniteAbelianGroup((3,)), np.random.default_rng(0))
    mm = sample_Dn(f, 1, 50, seed=0).mixed_moments(order=2)
    assert len(mm) == 2 + 3


@pytest.mark.parametrize("m,S,k", [(5, [1, 2], 2), (6, [0, 3, 5], 3), (4, [1], 4)])
def test_cayley_density(m, S, k):
    group = FiniteAbelianGroup((m,))
    dens = cayley_hypergraph_density(group, S, k)
    assert dens == cayley_edge_count_bruteforce(group, S, k) / m ** k
    f = GroupFunction.indicator(group, [(s,) for s in S])
    assert abs(dens - moment_exact(f, MomentSpec.full_edge(k))) < 1e-12


def test_torus_limit_exact_moments():
    g = example1_limit()
    assert torus_moment_exact(g, MomentSpec.single_edge(1, [1])) == 0
    pair = MomentSpec.from_json({"n": 2, "terms": [{"subset": [1], "power": 1},
                                                   {"subset": [2], "conjugate": True}]})
    assert torus_moment_exact(g, pair) == 0
    # e(x) + 1 has mean 1
    assert abs(torus_moment_exact(torus_trig_limit([(1, (1,)), (1, (0,))]),
                                  MomentSpec.single_edge(1, [1])) - 1) < 1e-15
    # the U_2 moment of a trigonometric polynomial is sum |c|^4
    assert abs(torus_moment_exact(g, MomentSpec.cube(2)) - 2) < 1e-12
    h = torus_trig_limit([(0.5, (1,)), (0.25j, (3,))])
    assert abs(torus_moment_exact(h, MomentSpec.cube(2)) - (0.5 ** 4 + 0.25 ** 4)) < 1e-12


def test_torus_sampled_matches_exact():
    g = example1_limit()
    for spec in [MomentSpec.cube(2), MomentSpec.triangle()]:
        val, se = moment_on_limit(g, spec, 50000, seed=3)
        assert abs(val - torus_moment_exact(g, spec)) <= 4 * se


def test_heisenberg_limit_moments():
    g = example2_limit()
    val, se = moment_on_limit(g, MomentSpec.single_edge(1, [1]), 50000, seed=0)
    assert abs(val) <= 4 * se
    val, se = moment_on_limit(g, MomentSpec.cube(2), 50000, seed=0)
    assert abs(val) <= 4 * se
    val, se = moment_on_limit(g, MomentSpec.cube(3), 50000, seed=0)
    assert val.real > 0.25
    with pytest.raises(ValueError):
        moment_on_limit(g, MomentSpec.single_edge(1, [1], power=2), 10, seed=0)


def test_example1_matches_limit_exactly():
    rows = convergence_report(example1_function, [100, 200], {"u2": MomentSpec.cube(2),
                                                             "tri": MomentSpec.triangle()}, example1_limit())
    assert max(r.gap for r in rows) < 1e-9


def test_constant_sequence_converges():
    seq = lambda m: GroupFunction.constant(FiniteAbelianGroup((m,)), 0.3)
    rows = convergence_report(seq, [5, 10, 20], {"edge": MomentSpec.single_edge(2, [1, 2])},
                              constant_limit(0.3))
    assert all(r.gap < 1e-12 for r in rows)
    assert abs(gap_trend_slope(rows)) < 1e-12


def test_csv_output():
    seq = lambda m: GroupFunction.constant(FiniteAbelianGroup((m,)), 1.0)
    rows = convergence_report(seq, [3], {"e": MomentSpec.single_edge(1, [1])}, constant_limit())
    text = report_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "3,e,1,0,1,0,0"


def test_example2_gaps_shrink():
    specs = {"u2": MomentSpec.cube(2), "u3": MomentSpec.cube(3)}
    rows = convergence_report(example2_function, [8, 16, 32], specs, example2_limit(),
                              num_samples=200000, seed=0)
    for sid in specs:
        gaps = [r.gap for r in rows if r.spec_id == sid]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gap_trend_slope(rows, sid) < 0


def test_example1_gap_trend_is_flat():
    rows = convergence_report(example1_function, [25, 50, 100, 200], {"u2": MomentSpec.cube(2)},
                              example1_limit())
    assert gap_trend_slope(rows) <= 1e-12
