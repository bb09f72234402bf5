import numpy as np
from hypothesis import given, strategies as st

from hofa import sampling


@given(st.integers(0, 3 * sampling.BLOCK), st.integers(1, 2 * sampling.BLOCK), st.integers(0, 2 ** 63))
def test_rows_depend_only_on_index(start, length, seed):
    whole = sampling.uniform_rows(seed, 7, 0, start + length, 2)
    part = sampling.uniform_rows(seed, 7, start, start + length, 2)
    assert np.array_equal(whole[start:], part)


def test_streams_and_seeds_differ():
    a = sampling.uniform_rows(1, 0, 0, 10, 1)
    assert not np.array_equal(a, sampling.uniform_rows(1, 1, 0, 10, 1))
    assert not np.array_equal(a, sampling.uniform_rows(2, 0, 0, 10, 1))


def test_integer_rows_in_range():
    rows = sampling.integer_rows(4, 0, 0, 5000, [2, 3, 7])
    assert rows.min() == 0 and np.array_equal(rows.max(axis=0), [1, 2, 6])


@given(st.integers(0, 20_000), st.integers(1, 16))
def test_partition_covers_range(n, workers):
    chunks = sampling.partition(n, workers)
    covered = [i for a, b in chunks for i in range(a, b)]
    assert covered == list(range(n))


def test_map_samples_identical_across_workers():
    fn = lambda a, b: sampling.uniform_rows(9, 3, a, b, 1)[:, 0]
    ref = sampling.map_samples(fn, 30_001, 1)
    for w in (2, 3, 8):
        out = sampling.map_samples(fn, 30_001, w)
        assert out.tobytes() == ref.tobytes()


def test_mean_and_stderr():
    mean, se = sampling.mean_and_stderr(np.ones(10))
    assert mean == 1 and se == 0
    mean, se = sampling.mean_and_stderr(np.array([0.0, 2.0]))
    assert mean == 1 and np.isclose(se, 1.0)
