"""Vector/index validation, dataset storage, counters, and the rng."""

import numpy as np
import pytest

from slbfgs import (
    Dataset,
    EvalCounters,
    Prng,
    SparseRow,
    as_index_set,
    as_vector,
    passes,
    sample_minibatch,
)


# ---------------------------------------------------------------------------
# as_vector / as_index_set


def test_as_vector_coerces_to_float64():
    v = as_vector([1, 2, 3])
    assert v.dtype == np.float64
    assert v.flags.c_contiguous
    np.testing.assert_array_equal(v, [1.0, 2.0, 3.0])


def test_as_vector_length_check():
    as_vector([1.0, 2.0], d=2)
    with pytest.raises(ValueError, match="length 3"):
        as_vector([1.0, 2.0], d=3)


def test_as_vector_rejects_matrix():
    with pytest.raises(ValueError, match="1-D"):
        as_vector(np.zeros((2, 2)))


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_as_vector_rejects_non_finite(bad):
    with pytest.raises(ValueError, match="non-finite"):
        as_vector([0.0, bad])


def test_as_index_set_sorts_and_keeps_dtype():
    idx = as_index_set([3, 0, 2], 5)
    assert idx.dtype == np.int64
    np.testing.assert_array_equal(idx, [0, 2, 3])


def test_as_index_set_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        as_index_set([1, 1, 2], 5)


def test_as_index_set_range_and_empty():
    with pytest.raises(ValueError, match="outside"):
        as_index_set([0, 5], 5)
    with pytest.raises(ValueError, match="outside"):
        as_index_set([-1], 5)
    with pytest.raises(ValueError, match="nonempty"):
        as_index_set([], 5)


def test_as_index_set_full_draw():
    idx = as_index_set(np.arange(7), 7)
    np.testing.assert_array_equal(idx, np.arange(7))


# ---------------------------------------------------------------------------
# SparseRow / Dataset


def test_sparse_row_validation():
    r = SparseRow(np.array([0, 3]), np.array([1.0, 2.0]))
    assert r.nnz == 2
    np.testing.assert_array_equal(r.to_dense(5), [1.0, 0.0, 0.0, 2.0, 0.0])
    with pytest.raises(ValueError, match="increasing"):
        SparseRow(np.array([3, 0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError, match="negative"):
        SparseRow(np.array([-1]), np.array([1.0]))
    with pytest.raises(ValueError, match="parallel"):
        SparseRow(np.array([0, 1]), np.array([1.0]))
    with pytest.raises(ValueError, match="non-finite"):
        SparseRow(np.array([0]), np.array([np.nan]))
    with pytest.raises(ValueError):
        r.to_dense(3)


def test_dataset_dense_basics():
    X = np.arange(6.0).reshape(3, 2)
    ds = Dataset.from_dense(X, [1.0, -1.0, 1.0])
    assert (ds.n, ds.d) == (3, 2)
    assert not ds.is_sparse
    np.testing.assert_array_equal(ds.row(1), [2.0, 3.0])
    np.testing.assert_allclose(ds.row_norms_sq(), (X * X).sum(axis=1))


def test_dataset_label_length_mismatch():
    with pytest.raises(ValueError):
        Dataset.from_dense(np.zeros((3, 2)), [1.0, 2.0])


def test_dataset_sparse_matches_dense():
    from conftest import dense_design, sparse_twin

    X, y = dense_design(10, 5, seed=11)
    dense = Dataset.from_dense(X, y)
    sparse = sparse_twin(X, y)
    assert sparse.is_sparse
    assert (sparse.n, sparse.d) == (dense.n, dense.d)
    np.testing.assert_allclose(sparse.row_norms_sq(), dense.row_norms_sq())
    back = sparse.to_dense()
    assert not back.is_sparse
    np.testing.assert_array_equal(back.X, X)
    row = sparse.row(2)
    np.testing.assert_array_equal(row.to_dense(5), X[2])


def test_dataset_sparse_d_inference():
    rows = [SparseRow(np.array([0]), np.array([1.0])),
            SparseRow(np.array([4]), np.array([2.0]))]
    ds = Dataset.from_sparse_rows(rows, [1.0, -1.0])
    assert ds.d == 5


# ---------------------------------------------------------------------------
# EvalCounters / passes


def test_counters_accumulate_and_copy():
    c = EvalCounters()
    c.charge_grad(10)
    c.charge_hvp(4)
    c.charge_grad(0)
    assert (c.grad_components, c.hvp_components) == (10, 4)
    d = c.copy()
    d.charge_grad(1)
    assert c.grad_components == 10 and d.grad_components == 11


def test_counters_reject_negative():
    c = EvalCounters()
    with pytest.raises(ValueError):
        c.charge_grad(-1)
    with pytest.raises(ValueError):
        c.charge_hvp(-1)


def test_passes_normalizes_by_n():
    c = EvalCounters(grad_components=30, hvp_components=10)
    assert passes(c, 20) == 2.0
    with pytest.raises(ValueError):
        passes(c, 0)


# ---------------------------------------------------------------------------
# Prng


def test_prng_deterministic():
    a = Prng(42).normal(8)
    b = Prng(42).normal(8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, Prng(43).normal(8))


def test_prng_spawn_streams_differ_and_replay():
    kids1 = Prng(0).spawn(3)
    kids2 = Prng(0).spawn(3)
    draws1 = [k.normal(6) for k in kids1]
    draws2 = [k.normal(6) for k in kids2]
    for x, y in zip(draws1, draws2):
        np.testing.assert_array_equal(x, y)
    assert not np.array_equal(draws1[0], draws1[1])
    assert not np.array_equal(draws1[1], draws1[2])


def test_prng_rejects_bad_seed():
    for bad in (-1, 1.5, None, "x"):
        with pytest.raises((ValueError, TypeError)):
            Prng(bad)


def test_prng_integers_range():
    p = Prng(1)
    vals = {p.integers(0, 4) for _ in range(200)}
    assert vals == {0, 1, 2, 3}
    with pytest.raises(ValueError):
        p.integers(3, 3)


def test_minibatch_shape_and_order():
    p = Prng(9)
    for _ in range(50):
        idx = sample_minibatch(p, 30, 7)
        assert idx.dtype == np.int64
        assert idx.shape == (7,)
        assert np.all(np.diff(idx) > 0)
        assert 0 <= idx[0] and idx[-1] < 30


def test_minibatch_full_draw():
    np.testing.assert_array_equal(sample_minibatch(Prng(2), 6, 6), np.arange(6))


def test_minibatch_size_validation():
    with pytest.raises(ValueError):
        sample_minibatch(Prng(0), 5, 0)
    with pytest.raises(ValueError):
        sample_minibatch(Prng(0), 5, 6)


def test_minibatch_uniform_over_subsets():
    # n=6, b=2: fifteen possible subsets, each should land near 1/15.
    p = Prng(123)
    counts = {}
    draws = 30000
    for _ in range(draws):
        key = tuple(sample_minibatch(p, 6, 2))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 15
    freqs = np.array(list(counts.values())) / draws
    assert abs(freqs.max() - 1 / 15) < 0.015
    assert abs(freqs.min() - 1 / 15) < 0.015
