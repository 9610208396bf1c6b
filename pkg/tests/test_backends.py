"""Compiled kernels against the pure-Python reference, kernel by kernel
and through a whole optimizer run."""

import numpy as np
import pytest
from conftest import dense_design, make_ridge, sparse_twin

from slbfgs import (
    Dataset,
    Prng,
    SlbfgsConfig,
    available_backends,
    set_backend,
    slbfgs_run,
)
from slbfgs._kernels import _fast, _ref

pytestmark = pytest.mark.skipif(
    _fast is None, reason="compiled kernels not built")


@pytest.fixture(autouse=True)
def restore_backend():
    yield
    set_backend(available_backends()[0])


def _close(a, b, tol=1e-10):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    assert np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(b))


def test_both_backends_listed():
    names = available_backends()
    assert names == ["compiled", "python"]


KERNEL_CASES = []


def _case(fn):
    KERNEL_CASES.append(fn)
    return fn


def _linear_inputs(sparse):
    X, y = dense_design(25, 6, seed=31)
    labels = np.where(y >= 0, 1.0, -1.0)
    rng = Prng(33)
    w = rng.normal(6)
    v = rng.normal(6)
    idx = rng.indices(25, 9)
    full = np.arange(25, dtype=np.int64)
    if sparse:
        ds = sparse_twin(X, y)
        mat = (ds.data, ds.col_indices, ds.indptr)
    else:
        mat = (X,)
    return mat, y, labels, w, v, idx, full


def _compare(name, *args):
    got = getattr(_fast, name)(*args)
    want = getattr(_ref, name)(*args)
    _close(got, want)


@pytest.mark.parametrize("sparse", [False, True], ids=["dense", "csr"])
@pytest.mark.parametrize("loss", ["ridge", "hinge2"])
@pytest.mark.parametrize("op", ["value", "grad", "hvp"])
def test_linear_model_kernels_agree(sparse, loss, op):
    mat, y, labels, w, v, idx, full = _linear_inputs(sparse)
    suffix = "csr" if sparse else "dense"
    name = f"{loss}_{op}_{suffix}"
    target = y if loss == "ridge" else labels
    reg = 0.123
    if op == "value":
        args = (*mat, target, w, reg, full)
    elif op == "grad":
        args = (*mat, target, w, reg, idx)
    elif loss == "ridge":
        args = (*mat, reg, idx, v)
    else:
        args = (*mat, target, w, reg, idx, v)
    _compare(name, *args)


@pytest.mark.parametrize("op", ["mc_value", "mc_grad", "mc_hvp"])
def test_matcomp_kernels_agree(op):
    rng = Prng(35)
    nrows, ncols, rank = 4, 5, 2
    n_obs = 11
    obs_i = np.array([int(rng.integers(0, nrows)) for _ in range(n_obs)],
                     dtype=np.int64)
    obs_j = np.array([int(rng.integers(0, ncols)) for _ in range(n_obs)],
                     dtype=np.int64)
    ratings = rng.normal(n_obs)
    dim = (nrows + ncols) * rank
    w = rng.normal(dim)
    v = rng.normal(dim)
    idx = rng.indices(n_obs, 6)
    lam = 0.05
    if op == "mc_value":
        args = (obs_i, obs_j, ratings, nrows, rank, w, lam,
                np.arange(n_obs, dtype=np.int64))
    elif op == "mc_grad":
        args = (obs_i, obs_j, ratings, nrows, rank, w, lam, idx)
    else:
        args = (obs_i, obs_j, ratings, nrows, rank, w, lam, idx, v)
    _compare(op, *args)


def test_two_loop_kernel_agrees():
    rng = Prng(37)
    M, d = 4, 7
    s_mat = rng.normal((M, d))
    y_mat = s_mat + 0.1 * rng.normal((M, d))
    rho = 1.0 / np.einsum("ij,ij->i", s_mat, y_mat)
    v = rng.normal(d)
    _compare("two_loop_apply", s_mat, y_mat, rho, 0.8, v)


def test_full_run_matches_across_backends():
    obj = make_ridge(n=50, d=6, reg=0.05)
    cfg = SlbfgsConfig(eta=0.05, m=40, M=5, L=8, b=5, b_H=20, epochs=3,
                       seed=2)
    w0 = np.ones(6)
    results = {}
    for name in available_backends():
        set_backend(name)
        w, traj, counters = slbfgs_run(obj, cfg, w0)
        results[name] = (w, [p.fx for p in traj], counters.grad_components)
    w_c, fx_c, g_c = results["compiled"]
    w_p, fx_p, g_p = results["python"]
    _close(w_c, w_p, tol=1e-8)
    np.testing.assert_allclose(fx_c, fx_p, rtol=1e-8)
    assert g_c == g_p


def test_backend_switch_rejects_unknown():
    with pytest.raises(ValueError):
        set_backend("fortran")
