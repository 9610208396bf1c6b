"""Optimizer loop contracts: the variance-reduced direction, seeded
determinism, algorithm equivalences, work accounting, and divergence."""

import dataclasses

import numpy as np
import pytest
from conftest import make_ridge

from slbfgs import (
    DivergenceError,
    IsotropicQuadraticObjective,
    Prng,
    SgdSchedule,
    SlbfgsConfig,
    sgd_run,
    slbfgs_run,
    sqn_run,
    svrg_run,
    vr_gradient,
)


def _small_config(**kw):
    base = dict(eta=0.05, m=24, M=5, L=4, b=3, b_H=6, epochs=3, seed=0)
    base.update(kw)
    return SlbfgsConfig(**base)


# ---------------------------------------------------------------------------
# the variance-reduced direction


def test_vr_gradient_hand_value():
    # two 1-d components centered at +1 and -1; anchor at 0 has mu = 0.
    # At x=0.5 with the first component: (0.5-1) - (0-1) + 0 = 0.5
    obj = IsotropicQuadraticObjective([[1.0], [-1.0]])
    mu = obj.grad(obj.all_indices, np.zeros(1))
    np.testing.assert_array_equal(mu, [0.0])
    v = vr_gradient(obj, np.array([0]), np.array([0.5]), np.zeros(1), mu)
    np.testing.assert_array_equal(v, [0.5])


def test_vr_gradient_at_anchor_returns_mu_bitwise():
    obj = make_ridge(n=15, d=4)
    rng = Prng(5)
    x = rng.normal(4)
    mu = obj.grad(obj.all_indices, x)
    for _ in range(5):
        idx = rng.indices(15, 4)
        v = vr_gradient(obj, idx, x, x, mu)
        np.testing.assert_array_equal(v, mu)


def test_vr_gradient_full_batch_is_full_gradient():
    obj = make_ridge(n=10, d=3)
    rng = Prng(6)
    x = rng.normal(3)
    w = rng.normal(3)
    mu = obj.grad(obj.all_indices, w)
    v = vr_gradient(obj, obj.all_indices, x, w, mu)
    g = obj.grad(obj.all_indices, x)
    assert np.abs(v - g).max() < 1e-12


def test_vr_gradient_unbiased_over_singletons():
    obj = make_ridge(n=12, d=4)
    rng = Prng(7)
    x = rng.normal(4)
    w = rng.normal(4)
    mu = obj.grad(obj.all_indices, w)
    mean = np.mean(
        [vr_gradient(obj, np.array([i]), x, w, mu) for i in range(12)], axis=0)
    g = obj.grad(obj.all_indices, x)
    assert np.abs(mean - g).max() < 1e-12


def test_vr_gradient_charges_two_batches():
    from slbfgs import EvalCounters

    obj = make_ridge(n=12, d=4)
    c = EvalCounters()
    mu = obj.grad(obj.all_indices, np.zeros(4))
    vr_gradient(obj, np.arange(5), np.ones(4), np.zeros(4), mu, c)
    assert c.grad_components == 10


# ---------------------------------------------------------------------------
# runs: determinism, fixed point, convergence


def test_slbfgs_deterministic_given_seed():
    obj = make_ridge(n=30, d=5, reg=0.1)
    cfg = _small_config(seed=11)
    w0 = np.ones(5)
    w1, traj1, c1 = slbfgs_run(obj, cfg, w0)
    w2, traj2, c2 = slbfgs_run(obj, cfg, w0)
    np.testing.assert_array_equal(w1, w2)
    assert [p.fx for p in traj1] == [p.fx for p in traj2]
    assert c1.grad_components == c2.grad_components
    w3, _, _ = slbfgs_run(obj, dataclasses.replace(cfg, seed=12), w0)
    assert not np.array_equal(w1, w3)


def test_minimizer_is_a_fixed_point():
    obj = make_ridge(n=20, d=4, reg=0.2)
    H = obj.dense_hessian(np.zeros(4))
    g0 = obj.grad(obj.all_indices, np.zeros(4))
    w_star = np.linalg.solve(H, -g0)
    f_star = obj.value(w_star)
    cfg = _small_config(epochs=5, record_every=1)
    for run in (slbfgs_run, svrg_run):
        w, traj, _ = run(obj, cfg, w_star, f_star=f_star)
        for p in traj:
            assert abs(p.fx - f_star) <= 1e-12
        assert np.abs(w - w_star).max() <= 1e-9


def test_slbfgs_converges_geometrically():
    obj = make_ridge(n=60, d=6, reg=0.1)
    H = obj.dense_hessian(np.zeros(6))
    g0 = obj.grad(obj.all_indices, np.zeros(6))
    w_star = np.linalg.solve(H, -g0)
    f_star = obj.value(w_star)
    for seed in range(10):
        cfg = SlbfgsConfig(eta=0.05, m=60, M=5, L=10, b=6, b_H=30,
                           epochs=6, seed=seed)
        _, traj, _ = slbfgs_run(obj, cfg, np.ones(6), f_star=f_star)
        sub = [p.subopt for p in traj]
        assert sub[-1] < 1e-6 * sub[0]
        # per-epoch suboptimality is monotone up to noise at the floor
        drops = [sub[k + 1] < sub[k] or sub[k + 1] < 1e-12
                 for k in range(len(sub) - 1)]
        assert all(drops)


def test_trajectory_passes_increase_and_start_at_zero():
    obj = make_ridge(n=30, d=5)
    cfg = _small_config(record_every=4)
    _, traj, counters = slbfgs_run(obj, cfg, np.zeros(5))
    assert traj[0].passes == 0.0
    diffs = np.diff([p.passes for p in traj])
    assert np.all(diffs > 0)
    assert traj.final.passes == pytest.approx(
        (counters.grad_components + counters.hvp_components) / 30)


# ---------------------------------------------------------------------------
# algorithm equivalences


def test_svrg_is_memoryless_slbfgs_bitwise():
    obj = make_ridge(n=30, d=5)
    cfg = _small_config(seed=3)
    w0 = np.ones(5)
    w_a, traj_a, c_a = slbfgs_run(obj, dataclasses.replace(cfg, M=0), w0)
    w_b, traj_b, c_b = svrg_run(obj, cfg, w0)
    np.testing.assert_array_equal(w_a, w_b)
    assert [p.fx for p in traj_a] == [p.fx for p in traj_b]
    assert c_b.hvp_components == 0  # no curvature probes without memory
    assert c_a.hvp_components == 0


def test_svrg_ignores_hessian_batch_size():
    obj = make_ridge(n=30, d=5)
    w0 = np.ones(5)
    w_a, _, _ = svrg_run(obj, _small_config(b_H=6), w0)
    w_b, _, _ = svrg_run(obj, _small_config(b_H=30), w0)
    np.testing.assert_array_equal(w_a, w_b)


def test_sqn_equals_sgd_until_memory_fills():
    # the first curvature pair lands after global step 2L, so the first 2L
    # steps of the quasi-Newton loop are plain SGD on the same batch stream
    obj = make_ridge(n=40, d=5)
    sched = SgdSchedule("constant", 0.05)
    L = 4
    w0 = np.ones(5)
    cfg = SlbfgsConfig(eta=1.0, m=2 * L, M=5, L=L, b=4, b_H=8,
                       epochs=1, seed=21)
    w_sqn, _, _ = sqn_run(obj, cfg, sched, w0)
    w_sgd, _, _ = sgd_run(obj, 4, sched, 2 * L, 21, w0)
    np.testing.assert_array_equal(w_sqn, w_sgd)
    # one step later the memory kicks in and the paths separate
    cfg_more = dataclasses.replace(cfg, m=2 * L + 1)
    w_sqn2, _, _ = sqn_run(obj, cfg_more, sched, w0)
    w_sgd2, _, _ = sgd_run(obj, 4, sched, 2 * L + 1, 21, w0)
    assert not np.array_equal(w_sqn2, w_sgd2)


def test_sgd_halves_on_unit_quadratic():
    # f = 0.5 w^2 with eta = 0.5: each step multiplies the iterate by 0.5
    obj = IsotropicQuadraticObjective([[0.0]])
    sched = SgdSchedule("constant", 0.5)
    w, traj, _ = sgd_run(obj, 1, sched, 4, 0, np.array([1.0]),
                         record_every=1)
    np.testing.assert_allclose(w, [0.0625])
    np.testing.assert_allclose([p.fx for p in traj],
                               [0.5, 0.125, 0.03125, 0.0078125, 0.001953125])


def test_schedules():
    s = SgdSchedule("constant", 2.0)
    assert s.step(0) == s.step(99) == 2.0
    s = SgdSchedule("inv_sqrt", 3.0)
    assert s.step(0) == 3.0
    assert s.step(3) == pytest.approx(1.5)
    s = SgdSchedule("inv_t", 3.0)
    assert s.step(0) == 3.0
    assert s.step(9) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        SgdSchedule("linear", 1.0)
    with pytest.raises(ValueError):
        SgdSchedule("constant", 0.0)
    with pytest.raises(ValueError):
        SgdSchedule("constant", 1.0).step(-1)


# ---------------------------------------------------------------------------
# work accounting


def _run_epochs(obj, epochs, **kw):
    cfg = _small_config(epochs=epochs, **kw)
    _, _, c = slbfgs_run(obj, cfg, np.zeros(obj.dim))
    return cfg, c


def test_gradient_work_per_epoch_exact():
    obj = make_ridge(n=30, d=5)
    per_epoch = []
    prev = 0
    for epochs in (1, 2, 3):
        cfg, c = _run_epochs(obj, epochs)
        per_epoch.append(c.grad_components - prev)
        prev = c.grad_components
    # every epoch costs exactly N + 2 m b gradient components
    n, m, b = 30, 24, 3
    assert per_epoch == [n + 2 * m * b] * 3


def test_hessian_work_warmup_then_steady():
    obj = make_ridge(n=30, d=5)
    cfg1, c1 = _run_epochs(obj, 1)
    cfg2, c2 = _run_epochs(obj, 2)
    cfg3, c3 = _run_epochs(obj, 3)
    m, L, b_H = cfg1.m, cfg1.L, cfg1.b_H
    fires = m // L
    # first epoch: the first window only seeds the anchor, no pair yet
    assert c1.hvp_components == (fires - 1) * b_H
    assert c2.hvp_components - c1.hvp_components == fires * b_H
    assert c3.hvp_components - c2.hvp_components == fires * b_H


def test_hessian_work_with_window_spanning_epochs():
    # m < L: windows straddle epoch boundaries; fires are global
    obj = make_ridge(n=30, d=5)
    cfg = _small_config(m=3, L=4, epochs=8)
    with pytest.warns(UserWarning, match="fewer than one curvature"):
        _, _, c = slbfgs_run(obj, cfg, np.zeros(5))
    total_steps = cfg.epochs * cfg.m
    fires = total_steps // cfg.L
    assert c.hvp_components == (fires - 1) * cfg.b_H


def test_memoryless_run_never_probes_hessian():
    obj = make_ridge(n=30, d=5)
    _, c = _run_epochs(obj, 3, M=0)
    assert c.hvp_components == 0


# ---------------------------------------------------------------------------
# recording and iterate choice


def test_record_every_stride():
    obj = make_ridge(n=30, d=5)
    cfg = _small_config(epochs=2, record_every=8)  # m=24: 2 mid-epoch samples
    _, traj, _ = slbfgs_run(obj, cfg, np.zeros(5))
    # initial point + per epoch (2 mid + 1 end)
    assert len(traj) == 1 + 2 * 3
    epochs = [p.epoch for p in traj]
    assert epochs == [0, 0, 0, 1, 1, 1, 2]


def test_random_iterate_choice_returns_inner_iterate():
    obj = make_ridge(n=30, d=5, reg=0.2)
    cfg = _small_config(iterate_choice="random", seed=2)
    w, traj, _ = slbfgs_run(obj, cfg, np.ones(5))
    assert np.isfinite(w).all()
    # with a single inner step the pre-step snapshot is the epoch anchor,
    # so the iterate never moves
    cfg1 = _small_config(iterate_choice="random", m=1, epochs=3)
    with pytest.warns(UserWarning):
        w1, traj1, _ = slbfgs_run(obj, cfg1, np.ones(5))
    np.testing.assert_array_equal(w1, np.ones(5))
    assert all(p.fx == traj1[0].fx for p in traj1)


def test_random_choice_differs_from_last():
    obj = make_ridge(n=30, d=5, reg=0.2)
    w_last, _, _ = slbfgs_run(obj, _small_config(seed=4), np.ones(5))
    w_rand, _, _ = slbfgs_run(
        obj, _small_config(seed=4, iterate_choice="random"), np.ones(5))
    assert not np.array_equal(w_last, w_rand)


# ---------------------------------------------------------------------------
# validation and divergence


def test_config_validation():
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.0, m=10)
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=float("nan"), m=10)
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.1, m=0)
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.1, m=10, M=-1)
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.1, m=10, seed=-1)
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.1, m=10, iterate_choice="best")
    with pytest.raises(ValueError):
        SlbfgsConfig(eta=0.1, m=10, record_every=-1)


def test_batch_sizes_must_fit_dataset():
    obj = make_ridge(n=10, d=3)
    with pytest.raises(ValueError, match="b=11"):
        slbfgs_run(obj, _small_config(b=11, b_H=5), np.zeros(3))
    with pytest.raises(ValueError, match="b_H=30"):
        slbfgs_run(obj, _small_config(b=2, b_H=30), np.zeros(3))
    with pytest.raises(ValueError):
        sgd_run(obj, 11, SgdSchedule("constant", 0.1), 5, 0, np.zeros(3))


def test_divergence_carries_partial_state():
    obj = make_ridge(n=30, d=5, reg=0.0)
    cfg = SlbfgsConfig(eta=1e6, m=200, M=0, L=10, b=3, b_H=6, epochs=5,
                       seed=0, record_every=1)
    with pytest.raises(DivergenceError) as err:
        slbfgs_run(obj, cfg, np.ones(5))
    e = err.value
    assert len(e.trajectory) >= 1
    assert e.trajectory[0].epoch == 0
    assert e.counters.grad_components > 0
    for p in e.trajectory:
        assert np.isfinite(p.fx)


def test_sgd_divergence():
    obj = make_ridge(n=30, d=5, reg=0.0)
    with pytest.raises(DivergenceError):
        sgd_run(obj, 3, SgdSchedule("constant", 1e8), 500, 0, np.ones(5))
