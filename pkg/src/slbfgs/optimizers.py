"""Stochastic optimizers: variance-reduced L-BFGS and its baselines.

The main loop (``slbfgs_run``) alternates outer epochs and inner steps:

* Each epoch anchors at ``w_k``, computes the full gradient ``mu_k`` (N
  gradient components), and runs m inner steps.
* Each inner step draws a minibatch S without replacement, forms the
  variance-reduced gradient v_t = grad_S(x_t) - grad_S(w_k) + mu_k
  (2|S| components), and moves x along the two-loop direction: x <-
  x - eta * H v_t.
* A global inner-step counter drives the curvature machinery: every L
  steps the mean u of the last L iterates is taken (the window spans
  epoch boundaries); once two such means exist, s = u_new - u_prev,
  y = subsampled Hessian at u_new times s over an independent batch T of
  size b_H (|T| HVP components), and (s, y) is offered to the memory.
  The very first window only seeds u_prev, so the first pair appears
  after 2L inner steps of the whole run.
* The next anchor is the last inner iterate, or a uniformly chosen one
  (``iterate_choice="random"``), matching the analysis setting.

``svrg_run`` is the same loop with the memory capacity forced to 0, which
disables the curvature machinery entirely (H = I, no Hessian batches, no
HVP charges) - literally a shared code path.  ``sqn_run`` keeps the
curvature machinery but uses the raw minibatch gradient and a decaying
step-size schedule instead of variance reduction.  ``sgd_run`` is plain
minibatch SGD under the same schedules.

Randomness wiring: the run seed spawns independent child streams for the
minibatch draws, the Hessian batch draws, and the iterate choice, so
algorithms that share a seed draw identical minibatch sequences.

Per-run cost accounting is exact: an SLBFGS epoch charges N + 2*m*b
gradient components, and b_H * floor(m/L) HVP components once the warm-up
has seeded u_prev (the first epoch of a run performs one fewer Hessian
update).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .core import EvalCounters, Prng, as_vector, sample_minibatch
from .lbfgs import LbfgsMemory
from .objectives import Objective

__all__ = [
    "DivergenceError",
    "SlbfgsConfig",
    "SgdSchedule",
    "TrajectoryPoint",
    "Trajectory",
    "vr_gradient",
    "slbfgs_run",
    "svrg_run",
    "sqn_run",
    "sgd_run",
]


class DivergenceError(RuntimeError):
    """Iterates or objective values left the finite range.

    Carries the last finite state so callers can report partial results.
    """

    def __init__(self, message, w_last, trajectory, counters):
        super().__init__(message)
        self.w_last = w_last
        self.trajectory = trajectory
        self.counters = counters


@dataclass(frozen=True)
class SlbfgsConfig:
    """Parameters of the variance-reduced quasi-Newton loop.

    b_H is the Hessian batch size, L the update spacing, M the memory
    capacity (M = 0 degenerates to SVRG), m the inner steps per epoch.
    """

    eta: float
    m: int
    M: int = 10
    L: int = 10
    b: int = 20
    b_H: int = 200
    epochs: int = 10
    seed: int = 0
    iterate_choice: str = "last"
    record_every: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be a positive finite number, got {self.eta}")
        for name in ("m", "L", "b", "b_H", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.M < 0:
            raise ValueError(f"M must be >= 0, got {self.M}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.iterate_choice not in ("last", "random"):
            raise ValueError(
                f"iterate_choice must be 'last' or 'random', got {self.iterate_choice!r}"
            )
        if self.record_every < 0:
            raise ValueError(f"record_every must be >= 0, got {self.record_every}")


@dataclass(frozen=True)
class SgdSchedule:
    """Step-size schedule: constant, eta0/sqrt(t+1), or eta0/(t+1)."""

    kind: str
    eta0: float

    KINDS = ("constant", "inv_sqrt", "inv_t")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"schedule kind must be one of {self.KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.eta0) and self.eta0 > 0):
            raise ValueError(f"eta0 must be a positive finite number, got {self.eta0}")

    def step(self, t: int) -> float:
        if t < 0:
            raise ValueError(f"step index must be >= 0, got {t}")
        if self.kind == "constant":
            return self.eta0
        if self.kind == "inv_sqrt":
            return self.eta0 / math.sqrt(t + 1.0)
        return self.eta0 / (t + 1.0)


@dataclass(frozen=True)
class TrajectoryPoint:
    """One sample: epoch index, cumulative passes, f(w), optional f(w)-f*."""

    epoch: int
    passes: float
    fx: float
    subopt: float | None
    wall_secs: float


class Trajectory:
    """Ordered trajectory samples with strictly increasing passes."""

    def __init__(self):
        self.points: list[TrajectoryPoint] = []

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def append(self, point: TrajectoryPoint) -> None:
        if self.points and point.passes <= self.points[-1].passes:
            raise ValueError(
                f"passes must strictly increase: {point.passes} after "
                f"{self.points[-1].passes}"
            )
        self.points.append(point)

    @property
    def final(self) -> TrajectoryPoint:
        if not self.points:
            raise ValueError("empty trajectory")
        return self.points[-1]


def vr_gradient(obj, idx, x, w_anchor, mu, counters=None) -> np.ndarray:
    """grad_S(x) - grad_S(w_anchor) + mu; charges 2|S| gradient components.

    Computed as (g_x - g_w) + mu, so at x == w_anchor the minibatch terms
    cancel exactly and the full gradient mu is returned unchanged.
    """
    mu = as_vector(mu, obj.dim, "mu")
    g_x = obj.grad(idx, x, counters)
    g_w = obj.grad(idx, w_anchor, counters)
    return (g_x - g_w) + mu


class _Recorder:
    """Appends trajectory samples and watches for non-finite values."""

    def __init__(self, obj, counters, f_star):
        self.obj = obj
        self.counters = counters
        self.f_star = f_star
        self.traj = Trajectory()
        self.t0 = time.perf_counter()

    def record(self, epoch, w):
        fx = self.obj.value(w)
        if not math.isfinite(fx):
            raise DivergenceError(
                f"objective value became non-finite at epoch {epoch}",
                w_last=None, trajectory=self.traj, counters=self.counters,
            )
        subopt = None if self.f_star is None else fx - self.f_star
        n = self.obj.count
        self.traj.append(TrajectoryPoint(
            epoch=epoch,
            passes=(self.counters.grad_components + self.counters.hvp_components) / n,
            fx=fx,
            subopt=subopt,
            wall_secs=time.perf_counter() - self.t0,
        ))


class _CurvatureUpdater:
    """Every L observed iterates: average them, difference consecutive
    averages, probe the subsampled Hessian along the step, offer the pair."""

    def __init__(self, obj, memory, L, b_H, t_stream, counters):
        self.obj = obj
        self.memory = memory
        self.L = L
        self.b_H = b_H
        self.t_stream = t_stream
        self.counters = counters
        self.u_accum = np.zeros(obj.dim)
        self.u_count = 0
        self.u_prev = None

    def observe(self, x) -> None:
        """Feed the pre-update iterate of the current inner step."""
        self.u_accum += x
        self.u_count += 1

    def maybe_update(self) -> None:
        """Call after the step's x-update; fires once per L observations."""
        if self.u_count < self.L:
            return
        u_new = self.u_accum / self.L
        self.u_accum = np.zeros(self.obj.dim)
        self.u_count = 0
        if not np.isfinite(u_new).all():
            # The window sum overflowed even though each iterate was
            # finite; drop the window and reseed.  The run itself fails at
            # the next finiteness check or recording.
            self.u_prev = None
            return
        if self.u_prev is not None:
            s = u_new - self.u_prev
            if not np.isfinite(s).all():
                self.u_prev = None
                return
            T = sample_minibatch(self.t_stream, self.obj.count, self.b_H)
            y = self.obj.hvp(T, u_new, s, self.counters)
            self.memory.push(s, y)
        self.u_prev = u_new


def _check_finite(x, where, w_last, recorder):
    if not np.isfinite(x).all():
        raise DivergenceError(
            f"non-finite values {where}",
            w_last=w_last,
            trajectory=recorder.traj,
            counters=recorder.counters,
        )


def _validate_batches(obj, config):
    n = obj.count
    if config.b > n:
        raise ValueError(f"minibatch size b={config.b} exceeds N={n}")
    if config.b_H > n:
        raise ValueError(f"Hessian batch size b_H={config.b_H} exceeds N={n}")
    if config.M > 0 and config.L > config.m:
        warnings.warn(
            f"L={config.L} exceeds m={config.m}: fewer than one curvature "
            "update per epoch",
            stacklevel=3,
        )


def slbfgs_run(obj: Objective, config: SlbfgsConfig, w0, *, f_star=None,
               ) -> tuple[np.ndarray, Trajectory, EvalCounters]:
    """Variance-reduced stochastic L-BFGS.  Returns (w, trajectory, counters).

    Raises DivergenceError (with the last finite state attached) if an
    iterate or recorded value leaves the finite range.
    """
    _validate_batches(obj, config)
    x = as_vector(w0, obj.dim, "w0").copy()
    n = obj.count
    counters = EvalCounters()
    s_stream, t_stream, choice_stream = Prng(config.seed).spawn(3)
    memory = LbfgsMemory(config.M, obj.dim)
    updater = None
    if config.M > 0:
        updater = _CurvatureUpdater(obj, memory, config.L, config.b_H,
                                    t_stream, counters)
    recorder = _Recorder(obj, counters, f_star)
    recorder.record(0, x)
    re = config.record_every
    for k in range(config.epochs):
        w_anchor = x.copy()
        mu = obj.grad(obj.all_indices, w_anchor, counters)
        _check_finite(mu, f"in the epoch {k} anchor gradient", x, recorder)
        pick = None
        snapshot = None
        if config.iterate_choice == "random":
            pick = choice_stream.integers(0, config.m)
        for t in range(config.m):
            if pick == t:
                snapshot = x.copy()
            if updater is not None:
                updater.observe(x)
            S = sample_minibatch(s_stream, n, config.b)
            v = vr_gradient(obj, S, x, w_anchor, mu, counters)
            _check_finite(v, f"in the step direction at epoch {k}, "
                          f"inner step {t}", x, recorder)
            hv = memory.two_loop_apply(v)
            x = x - config.eta * hv
            _check_finite(x, f"at epoch {k}, inner step {t}", w_anchor, recorder)
            if updater is not None:
                updater.maybe_update()
            if re and (t + 1) % re == 0 and (t + 1) < config.m:
                recorder.record(k, x)
        if pick is not None:
            x = snapshot
        recorder.record(k + 1, x)
    return x, recorder.traj, counters


def svrg_run(obj: Objective, config: SlbfgsConfig, w0, *, f_star=None,
             ) -> tuple[np.ndarray, Trajectory, EvalCounters]:
    """Variance-reduced SGD: the same loop with the curvature memory
    disabled (M = 0), so every step moves along the raw v_t direction."""
    return slbfgs_run(obj, replace(config, M=0), w0, f_star=f_star)


def sqn_run(obj: Objective, config: SlbfgsConfig, schedule: SgdSchedule, w0,
            *, f_star=None) -> tuple[np.ndarray, Trajectory, EvalCounters]:
    """Stochastic quasi-Newton without variance reduction.

    Keeps the curvature machinery of ``slbfgs_run`` but steps along
    H * grad_S(x_t) with a schedule-driven step size (config.eta is
    ignored).  Epochs exist only as a recording cadence: m steps each, no
    anchor point and no full gradients.
    """
    _validate_batches(obj, config)
    x = as_vector(w0, obj.dim, "w0").copy()
    n = obj.count
    counters = EvalCounters()
    s_stream, t_stream, _ = Prng(config.seed).spawn(3)
    memory = LbfgsMemory(config.M, obj.dim)
    updater = None
    if config.M > 0:
        updater = _CurvatureUpdater(obj, memory, config.L, config.b_H,
                                    t_stream, counters)
    recorder = _Recorder(obj, counters, f_star)
    recorder.record(0, x)
    re = config.record_every
    global_t = 0
    for k in range(config.epochs):
        for t in range(config.m):
            if updater is not None:
                updater.observe(x)
            S = sample_minibatch(s_stream, n, config.b)
            g = obj.grad(S, x, counters)
            _check_finite(g, f"in the step direction at epoch {k}, "
                          f"inner step {t}", x, recorder)
            hv = memory.two_loop_apply(g)
            x = x - schedule.step(global_t) * hv
            global_t += 1
            _check_finite(x, f"at epoch {k}, inner step {t}", None, recorder)
            if updater is not None:
                updater.maybe_update()
            if re and (t + 1) % re == 0 and (t + 1) < config.m:
                recorder.record(k, x)
        recorder.record(k + 1, x)
    return x, recorder.traj, counters


def sgd_run(obj: Objective, b: int, schedule: SgdSchedule, steps: int,
            seed: int, w0, *, record_every: int | None = None, f_star=None,
            ) -> tuple[np.ndarray, Trajectory, EvalCounters]:
    """Plain minibatch SGD: x <- x - step(t) * grad_S(x).

    Records roughly once per data pass by default.  The epoch field of
    each sample counts completed passes (t*b // N).
    """
    if b < 1 or b > obj.count:
        raise ValueError(f"minibatch size must satisfy 1 <= b <= {obj.count}, got {b}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x = as_vector(w0, obj.dim, "w0").copy()
    n = obj.count
    counters = EvalCounters()
    s_stream, _, _ = Prng(seed).spawn(3)
    recorder = _Recorder(obj, counters, f_star)
    recorder.record(0, x)
    if record_every is None:
        record_every = max(1, n // b)
    elif record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")
    for t in range(steps):
        S = sample_minibatch(s_stream, n, b)
        g = obj.grad(S, x, counters)
        x = x - schedule.step(t) * g
        _check_finite(x, f"at step {t}", None, recorder)
        if (t + 1) % record_every == 0 and (t + 1) < steps:
            recorder.record((t + 1) * b // n, x)
    recorder.record(steps * b // n, x)
    return x, recorder.traj, counters
