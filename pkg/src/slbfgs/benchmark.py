"""Micro-benchmark of the kernel backends.

Times the hot operations (minibatch gradient, full gradient, subsampled
HVP, two-loop application, one full optimizer epoch) under each available
backend and prints a comparison table.  Run as::

    python -m slbfgs.benchmark [--n 20000] [--d 100] [--reps 5]

With only the pure backend built, the table simply has one column.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernels
from .core import Dataset, Prng, sample_minibatch
from .lbfgs import LbfgsMemory
from .objectives import RidgeObjective
from .optimizers import SlbfgsConfig, slbfgs_run


def _best_of(fn, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _build_instance(n: int, d: int):
    prng = Prng(0)
    X = prng.normal((n, d)) / np.sqrt(d)
    w_true = prng.normal(d)
    y = X @ w_true + 0.1 * prng.normal(n)
    obj = RidgeObjective(Dataset.from_dense(X, y), 1e-3)
    memory = LbfgsMemory(10, d)
    mem_rng = Prng(1)
    while memory.count < memory.capacity:
        s = mem_rng.normal(d)
        memory.push(s, s + 0.1 * mem_rng.normal(d))
    return obj, memory


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="kernel backend benchmark")
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--b", type=int, default=100)
    parser.add_argument("--bH", dest="b_H", type=int, default=1000)
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args(argv)

    obj, memory = _build_instance(args.n, args.d)
    d = obj.dim
    idx_b = sample_minibatch(Prng(2), args.n, min(args.b, args.n))
    idx_h = sample_minibatch(Prng(3), args.n, min(args.b_H, args.n))
    w = Prng(4).normal(d)
    v = Prng(5).normal(d)

    epoch_cfg = SlbfgsConfig(
        eta=0.05, m=max(1, args.n // max(args.b, 1)), M=10, L=10,
        b=min(args.b, args.n), b_H=min(args.b_H, args.n), epochs=1, seed=7)

    ops = [
        ("minibatch_grad", lambda: obj.grad(idx_b, w)),
        ("full_grad", lambda: obj.grad(obj.all_indices, w)),
        ("subsampled_hvp", lambda: obj.hvp(idx_h, w, v)),
        ("two_loop_apply", lambda: memory.two_loop_apply(v)),
        ("slbfgs_epoch", lambda: slbfgs_run(obj, epoch_cfg, np.zeros(d))),
    ]

    backends = _kernels.available_backends()
    original = _kernels.BACKEND
    results: dict[str, dict[str, float]] = {name: {} for name, _ in ops}
    try:
        for backend in backends:
            _kernels.set_backend(backend)
            for name, fn in ops:
                fn()  # warm up
                results[name][backend] = _best_of(fn, args.reps)
    finally:
        _kernels.set_backend(original)

    print(f"instance: n={args.n} d={args.d} b={args.b} b_H={args.b_H} "
          f"(best of {args.reps})")
    header = f"{'operation':<16}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, _ in ops:
        row = f"{name:<16}"
        for backend in backends:
            row += f"{results[name][backend] * 1e3:>12.3f}ms"
        if len(backends) == 2:
            py = results[name]["python"]
            fast = results[name]["compiled"]
            row += f"{py / fast:>9.2f}x" if fast > 0 else f"{'n/a':>10}"
        print(row)
    if len(backends) == 1:
        print(f"only the {backends[0]!r} backend is available; build the "
              "extension for a comparison")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
