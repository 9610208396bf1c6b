"""Command-line experiment driver.

Subcommands:

* ``run``: one algorithm, one step size, one seed; writes trajectory CSV.
* ``grid``: every (eta, seed) cell of a step-size grid, optionally in
  parallel; writes the long CSV plus a per-eta summary naming the best
  step size by median final suboptimality.
* ``verify``: property sweeps over the theory checkers; exit 2 if any
  bound is violated.
* ``reference``: certified optimum of a problem, written as JSON.

Exit codes: 0 success (a diverged run is a recorded outcome, not an
error), 1 usage or configuration error, 2 verification failure.  Every
artifact is a pure function of (config, seed); wall-clock timing is
opt-in because it breaks that.

Config files are JSON objects with the same keys as the long flags
(``b_H`` for --bH); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import (
    SpectrumBounds,
    check_gradient_dominance,
    check_variance_bound,
    convergence_rate,
    sweep_memory_bounds,
)
from .core import Prng
from .io import (
    ReferenceConvergenceError,
    RunRecord,
    compute_reference,
    gen_synthetic_ridge,
    load_reference,
    parse_libsvm,
    parse_triples,
    save_reference,
    write_trajectory,
)
from .objectives import (
    IsotropicQuadraticObjective,
    MatrixCompletionObjective,
    Objective,
    RidgeObjective,
    SquaredHingeSvmObjective,
)
from .optimizers import (
    DivergenceError,
    SgdSchedule,
    SlbfgsConfig,
    sgd_run,
    slbfgs_run,
    sqn_run,
    svrg_run,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

ALGOS = ("slbfgs", "svrg", "sqn", "sgd")
OBJECTIVES = ("ridge", "svm", "matcomp")
POINTS_PER_DECADE = 8


class CliError(Exception):
    """Configuration problem; reported on stderr, exit 1."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the artifact contract reserves 2
    for verification failures, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="slbfgs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_problem_flags(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--data", help="sparse labeled rows (label idx:val ...)")
        p.add_argument("--synthetic", metavar="N,d,cond,noise",
                       help="generate a dense ridge instance")
        p.add_argument("--triples", help="matrix-completion 'row col rating' file")
        p.add_argument("--objective", choices=OBJECTIVES)
        p.add_argument("--reg", type=float, help="regularization weight")
        p.add_argument("--rank", type=int, help="factor rank (matcomp)")
        p.add_argument("--shape", metavar="R,C", help="matrix shape (matcomp)")
        p.add_argument("--data-seed", type=int,
                       help="seed for synthetic data (default 0; separate "
                            "from the run seed so grids share one instance)")

    def add_run_flags(p):
        p.add_argument("--algo", choices=ALGOS)
        p.add_argument("--eta", type=float, help="step size")
        p.add_argument("--seeds", help="seed list: '0,1,2' or '0-9'")
        p.add_argument("--out", help="trajectory CSV path")
        p.add_argument("--epochs", type=int)
        p.add_argument("--m", type=int, help="inner steps per epoch (default N/b)")
        p.add_argument("--M", type=int, help="curvature memory size")
        p.add_argument("--L", type=int, help="steps between curvature updates")
        p.add_argument("--b", type=int, help="gradient batch size")
        p.add_argument("--bH", dest="b_H", type=int,
                       help="Hessian batch size (default 10b)")
        p.add_argument("--schedule", choices=SgdSchedule.KINDS,
                       help="step schedule for sgd/sqn (default constant)")
        p.add_argument("--iterate-choice", choices=("last", "random"))
        p.add_argument("--record-every", type=int,
                       help="also sample every k inner steps")
        p.add_argument("--timing", action="store_true", default=None,
                       help="fill wall_secs (breaks bit-reproducibility)")
        p.add_argument("--reference", help="load a saved reference JSON")
        p.add_argument("--reference-policy", choices=("precompute", "none"))

    p_run = sub.add_parser("run",
                           help="single trajectory to CSV")
    add_problem_flags(p_run)
    add_run_flags(p_run)

    p_grid = sub.add_parser("grid",
                            help="step-size grid sweep to CSV + summary")
    add_problem_flags(p_grid)
    add_run_flags(p_grid)
    p_grid.add_argument("--etas", help="explicit list: '1e-3,1e-2,1e-1'")
    p_grid.add_argument("--eta-min", type=float)
    p_grid.add_argument("--eta-max", type=float)
    p_grid.add_argument("--jobs", type=int, help="concurrent cells (default 1)")

    p_ver = sub.add_parser("verify",
                           help="theory property sweeps (exit 2 on violation)")
    p_ver.add_argument("--dims", default="2,5,10",
                       help="comma list of dimensions (each <= 50)")
    p_ver.add_argument("--memory-sizes", default="1,3,5")
    p_ver.add_argument("--lam-min", type=float, default=0.5)
    p_ver.add_argument("--lam-max", type=float, default=2.0)
    p_ver.add_argument("--trials", type=int, default=10,
                       help="memories per (dim, M) cell")
    p_ver.add_argument("--points", type=int, default=20,
                       help="test points for the objective inequalities")
    p_ver.add_argument("--contraction-seeds", type=int, default=5,
                       help="Monte Carlo seeds for the epoch contraction check")
    p_ver.add_argument("--seed", type=int, default=None)

    p_ref = sub.add_parser("reference",
                           help="certified optimum as JSON")
    add_problem_flags(p_ref)
    p_ref.add_argument("--out", help="JSON output path")
    p_ref.add_argument("--tol", type=float, default=1e-10,
                       help="required gradient norm at the optimum")
    return parser


# Keys a config file may set, shared across run/grid.
_CONFIG_KEYS = (
    "data", "synthetic", "triples", "objective", "reg", "rank", "shape",
    "data_seed", "algo", "eta", "seeds", "out", "epochs", "m", "M", "L",
    "b", "b_H", "schedule", "iterate_choice", "record_every", "timing",
    "reference", "reference_policy", "etas", "eta_min", "eta_max", "jobs",
)


def _merge_config(args) -> None:
    """Fill argparse namespace gaps from the JSON config file, flags winning."""
    if getattr(args, "config", None) is None:
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {args.config} is not valid JSON: {exc}"
                       ) from None
    if not isinstance(payload, dict):
        raise CliError(f"config file {args.config} must hold a JSON object")
    for key, value in payload.items():
        if key not in _CONFIG_KEYS:
            raise CliError(f"unknown config key {key!r}")
        if not hasattr(args, key):
            raise CliError(f"config key {key!r} does not apply to this command")
        if getattr(args, key) is None:
            setattr(args, key, value)


def _parse_int_list(text, what: str) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo_s, hi_s = part.split("-", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise CliError(f"bad {what} range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise CliError(f"empty {what} list")
    return out


def _parse_float_list(text, what: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        vals = [float(p) for p in str(text).split(",") if p.strip()]
    if not vals:
        raise CliError(f"empty {what} list")
    return vals


def _resolve_seeds(args) -> list[int]:
    if getattr(args, "seeds", None) is not None:
        try:
            return _parse_int_list(args.seeds, "seeds")
        except ValueError:
            raise CliError(f"bad seed list {args.seeds!r}") from None
    env = os.environ.get("SLBFGS_SEED")
    if env is not None:
        try:
            return [int(env)]
        except ValueError:
            raise CliError(f"SLBFGS_SEED={env!r} is not an integer") from None
    return [0]


def _log_grid(lo: float, hi: float) -> list[float]:
    if not (lo > 0 and hi > 0 and math.isfinite(lo) and math.isfinite(hi)):
        raise CliError("eta grid endpoints must be positive and finite")
    if hi < lo:
        raise CliError(f"eta-max {hi} below eta-min {lo}")
    if hi == lo:
        return [lo]
    decades = math.log10(hi / lo)
    count = max(2, int(round(decades * POINTS_PER_DECADE)) + 1)
    return [float(v) for v in np.geomspace(lo, hi, count)]


def _resolve_etas(args) -> list[float]:
    if getattr(args, "etas", None) is not None:
        try:
            etas = _parse_float_list(args.etas, "eta")
        except ValueError:
            raise CliError(f"bad eta list {args.etas!r}") from None
        if any(not (e > 0 and math.isfinite(e)) for e in etas):
            raise CliError("every eta must be positive and finite")
        return sorted(set(etas))
    eta_min = getattr(args, "eta_min", None)
    eta_max = getattr(args, "eta_max", None)
    if eta_min is not None or eta_max is not None:
        if eta_min is None or eta_max is None:
            raise CliError("--eta-min and --eta-max go together")
        return _log_grid(eta_min, eta_max)
    if getattr(args, "eta", None) is not None:
        return [float(args.eta)]
    raise CliError("no step sizes given (use --etas, --eta-min/--eta-max, "
                   "or --eta)")


def _build_problem(args) -> tuple[Objective, object]:
    """Objective plus reference solution (or None) from the problem flags."""
    sources = [s for s in ("data", "synthetic", "triples")
               if getattr(args, s, None) is not None]
    if len(sources) > 1:
        raise CliError(f"give only one of --data/--synthetic/--triples, "
                       f"got {sources}")
    if not sources:
        raise CliError("no problem given (use --data, --synthetic, or --triples)")
    kind = args.objective
    reg = float(args.reg) if args.reg is not None else 0.0
    if reg < 0 or not math.isfinite(reg):
        raise CliError(f"reg must be finite and >= 0, got {reg}")
    data_seed = int(args.data_seed) if args.data_seed is not None else 0

    generated_ref = None
    if args.synthetic is not None:
        if kind not in (None, "ridge"):
            raise CliError("--synthetic generates ridge data; "
                           f"--objective {kind} does not apply")
        parts = _parse_float_list(args.synthetic, "--synthetic")
        if len(parts) != 4:
            raise CliError(f"--synthetic wants N,d,cond,noise, "
                           f"got {args.synthetic!r}")
        n, d = int(parts[0]), int(parts[1])
        try:
            sr = gen_synthetic_ridge(n, d, parts[2], parts[3],
                                     seed=data_seed, reg=reg)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        obj: Objective = RidgeObjective(sr.dataset, reg)
        generated_ref = sr.reference
    elif args.data is not None:
        if kind == "matcomp":
            raise CliError("matcomp needs --triples, not --data")
        dataset = parse_libsvm(args.data)
        cls = SquaredHingeSvmObjective if kind == "svm" else RidgeObjective
        obj = cls(dataset, reg)
    else:
        if kind not in (None, "matcomp"):
            raise CliError(f"--triples implies a matcomp objective, "
                           f"got --objective {kind}")
        if args.rank is None:
            raise CliError("matcomp needs --rank")
        nrows = ncols = None
        if args.shape is not None:
            shape = _parse_int_list(args.shape, "shape")
            if len(shape) != 2:
                raise CliError(f"--shape wants R,C, got {args.shape!r}")
            nrows, ncols = shape
        oi, oj, rr, nrows, ncols = parse_triples(args.triples, nrows, ncols)
        obj = MatrixCompletionObjective(oi, oj, rr, nrows, ncols,
                                        rank=int(args.rank), reg=reg)

    ref = None
    policy = getattr(args, "reference_policy", None)
    if getattr(args, "reference", None) is not None:
        ref = load_reference(args.reference)
        if ref.w_star.shape[0] != obj.dim:
            raise CliError(
                f"reference dimension {ref.w_star.shape[0]} does not match "
                f"objective dimension {obj.dim}")
    elif policy == "precompute":
        try:
            ref = compute_reference(obj)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    elif generated_ref is not None and policy != "none":
        ref = generated_ref
    return obj, ref


def _initial_point(obj: Objective, seed: int) -> np.ndarray:
    """Zero start, except the factored model where zero is a saddle: that
    gets small normal entries from a stream the optimizer never touches."""
    if isinstance(obj, MatrixCompletionObjective):
        init_stream = Prng(seed).spawn(4)[3]
        return 1e-5 * init_stream.normal(obj.dim)
    return np.zeros(obj.dim)


def _resolve_run_params(args, n: int) -> dict:
    b = int(args.b) if args.b is not None else min(20, n)
    b_H = int(args.b_H) if args.b_H is not None else min(10 * b, n)
    m = int(args.m) if args.m is not None else max(1, n // b)
    return {
        "b": b,
        "b_H": b_H,
        "m": m,
        "M": int(args.M) if args.M is not None else 10,
        "L": int(args.L) if args.L is not None else 10,
        "epochs": int(args.epochs) if args.epochs is not None else 10,
        "iterate_choice": args.iterate_choice or "last",
        "record_every": int(args.record_every)
        if args.record_every is not None else 0,
        "schedule": args.schedule or "constant",
    }


def _run_cell(obj: Objective, ref, params: dict, algo: str, eta: float,
              seed: int) -> RunRecord:
    f_star = ref.f_star if ref is not None else None
    w0 = _initial_point(obj, seed)
    try:
        if algo in ("slbfgs", "svrg", "sqn"):
            cfg = SlbfgsConfig(
                eta=eta, m=params["m"], M=params["M"], L=params["L"],
                b=params["b"], b_H=params["b_H"], epochs=params["epochs"],
                seed=seed, iterate_choice=params["iterate_choice"],
                record_every=params["record_every"])
            if algo == "slbfgs":
                _w, traj, _c = slbfgs_run(obj, cfg, w0, f_star=f_star)
            elif algo == "svrg":
                _w, traj, _c = svrg_run(obj, cfg, w0, f_star=f_star)
            else:
                schedule = SgdSchedule(params["schedule"], eta)
                _w, traj, _c = sqn_run(obj, cfg, schedule, w0, f_star=f_star)
        elif algo == "sgd":
            schedule = SgdSchedule(params["schedule"], eta)
            steps = params["epochs"] * params["m"]
            _w, traj, _c = sgd_run(
                obj, params["b"], schedule, steps, seed, w0,
                record_every=params["record_every"] or None,
                f_star=f_star)
        else:
            raise CliError(f"unknown algorithm {algo!r}")
        return RunRecord(algo=algo, seed=seed, eta=eta, trajectory=traj)
    except DivergenceError as exc:
        return RunRecord(algo=algo, seed=seed, eta=eta,
                         trajectory=exc.trajectory, diverged=True)


def _cmd_run(args) -> int:
    _merge_config(args)
    algo = args.algo or "slbfgs"
    etas = _resolve_etas(args)
    if len(etas) != 1:
        raise CliError(f"run wants exactly one eta, got {len(etas)} "
                       "(use the grid command for sweeps)")
    seeds = _resolve_seeds(args)
    if len(seeds) != 1:
        raise CliError(f"run wants exactly one seed, got {len(seeds)}")
    obj, ref = _build_problem(args)
    params = _resolve_run_params(args, obj.count)
    timing = bool(args.timing)
    record = _run_cell(obj, ref, params, algo, etas[0], seeds[0])
    out = args.out or "run.csv"
    write_trajectory(out, [record], timing=timing)
    status = "diverged" if record.diverged else "ok"
    final = record.trajectory.final
    tail = (f" subopt={final.subopt!r}" if final.subopt is not None
            else f" fx={final.fx!r}")
    print(f"wrote {out}: {algo} eta={etas[0]!r} seed={seeds[0]} "
          f"{status}{tail}")
    return EXIT_OK


def _median_final(records: list[RunRecord], use_subopt: bool) -> float:
    finals = []
    for r in records:
        if r.diverged:
            finals.append(math.inf)
        else:
            p = r.trajectory.final
            finals.append(p.subopt if use_subopt else p.fx)
    return float(statistics.median(finals))


def _cmd_grid(args) -> int:
    _merge_config(args)
    algo = args.algo or "slbfgs"
    etas = _resolve_etas(args)
    seeds = _resolve_seeds(args)
    jobs = int(args.jobs) if args.jobs is not None else 1
    if jobs < 1:
        raise CliError(f"jobs must be >= 1, got {jobs}")
    obj, ref = _build_problem(args)
    params = _resolve_run_params(args, obj.count)
    timing = bool(args.timing)

    cells = [(eta, seed) for eta in etas for seed in seeds]
    if jobs == 1:
        records = [_run_cell(obj, ref, params, algo, eta, seed)
                   for eta, seed in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_cell, obj, ref, params, algo,
                                   eta, seed)
                       for eta, seed in cells]
            records = [f.result() for f in futures]

    out = args.out or "grid.csv"
    write_trajectory(out, records, timing=timing)

    use_subopt = ref is not None
    by_eta: dict[float, list[RunRecord]] = {}
    for rec in records:
        by_eta.setdefault(rec.eta, []).append(rec)
    medians = {eta: _median_final(by_eta[eta], use_subopt) for eta in etas}
    best = min(etas, key=lambda e: (medians[e], e))

    stem = Path(out)
    summary_path = stem.with_name(stem.stem + "_summary" + (stem.suffix or ".csv"))
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("eta,cells,diverged,median_final_subopt,best\n")
        for eta in etas:
            recs = by_eta[eta]
            ndiv = sum(r.diverged for r in recs)
            fh.write(f"{eta!r},{len(recs)},{ndiv},{medians[eta]!r},"
                     f"{int(eta == best)}\n")
    ndiv_total = sum(r.diverged for r in records)
    print(f"wrote {out} ({len(records)} cells, {ndiv_total} diverged) "
          f"and {summary_path}")
    print(f"best eta={best!r} median_final="
          f"{medians[best]!r} ({'subopt' if use_subopt else 'fx'})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    dims = _parse_int_list(args.dims, "dims")
    memory_sizes = _parse_int_list(args.memory_sizes, "memory-sizes")
    if any(d > 50 for d in dims):
        raise CliError(f"dims are capped at 50 for the dense oracles, "
                       f"got {max(dims)}")
    if any(d < 1 for d in dims) or any(M < 0 for M in memory_sizes):
        raise CliError("dims must be >= 1 and memory sizes >= 0")
    if args.trials < 1:
        raise CliError(f"trials must be >= 1, got {args.trials}")
    if args.points < 1:
        raise CliError(f"points must be >= 1, got {args.points}")
    if args.contraction_seeds < 1:
        raise CliError("contraction-seeds must be >= 1")
    seed = args.seed if args.seed is not None else 0
    try:
        bounds = SpectrumBounds(args.lam_min, args.lam_max)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    failed = False

    checked, failures = sweep_memory_bounds(dims, memory_sizes, bounds,
                                            args.trials, seed)
    for line in failures:
        print(f"FAIL {line}")
    print(f"memory-bounds: checked={checked} failures={len(failures)} "
          f"{'FAIL' if failures else 'ok'}")
    failed = failed or bool(failures)

    # Inequality checks on a small dense ridge instance.
    sr = gen_synthetic_ridge(150, 10, cond=5.0, noise=0.1, seed=seed,
                             reg=1e-2)
    obj = RidgeObjective(sr.dataset, 1e-2)
    f_star = sr.reference.f_star
    w_star = sr.reference.w_star
    H = obj.dense_hessian()
    lam_min = float(np.linalg.eigvalsh(H)[0])
    lam_max = obj.component_curvature_max()
    prng = Prng(seed + 1)
    dom_bad = var_bad = 0
    for k in range(args.points):
        x = w_star + prng.normal(obj.dim)
        w = w_star + prng.normal(obj.dim)
        rep = check_gradient_dominance(obj, x, lam_min, f_star)
        if not rep.holds:
            dom_bad += 1
            print(f"FAIL dominance point={k} seed={seed}: {rep.describe()}")
        rep = check_variance_bound(obj, x, w, lam_max, f_star)
        if not rep.holds:
            var_bad += 1
            print(f"FAIL variance point={k} seed={seed}: {rep.describe()}")
    print(f"gradient-dominance: checked={args.points} failures={dom_bad} "
          f"{'FAIL' if dom_bad else 'ok'}")
    print(f"variance-bound: checked={args.points} failures={var_bad} "
          f"{'FAIL' if var_bad else 'ok'}")
    failed = failed or dom_bad or var_bad

    # Monte Carlo contraction at the analyzable setting: an isotropic
    # quadratic has unit curvature bounds on every subsampled Hessian, so
    # the theoretical epoch rate applies exactly.
    eta, m = 1e-3, 10000
    centers = Prng(seed + 2).normal((50, 2))
    iso = IsotropicQuadraticObjective(centers)
    w_star_iso, f_star_iso = iso.minimizer()
    w0 = w_star_iso + np.array([1.0, -1.0])
    gap0 = iso.value(w0) - f_star_iso
    report = convergence_rate(2, 1, SpectrumBounds(1.0, 1.0), eta, m)
    ratios = []
    for s in range(args.contraction_seeds):
        cfg = SlbfgsConfig(eta=eta, m=m, M=1, L=10, b=5, b_H=10, epochs=1,
                           seed=seed + 100 + s, iterate_choice="random")
        w1, _traj, _c = slbfgs_run(iso, cfg, w0)
        ratios.append((iso.value(w1) - f_star_iso) / gap0)
    mean_ratio = float(np.mean(ratios))
    tol = report.alpha + 0.05
    ok = mean_ratio <= tol
    if not ok:
        print(f"FAIL contraction seed={seed}: mean_ratio={mean_ratio:.6g} "
              f"> alpha+0.05={tol:.6g}")
    print(f"contraction: seeds={args.contraction_seeds} "
          f"alpha={report.alpha:.4f} mean_ratio={mean_ratio:.3g} "
          f"{'ok' if ok else 'FAIL'}")
    failed = failed or not ok

    print(f"verify: {'FAIL' if failed else 'PASS'}")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_reference(args) -> int:
    _merge_config(args)
    if not (args.tol > 0 and math.isfinite(args.tol)):
        raise CliError(f"tol must be positive and finite, got {args.tol}")
    args.reference = None
    args.reference_policy = "none"
    obj, _ = _build_problem(args)
    try:
        ref = compute_reference(obj, tol=args.tol)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.out:
        save_reference(args.out, ref)
        print(f"wrote {args.out}")
    print(f"method={ref.method} f_star={ref.f_star!r} "
          f"grad_norm={ref.grad_norm:.3g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("slbfgs: error: a command is required\n")
        return EXIT_USAGE
    handler = {
        "run": _cmd_run,
        "grid": _cmd_grid,
        "verify": _cmd_verify,
        "reference": _cmd_reference,
    }[args.command]
    try:
        return handler(args)
    except CliError as exc:
        sys.stderr.write(f"slbfgs: error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        sys.stderr.write(f"slbfgs: error: file not found: {name}\n")
        return EXIT_USAGE
    except ReferenceConvergenceError as exc:
        sys.stderr.write(f"slbfgs: error: {exc}\n")
        return EXIT_VERIFY
    except ValueError as exc:
        sys.stderr.write(f"slbfgs: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
