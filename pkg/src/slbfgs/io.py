"""Data loading, synthetic problems, reference optima, and CSV output.

Text formats:

* Sparse classification/regression rows: ``<label> <idx>:<value> ...``
  with 1-based, strictly increasing feature indices and ``#`` comments.
* Matrix-completion observations: ``<row> <col> <rating>`` triples,
  0-based indices, whitespace separated.
* Trajectories: CSV with header ``algo,seed,eta,epoch,passes,fx,subopt,
  wall_secs``, one sample per line, floats rendered with their shortest
  round-trip representation so rewriting a parse is byte-identical.  The
  wall_secs column is populated only on request (timing breaks
  bit-reproducibility of artifacts); a diverged run is terminated by a
  sentinel row with fx=inf.

Reference optima: ridge problems are solved directly from the normal
equations (with iterative refinement until the gradient norm meets tol);
other convex objectives get a long deterministic quasi-Newton run plus a
Newton polish; factored matrix completion is refused (nonconvex, no
certified optimum).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import Dataset, Prng, SparseRow, as_vector
from .objectives import (
    MatrixCompletionObjective,
    Objective,
    RidgeObjective,
)
from .optimizers import Trajectory

__all__ = [
    "ParseError",
    "ReferenceConvergenceError",
    "parse_libsvm",
    "write_libsvm",
    "parse_triples",
    "SyntheticRidge",
    "gen_synthetic_ridge",
    "ReferenceSolution",
    "compute_reference",
    "save_reference",
    "load_reference",
    "RunRecord",
    "write_trajectory",
    "read_trajectory",
]

TRAJECTORY_HEADER = "algo,seed,eta,epoch,passes,fx,subopt,wall_secs"


class ParseError(ValueError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ReferenceConvergenceError(RuntimeError):
    """The reference solver could not reach the requested gradient norm.

    ``best`` holds the best solution found.
    """

    def __init__(self, message, best: "ReferenceSolution"):
        super().__init__(message)
        self.best = best


def _iter_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return line.strip()


def parse_libsvm(source, d: int | None = None) -> Dataset:
    """Parse sparse ``<label> <idx>:<value>`` rows into a sparse Dataset.

    Feature indices are 1-based in the text and strictly increasing within
    a row; the dimension is the largest index seen unless ``d`` overrides
    it.  Raises ParseError (with line number) on malformed tokens,
    non-increasing indices, or an input with no data rows.
    """
    labels: list[float] = []
    rows: list[SparseRow] = []
    max_idx = 0
    line_no = 0
    for raw in _iter_lines(source):
        line_no += 1
        line = _strip_comment(raw)
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(line_no, f"bad label {tokens[0]!r}") from None
        if not math.isfinite(label):
            raise ParseError(line_no, f"non-finite label {tokens[0]!r}")
        idx: list[int] = []
        val: list[float] = []
        prev = 0
        for tok in tokens[1:]:
            part = tok.split(":")
            if len(part) != 2:
                raise ParseError(line_no, f"expected idx:value, got {tok!r}")
            try:
                i = int(part[0])
            except ValueError:
                raise ParseError(line_no, f"bad feature index {part[0]!r}") from None
            try:
                x = float(part[1])
            except ValueError:
                raise ParseError(line_no, f"bad feature value {part[1]!r}") from None
            if i < 1:
                raise ParseError(line_no, f"feature index {i} must be >= 1")
            if i <= prev:
                raise ParseError(
                    line_no, f"feature index {i} not strictly increasing")
            if not math.isfinite(x):
                raise ParseError(line_no, f"non-finite feature value {part[1]!r}")
            prev = i
            idx.append(i - 1)
            val.append(x)
        labels.append(label)
        rows.append(SparseRow(np.array(idx, dtype=np.int64), np.array(val)))
        if idx:
            max_idx = max(max_idx, idx[-1] + 1)
    if not rows:
        raise ParseError(max(line_no, 1), "no data rows found")
    if d is None:
        d = max_idx
    elif d < max_idx:
        raise ValueError(f"d={d} smaller than largest feature index {max_idx}")
    if d < 1:
        raise ParseError(line_no, "cannot infer a positive dimension")
    return Dataset.from_sparse_rows(rows, np.array(labels), d=d)


def write_libsvm(dataset: Dataset, dest) -> None:
    """Write a dataset in the sparse text format (1-based indices).

    Stored entries are written as stored; parsing the output of a sparse
    dataset with no trailing all-zero columns reproduces it exactly.
    """
    close = False
    if isinstance(dest, (str, Path)):
        fh = open(dest, "w", encoding="utf-8", newline="\n")
        close = True
    else:
        fh = dest
    try:
        for i in range(dataset.n):
            row = dataset.row(i)
            if isinstance(row, SparseRow):
                pairs = zip(row.indices, row.values)
            else:
                nz = np.nonzero(row)[0]
                pairs = zip(nz, row[nz])
            parts = [repr(float(dataset.labels[i]))]
            parts.extend(f"{int(j) + 1}:{repr(float(v))}" for j, v in pairs)
            fh.write(" ".join(parts) + "\n")
    finally:
        if close:
            fh.close()


def parse_triples(source, nrows: int | None = None, ncols: int | None = None,
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    """Parse 0-based ``row col rating`` observation triples.

    Returns (obs_i, obs_j, ratings, nrows, ncols); dimensions are inferred
    from the largest indices unless given.
    """
    oi: list[int] = []
    oj: list[int] = []
    rr: list[float] = []
    line_no = 0
    for raw in _iter_lines(source):
        line_no += 1
        line = _strip_comment(raw)
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ParseError(line_no, f"expected 'row col rating', got {line!r}")
        try:
            i = int(tokens[0])
            j = int(tokens[1])
        except ValueError:
            raise ParseError(line_no, f"bad index in {line!r}") from None
        try:
            r = float(tokens[2])
        except ValueError:
            raise ParseError(line_no, f"bad rating {tokens[2]!r}") from None
        if i < 0 or j < 0:
            raise ParseError(line_no, "indices must be >= 0")
        if not math.isfinite(r):
            raise ParseError(line_no, f"non-finite rating {tokens[2]!r}")
        oi.append(i)
        oj.append(j)
        rr.append(r)
    if not rr:
        raise ParseError(max(line_no, 1), "no observations found")
    obs_i = np.array(oi, dtype=np.int64)
    obs_j = np.array(oj, dtype=np.int64)
    ratings = np.array(rr)
    if nrows is None:
        nrows = int(obs_i.max()) + 1
    if ncols is None:
        ncols = int(obs_j.max()) + 1
    if obs_i.max() >= nrows or obs_j.max() >= ncols:
        raise ValueError("observation index outside the given shape")
    return obs_i, obs_j, ratings, nrows, ncols


@dataclass(frozen=True)
class ReferenceSolution:
    """Certified optimum: w*, f* = f(w*), solve method, achieved ||grad||."""

    w_star: np.ndarray
    f_star: float
    method: str
    grad_norm: float


@dataclass(frozen=True)
class SyntheticRidge:
    """Generated ridge problem with its exact solution attached."""

    dataset: Dataset
    w_true: np.ndarray
    reference: ReferenceSolution


def gen_synthetic_ridge(n: int, d: int, cond: float, noise: float, seed: int,
                        reg: float = 0.0) -> SyntheticRidge:
    """Dense regression design with an exact singular-value ratio of cond.

    The design is U diag(sigma) V^T with orthonormal factors drawn from
    the seed and a geometric singular-value ladder scaled so the largest
    data Hessian eigenvalue is 1.  Labels are X w_true plus Gaussian noise
    of the given scale.  Requires n >= d (cond control is infeasible in
    the flat case) and cond >= 1.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if n < d:
        raise ValueError(
            f"need n >= d for a full-rank design with controlled "
            f"conditioning, got n={n} d={d}")
    if not (math.isfinite(cond) and cond >= 1.0):
        raise ValueError(f"cond must be >= 1, got {cond}")
    if not (math.isfinite(noise) and noise >= 0.0):
        raise ValueError(f"noise must be >= 0, got {noise}")
    prng = Prng(seed)
    G = prng.normal((n, d))
    U, _ = np.linalg.qr(G)
    V, _ = np.linalg.qr(prng.normal((d, d)))
    top = math.sqrt(n)
    sigma = np.geomspace(top, top / cond, d) if d > 1 else np.array([top])
    X = (U * sigma) @ V.T
    w_true = prng.normal(d) / math.sqrt(d)
    y = X @ w_true
    if noise > 0:
        y = y + noise * prng.normal(n)
    dataset = Dataset.from_dense(X, y)
    obj = RidgeObjective(dataset, reg)
    reference = _solve_ridge_direct(obj)
    return SyntheticRidge(dataset=dataset, w_true=w_true, reference=reference)


def _solve_ridge_direct(obj: RidgeObjective, tol: float = 1e-10,
                        ) -> ReferenceSolution:
    ds = obj.dataset.to_dense()
    X = ds.X
    n = obj.count
    A = X.T @ X / n
    A[np.diag_indices_from(A)] += obj.reg
    rhs = X.T @ ds.labels / n
    w = np.linalg.solve(A, rhs)
    grad_norm = float(np.linalg.norm(obj.grad(obj.all_indices, w)))
    for _ in range(8):
        if grad_norm <= tol:
            break
        w = w - np.linalg.solve(A, A @ w - rhs)
        grad_norm = float(np.linalg.norm(obj.grad(obj.all_indices, w)))
    sol = ReferenceSolution(w_star=w, f_star=obj.value(w),
                            method="direct_solve", grad_norm=grad_norm)
    if grad_norm > tol:
        raise ReferenceConvergenceError(
            f"direct solve stalled at ||grad|| = {grad_norm:.3g} > {tol:.3g} "
            "(ill-conditioned normal equations)", best=sol)
    return sol


def _long_run_reference(obj: Objective, tol: float) -> ReferenceSolution:
    from scipy.optimize import minimize

    idx = obj.all_indices

    def fun(w):
        return obj.value(w), obj.grad(idx, w)

    res = minimize(fun, np.zeros(obj.dim), jac=True, method="L-BFGS-B",
                   options={"maxiter": 20000, "maxcor": 20,
                            "ftol": 1e-18, "gtol": min(tol, 1e-12)})
    w = np.asarray(res.x, dtype=np.float64)
    grad_norm = float(np.linalg.norm(obj.grad(idx, w)))
    # Newton polish: the quasi-Newton stage gets within line-search
    # precision; a few damped Newton steps close the rest of the gap.
    if grad_norm > tol and obj.dim <= 400:
        fw = obj.value(w)
        for _ in range(60):
            if grad_norm <= tol:
                break
            g = obj.grad(idx, w)
            H = obj.dense_hessian(w)
            try:
                p = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                H = H + 1e-12 * np.eye(obj.dim)
                p = np.linalg.solve(H, -g)
            step = 1.0
            for _bt in range(40):
                w_new = w + step * p
                f_new = obj.value(w_new)
                if f_new <= fw + 1e-4 * step * float(np.dot(g, p)):
                    break
                step *= 0.5
            else:
                break
            w, fw = w_new, f_new
            grad_norm = float(np.linalg.norm(obj.grad(idx, w)))
    sol = ReferenceSolution(w_star=w, f_star=obj.value(w), method="long_run",
                            grad_norm=grad_norm)
    if grad_norm > tol:
        raise ReferenceConvergenceError(
            f"long run stalled at ||grad|| = {grad_norm:.3g} > {tol:.3g}",
            best=sol)
    return sol


def compute_reference(obj: Objective, tol: float = 1e-10) -> ReferenceSolution:
    """Certified minimizer of a convex objective.

    Ridge uses the exact normal-equations solve; other convex objectives
    get the long deterministic quasi-Newton run.  Factored matrix
    completion is refused: the problem is nonconvex and no certified
    optimum exists.
    """
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"tol must be positive and finite, got {tol}")
    if isinstance(obj, MatrixCompletionObjective):
        raise ValueError(
            "matrix completion is nonconvex; no certified reference optimum. "
            "Report raw objective values instead.")
    if isinstance(obj, RidgeObjective):
        return _solve_ridge_direct(obj, tol)
    return _long_run_reference(obj, tol)


def save_reference(path, ref: ReferenceSolution) -> None:
    payload = {
        "w_star": [float(v) for v in ref.w_star],
        "f_star": float(ref.f_star),
        "method": ref.method,
        "grad_norm": float(ref.grad_norm),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_reference(path) -> ReferenceSolution:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return ReferenceSolution(
        w_star=as_vector(payload["w_star"], name="w_star"),
        f_star=float(payload["f_star"]),
        method=str(payload["method"]),
        grad_norm=float(payload["grad_norm"]),
    )


@dataclass(frozen=True)
class RunRecord:
    """One optimizer run labeled for serialization."""

    algo: str
    seed: int
    eta: float
    trajectory: Trajectory
    diverged: bool = False


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def write_trajectory(dest, runs: Iterable[RunRecord], timing: bool = False,
                     ) -> None:
    """Serialize runs to trajectory CSV (LF endings, round-trip floats).

    A diverged run gains one sentinel row (fx = inf) after its last finite
    sample.  wall_secs stays empty unless ``timing`` is set, keeping the
    default artifact a pure function of (config, seed).
    """
    close = False
    if isinstance(dest, (str, Path)):
        fh = open(dest, "w", encoding="utf-8", newline="\n")
        close = True
    else:
        fh = dest
    try:
        fh.write(TRAJECTORY_HEADER + "\n")
        for run in runs:
            prefix = f"{run.algo},{int(run.seed)},{_fmt(run.eta)}"
            last_epoch = -1
            last_passes = 0.0
            for p in run.trajectory:
                wall = _fmt(p.wall_secs) if timing else ""
                fh.write(f"{prefix},{int(p.epoch)},{_fmt(p.passes)},"
                         f"{_fmt(p.fx)},{_fmt(p.subopt)},{wall}\n")
                last_epoch = p.epoch
                last_passes = p.passes
            if run.diverged:
                sub = _fmt(math.inf) if any(
                    p.subopt is not None for p in run.trajectory) else ""
                fh.write(f"{prefix},{last_epoch + 1},{_fmt(last_passes)},"
                         f"{_fmt(math.inf)},{sub},\n")
    finally:
        if close:
            fh.close()


def read_trajectory(source) -> list[dict]:
    """Parse trajectory CSV back into row dicts with native types."""
    rows: list[dict] = []
    line_no = 0
    saw_header = False
    for raw in _iter_lines(source):
        line_no += 1
        line = raw.rstrip("\n")
        if not line:
            continue
        if not saw_header:
            if line != TRAJECTORY_HEADER:
                raise ParseError(line_no, f"bad header {line!r}")
            saw_header = True
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise ParseError(line_no, f"expected 8 fields, got {len(parts)}")
        try:
            rows.append({
                "algo": parts[0],
                "seed": int(parts[1]),
                "eta": float(parts[2]),
                "epoch": int(parts[3]),
                "passes": float(parts[4]),
                "fx": float(parts[5]),
                "subopt": None if parts[6] == "" else float(parts[6]),
                "wall_secs": None if parts[7] == "" else float(parts[7]),
            })
        except ValueError:
            raise ParseError(line_no, f"bad numeric field in {line!r}") from None
    if not saw_header:
        raise ParseError(max(line_no, 1), "empty trajectory file")
    return rows
