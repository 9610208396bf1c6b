"""Shared primitives: array validation, datasets, evaluation counters, RNG.

Everything downstream (objectives, optimizers, IO) builds on the types in
this module.  Two conventions are load-bearing for reproducibility:

* All vectors are C-contiguous float64 arrays and index sets are sorted
  int64 arrays; the validators here coerce and check once at the public
  boundary so inner loops can assume clean inputs.
* Randomness flows through :class:`Prng`, a thin wrapper around a
  counter-based Philox generator.  Equal seed plus equal call sequence
  gives bitwise-equal outputs, and ``spawn`` derives independent child
  streams deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = [
    "ResourceLimitError",
    "as_vector",
    "as_index_set",
    "SparseRow",
    "Dataset",
    "EvalCounters",
    "Prng",
    "sample_minibatch",
    "passes",
]


class ResourceLimitError(RuntimeError):
    """An operation was refused because it would exceed a size gate."""


def as_vector(x, d: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce ``x`` to a finite, C-contiguous float64 vector.

    Raises ValueError on wrong dimensionality, wrong length (when ``d`` is
    given), or non-finite entries.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise ValueError(f"{name} must have length {d}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_index_set(idx, n: int, name: str = "S") -> np.ndarray:
    """Canonicalize an index set: sorted int64, distinct, within [0, n).

    The ascending order is not cosmetic: component sums are accumulated in
    this order, which pins the floating-point result bit-for-bit.
    """
    arr = np.ascontiguousarray(idx, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        arr = np.sort(arr)
        if np.any(np.diff(arr) == 0):
            raise ValueError(f"{name} contains duplicate indices")
    if arr[0] < 0 or arr[-1] >= n:
        raise ValueError(f"{name} has indices outside [0, {n})")
    return arr


@dataclass(frozen=True)
class SparseRow:
    """One sparse feature row: strictly increasing indices, parallel values."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        val = np.ascontiguousarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape[0] != val.shape[0]:
            raise ValueError("indices and values must be parallel 1-D arrays")
        if idx.size and idx[0] < 0:
            raise ValueError("negative feature index")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if not np.isfinite(val).all():
            raise ValueError("non-finite feature value")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def nnz(self) -> int:
        return int(self.indices.shape[0])

    def to_dense(self, d: int) -> np.ndarray:
        if self.nnz and self.indices[-1] >= d:
            raise ValueError(f"row has index {self.indices[-1]} >= d={d}")
        out = np.zeros(d)
        out[self.indices] = self.values
        return out


class Dataset:
    """N labeled feature rows, stored either dense (N, d) or CSR.

    One representation per dataset; mixing is not allowed.  Construction
    validates shapes, finiteness, and (for CSR) strictly increasing column
    indices within each row.
    """

    def __init__(self, labels, *, dense=None, csr=None):
        self.labels = as_vector(labels, name="labels")
        n = self.labels.shape[0]
        if (dense is None) == (csr is None):
            raise ValueError("exactly one of dense or csr must be given")
        if dense is not None:
            X = np.ascontiguousarray(dense, dtype=np.float64)
            if X.ndim != 2:
                raise ValueError(f"dense design must be 2-D, got {X.shape}")
            if X.shape[0] != n:
                raise ValueError(f"{n} labels but {X.shape[0]} rows")
            if not np.isfinite(X).all():
                raise ValueError("dense design contains non-finite entries")
            self.X = X
            self.indptr = self.col_indices = self.data = None
            self._d = X.shape[1]
        else:
            data, col_indices, indptr, d = csr
            self.data = np.ascontiguousarray(data, dtype=np.float64)
            self.col_indices = np.ascontiguousarray(col_indices, dtype=np.int64)
            self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
            self.X = None
            if self.indptr.ndim != 1 or self.indptr.shape[0] != n + 1:
                raise ValueError("indptr must have length N+1")
            if self.indptr[0] != 0 or self.indptr[-1] != self.data.shape[0]:
                raise ValueError("indptr does not span the data array")
            if np.any(np.diff(self.indptr) < 0):
                raise ValueError("indptr must be nondecreasing")
            if self.data.shape != self.col_indices.shape:
                raise ValueError("data and col_indices must be parallel")
            if not np.isfinite(self.data).all():
                raise ValueError("sparse data contains non-finite entries")
            if self.col_indices.size:
                if self.col_indices.min() < 0 or self.col_indices.max() >= d:
                    raise ValueError(f"column index outside [0, {d})")
                for i in range(n):
                    lo, hi = self.indptr[i], self.indptr[i + 1]
                    seg = self.col_indices[lo:hi]
                    if seg.size > 1 and np.any(np.diff(seg) <= 0):
                        raise ValueError(
                            f"row {i}: column indices not strictly increasing"
                        )
            self._d = int(d)

    @classmethod
    def from_dense(cls, X, labels) -> "Dataset":
        return cls(labels, dense=X)

    @classmethod
    def from_sparse_rows(
        cls, rows: Sequence[SparseRow], labels, d: int | None = None
    ) -> "Dataset":
        rows = [r if isinstance(r, SparseRow) else SparseRow(*r) for r in rows]
        if d is None:
            d = 0
            for r in rows:
                if r.nnz:
                    d = max(d, int(r.indices[-1]) + 1)
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        for i, r in enumerate(rows):
            indptr[i + 1] = indptr[i] + r.nnz
        data = np.concatenate([r.values for r in rows]) if rows else np.zeros(0)
        cols = (
            np.concatenate([r.indices for r in rows])
            if rows
            else np.zeros(0, dtype=np.int64)
        )
        return cls(labels, csr=(data, cols, indptr, d))

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def d(self) -> int:
        return self._d

    @property
    def is_sparse(self) -> bool:
        return self.X is None

    def row(self, i: int) -> Union[np.ndarray, SparseRow]:
        if not 0 <= i < self.n:
            raise ValueError(f"row index {i} outside [0, {self.n})")
        if self.X is not None:
            return self.X[i]
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return SparseRow(self.col_indices[lo:hi], self.data[lo:hi])

    def to_dense(self) -> "Dataset":
        if not self.is_sparse:
            return self
        X = np.zeros((self.n, self.d))
        for i in range(self.n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            X[i, self.col_indices[lo:hi]] = self.data[lo:hi]
        return Dataset(self.labels, dense=X)

    def row_norms_sq(self) -> np.ndarray:
        """Squared Euclidean norm of every feature row."""
        if self.X is not None:
            return np.einsum("ij,ij->i", self.X, self.X)
        out = np.zeros(self.n)
        for i in range(self.n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            seg = self.data[lo:hi]
            out[i] = float(np.dot(seg, seg))
        return out


@dataclass
class EvalCounters:
    """Tally of component-level gradient and Hessian-vector work.

    A full-set gradient charges N components, a minibatch gradient |S|, a
    variance-reduced gradient 2|S|, a subsampled Hessian-vector product
    |T|.  Counts only increase.
    """

    grad_components: int = 0
    hvp_components: int = 0

    def charge_grad(self, k: int) -> None:
        if k < 0:
            raise ValueError("cannot charge a negative count")
        self.grad_components += int(k)

    def charge_hvp(self, k: int) -> None:
        if k < 0:
            raise ValueError("cannot charge a negative count")
        self.hvp_components += int(k)

    def copy(self) -> "EvalCounters":
        return EvalCounters(self.grad_components, self.hvp_components)


def passes(counters: EvalCounters, n: int) -> float:
    """Effective full passes through an n-example dataset."""
    if n < 1:
        raise ValueError(f"dataset size must be >= 1, got {n}")
    return (counters.grad_components + counters.hvp_components) / n


class Prng:
    """Deterministic counter-based random stream (Philox under the hood).

    ``Prng(seed)`` always yields the same stream; ``spawn(k)`` derives k
    independent child streams, deterministic in (seed, spawn call order).
    """

    def __init__(self, seed: int | None = None, _ss: SeedSequence | None = None):
        if _ss is not None:
            self._ss = _ss
        else:
            if seed is None or int(seed) != seed or seed < 0:
                raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
            self._ss = SeedSequence(int(seed))
        self.seed = seed
        self._gen = Generator(Philox(self._ss))

    def spawn(self, k: int) -> list["Prng"]:
        if k < 1:
            raise ValueError("spawn count must be >= 1")
        return [Prng(_ss=child) for child in self._ss.spawn(k)]

    def integers(self, low: int, high: int) -> int:
        """One uniform integer from [low, high)."""
        if high <= low:
            raise ValueError(f"empty integer range [{low}, {high})")
        return int(self._gen.integers(low, high))

    def normal(self, size) -> np.ndarray:
        return self._gen.normal(size=size)

    def uniform(self, size) -> np.ndarray:
        return self._gen.uniform(size=size)

    def indices(self, n: int, b: int) -> np.ndarray:
        """Sorted sample of b distinct indices from [0, n)."""
        if b < 1 or b > n:
            raise ValueError(f"minibatch size must satisfy 1 <= b <= {n}, got {b}")
        out = self._gen.choice(n, size=b, replace=False)
        out.sort()
        return np.ascontiguousarray(out, dtype=np.int64)


def sample_minibatch(prng: Prng, n: int, b: int) -> np.ndarray:
    """Uniform minibatch without replacement: b distinct indices, ascending."""
    return prng.indices(n, b)
