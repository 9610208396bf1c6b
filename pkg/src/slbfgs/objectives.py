"""Finite-sum objectives: f(w) = (1/N) * sum_i f_i(w).

Each objective exposes the same surface: full-set ``value``, subset
``grad``, and subset Hessian-vector product ``hvp``.  Subset operations
consume an index set, accumulate per-component terms in ascending index
order (so a subset result decomposes exactly into its singleton parts),
and charge component counts to an optional :class:`EvalCounters`.

Component losses:

* ridge:          f_i(w) = 0.5*(x_i.w - y_i)^2 + 0.5*reg*||w||^2
* squared hinge:  f_i(w) = max(0, 1 - y_i*(x_i.w))^2 + 0.5*reg*||w||^2,
  labels in {-1, +1}; the per-example Hessian at margin == 1 is defined
  as the zero matrix (the limit from the inactive side).
* matrix completion (factored, nonconvex): observation (i, j, r)
  contributes ((L_i . R_j) - r)^2 + 0.5*reg*(||L_i||^2 + ||R_j||^2),
  where w packs the row factors then the column factors.
* isotropic quadratic: f_i(w) = 0.5*||w - c_i||^2; every subsampled
  Hessian is exactly the identity, which makes it the reference problem
  for curvature-sensitive checks.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from . import _kernels as K
from .core import Dataset, EvalCounters, as_index_set, as_vector

__all__ = [
    "Objective",
    "RidgeObjective",
    "SquaredHingeSvmObjective",
    "MatrixCompletionObjective",
    "IsotropicQuadraticObjective",
]


class Objective(ABC):
    """Average-of-components objective over a fixed dataset.

    Immutable once constructed; all methods are pure functions of their
    arguments plus the frozen data.
    """

    _dim: int
    _count: int

    @property
    def dim(self) -> int:
        """Length of the parameter vector."""
        return self._dim

    @property
    def count(self) -> int:
        """Number of components N in the finite sum."""
        return self._count

    @property
    def all_indices(self) -> np.ndarray:
        """The full index set 0..N-1 (cached, do not mutate)."""
        return self._all_indices

    def _finish_init(self, dim: int, count: int) -> None:
        self._dim = int(dim)
        self._count = int(count)
        if self._dim < 1:
            raise ValueError("objective dimension must be >= 1")
        if self._count < 1:
            raise ValueError("objective must have at least one component")
        self._all_indices = np.arange(self._count, dtype=np.int64)
        self._all_indices.setflags(write=False)

    def value(self, w) -> float:
        """Exact average of component losses at w.  Not charged."""
        w = as_vector(w, self._dim, "w")
        return float(self._value_impl(w))

    def grad(self, idx, w, counters: EvalCounters | None = None) -> np.ndarray:
        """Average gradient over the index set; charges |S| gradient components."""
        idx = as_index_set(idx, self._count)
        w = as_vector(w, self._dim, "w")
        if counters is not None:
            counters.charge_grad(idx.shape[0])
        return self._grad_impl(idx, w)

    def hvp(self, idx, w, v, counters: EvalCounters | None = None) -> np.ndarray:
        """Average Hessian-vector product over the index set; charges |T| HVP components."""
        idx = as_index_set(idx, self._count)
        w = as_vector(w, self._dim, "w")
        v = as_vector(v, self._dim, "v")
        if counters is not None:
            counters.charge_hvp(idx.shape[0])
        return self._hvp_impl(idx, w, v)

    @abstractmethod
    def _value_impl(self, w) -> float: ...

    @abstractmethod
    def _grad_impl(self, idx, w) -> np.ndarray: ...

    @abstractmethod
    def _hvp_impl(self, idx, w, v) -> np.ndarray: ...

    def dense_hessian(self, w) -> np.ndarray:
        """Full-set Hessian as a dense (dim, dim) matrix.  Diagnostic path."""
        raise NotImplementedError

    def component_curvature_max(self) -> float:
        """Upper bound on the largest eigenvalue of any subsampled Hessian.

        The max over singleton subsets, which dominates every subset
        average by convexity of the largest-eigenvalue function.
        """
        raise NotImplementedError


class _LinearModelObjective(Objective):
    """Shared plumbing for the two generalized linear losses."""

    def __init__(self, dataset: Dataset, reg: float):
        if not isinstance(dataset, Dataset):
            raise ValueError("dataset must be a core.Dataset")
        reg = float(reg)
        if not np.isfinite(reg) or reg < 0.0:
            raise ValueError(f"regularization weight must be >= 0, got {reg}")
        self.dataset = dataset
        self.reg = reg
        self._finish_init(dataset.d, dataset.n)

    @property
    def sparse(self) -> bool:
        return self.dataset.is_sparse


class RidgeObjective(_LinearModelObjective):
    """Regularized least squares."""

    def _value_impl(self, w):
        ds = self.dataset
        if ds.is_sparse:
            return K.ridge_value_csr(
                ds.data, ds.col_indices, ds.indptr, ds.labels, w, self.reg,
                self._all_indices,
            )
        return K.ridge_value_dense(ds.X, ds.labels, w, self.reg, self._all_indices)

    def _grad_impl(self, idx, w):
        ds = self.dataset
        if ds.is_sparse:
            return K.ridge_grad_csr(
                ds.data, ds.col_indices, ds.indptr, ds.labels, w, self.reg, idx
            )
        return K.ridge_grad_dense(ds.X, ds.labels, w, self.reg, idx)

    def _hvp_impl(self, idx, w, v):
        ds = self.dataset
        if ds.is_sparse:
            return K.ridge_hvp_csr(
                ds.data, ds.col_indices, ds.indptr, self.reg, idx, v
            )
        return K.ridge_hvp_dense(ds.X, self.reg, idx, v)

    def dense_hessian(self, w=None) -> np.ndarray:
        X = self.dataset.to_dense().X
        H = X.T @ X / self.count
        H[np.diag_indices_from(H)] += self.reg
        return H

    def component_curvature_max(self) -> float:
        return float(self.dataset.row_norms_sq().max()) + self.reg


class SquaredHingeSvmObjective(_LinearModelObjective):
    """Binary SVM with the smooth squared-hinge loss."""

    def __init__(self, dataset: Dataset, reg: float):
        super().__init__(dataset, reg)
        y = dataset.labels
        if not np.all((y == 1.0) | (y == -1.0)):
            bad = y[(y != 1.0) & (y != -1.0)][0]
            raise ValueError(f"labels must be +1 or -1, found {bad}")

    def _value_impl(self, w):
        ds = self.dataset
        if ds.is_sparse:
            return K.hinge2_value_csr(
                ds.data, ds.col_indices, ds.indptr, ds.labels, w, self.reg,
                self._all_indices,
            )
        return K.hinge2_value_dense(ds.X, ds.labels, w, self.reg, self._all_indices)

    def _grad_impl(self, idx, w):
        ds = self.dataset
        if ds.is_sparse:
            return K.hinge2_grad_csr(
                ds.data, ds.col_indices, ds.indptr, ds.labels, w, self.reg, idx
            )
        return K.hinge2_grad_dense(ds.X, ds.labels, w, self.reg, idx)

    def _hvp_impl(self, idx, w, v):
        ds = self.dataset
        if ds.is_sparse:
            return K.hinge2_hvp_csr(
                ds.data, ds.col_indices, ds.indptr, ds.labels, w, self.reg, idx, v
            )
        return K.hinge2_hvp_dense(ds.X, ds.labels, w, self.reg, idx, v)

    def dense_hessian(self, w) -> np.ndarray:
        w = as_vector(w, self.dim, "w")
        X = self.dataset.to_dense().X
        margins = self.dataset.labels * (X @ w)
        active = X[margins < 1.0]
        H = 2.0 * active.T @ active / self.count
        H[np.diag_indices_from(H)] += self.reg
        return H

    def component_curvature_max(self) -> float:
        return 2.0 * float(self.dataset.row_norms_sq().max()) + self.reg


class MatrixCompletionObjective(Objective):
    """Rank-k factored matrix completion on observed entries (nonconvex)."""

    def __init__(self, obs_i, obs_j, ratings, nrows: int, ncols: int,
                 rank: int, reg: float):
        self.obs_i = np.ascontiguousarray(obs_i, dtype=np.int64)
        self.obs_j = np.ascontiguousarray(obs_j, dtype=np.int64)
        self.ratings = as_vector(ratings, name="ratings")
        n_obs = self.ratings.shape[0]
        if self.obs_i.shape != (n_obs,) or self.obs_j.shape != (n_obs,):
            raise ValueError("obs_i, obs_j, ratings must be parallel 1-D arrays")
        if nrows < 1 or ncols < 1 or rank < 1:
            raise ValueError("nrows, ncols, rank must all be >= 1")
        if n_obs and (self.obs_i.min() < 0 or self.obs_i.max() >= nrows):
            raise ValueError(f"row index outside [0, {nrows})")
        if n_obs and (self.obs_j.min() < 0 or self.obs_j.max() >= ncols):
            raise ValueError(f"column index outside [0, {ncols})")
        reg = float(reg)
        if not np.isfinite(reg) or reg < 0.0:
            raise ValueError(f"regularization weight must be >= 0, got {reg}")
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.rank = int(rank)
        self.reg = reg
        self._finish_init((nrows + ncols) * rank, n_obs)

    def _value_impl(self, w):
        return K.mc_value(self.obs_i, self.obs_j, self.ratings, self.nrows,
                          self.rank, w, self.reg, self._all_indices)

    def _grad_impl(self, idx, w):
        return K.mc_grad(self.obs_i, self.obs_j, self.ratings, self.nrows,
                         self.rank, w, self.reg, idx)

    def _hvp_impl(self, idx, w, v):
        return K.mc_hvp(self.obs_i, self.obs_j, self.ratings, self.nrows,
                        self.rank, w, self.reg, idx, v)

    def dense_hessian(self, w) -> np.ndarray:
        if self.dim > 400:
            from .core import ResourceLimitError

            raise ResourceLimitError(
                f"dense Hessian gated at dim <= 400, got {self.dim}"
            )
        w = as_vector(w, self.dim, "w")
        H = np.zeros((self.dim, self.dim))
        e = np.zeros(self.dim)
        for j in range(self.dim):
            e[j] = 1.0
            H[:, j] = self._hvp_impl(self._all_indices, w, e)
            e[j] = 0.0
        return H

    def unpack(self, w) -> tuple[np.ndarray, np.ndarray]:
        """Split w into the (nrows, k) and (ncols, k) factor matrices."""
        w = as_vector(w, self.dim, "w")
        split = self.nrows * self.rank
        L = w[:split].reshape(self.nrows, self.rank)
        R = w[split:].reshape(self.ncols, self.rank)
        return L, R


class IsotropicQuadraticObjective(Objective):
    """Components 0.5*||w - c_i||^2: all subsampled Hessians are exactly I.

    Strong convexity and smoothness constants both equal 1 with no
    measurement error, which is what the rate-certification checks need.
    The minimizer is the centroid of the centers.
    """

    def __init__(self, centers):
        C = np.ascontiguousarray(centers, dtype=np.float64)
        if C.ndim != 2:
            raise ValueError(f"centers must be (N, d), got shape {C.shape}")
        if not np.isfinite(C).all():
            raise ValueError("centers contain non-finite entries")
        self.centers = C
        self._finish_init(C.shape[1], C.shape[0])

    def _value_impl(self, w):
        acc = 0.0
        for i in range(self._count):
            diff = w - self.centers[i]
            acc += 0.5 * float(np.dot(diff, diff))
        return acc / self._count

    def _grad_impl(self, idx, w):
        g = np.zeros(self._dim)
        for i in idx:
            g += w - self.centers[i]
        return g / idx.shape[0]

    def _hvp_impl(self, idx, w, v):
        out = np.zeros(self._dim)
        for _ in idx:
            out += v
        return out / idx.shape[0]

    def dense_hessian(self, w=None) -> np.ndarray:
        return np.eye(self._dim)

    def component_curvature_max(self) -> float:
        return 1.0

    def minimizer(self) -> tuple[np.ndarray, float]:
        """Exact (w*, f*) for this objective."""
        w_star = self.centers.mean(axis=0)
        return w_star, self.value(w_star)
