"""Limited-memory BFGS machinery: curvature-pair store and matrix-free apply.

:class:`LbfgsMemory` holds up to M recent (s, y) pairs.  ``push`` applies
the curvature filter (s.y must exceed 1e-8 * ||s|| * ||y||; rejected pairs
are skipped, never clamped), evicting the oldest pair when full.

``two_loop_apply`` computes H v in O(M d) without forming H.  The initial
diagonal scaling (s.y / ||y||^2 from the newest stored pair) is chosen at
application time, so a pair pushed between two applies changes the scaling
of both loops consistently.  Empty memory applies the identity.

``dense_h`` and ``dense_b`` build H and its inverse B explicitly from the
recursive rank-two update formulas.  They are deliberately independent of
the two-loop code path (plain NumPy matrix algebra) and exist as oracles:
tests hold ``two_loop_apply(v) == dense_h() @ v`` and
``dense_b() @ dense_h() == I`` to tight tolerance.  Both are gated at
d <= 2000 to keep the O(d^2) work desk-sized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import ResourceLimitError, as_vector

__all__ = ["CURVATURE_EPS", "CurvaturePair", "LbfgsMemory"]

CURVATURE_EPS = 1e-8
_DENSE_DIM_LIMIT = 2000


@dataclass(frozen=True)
class CurvaturePair:
    """One accepted pair: step s, curvature response y, rho = 1/(s.y)."""

    s: np.ndarray
    y: np.ndarray
    rho: float


class LbfgsMemory:
    """Ring buffer of curvature pairs, oldest first, capacity M >= 0."""

    def __init__(self, capacity: int, dim: int):
        if capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {capacity}")
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.capacity = int(capacity)
        self.dim = int(dim)
        cap = max(self.capacity, 1)
        self._s = np.zeros((cap, self.dim))
        self._y = np.zeros((cap, self.dim))
        self._rho = np.zeros(cap)
        self._sy = np.zeros(cap)
        self._yy = np.zeros(cap)
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def clear(self) -> None:
        self.count = 0

    def push(self, s, y) -> bool:
        """Offer a pair; returns True iff it passed the curvature filter.

        With capacity 0 the verdict is still computed but nothing is stored.
        """
        s = as_vector(s, self.dim, "s")
        y = as_vector(y, self.dim, "y")
        sy = float(np.dot(s, y))
        ns = float(np.linalg.norm(s))
        ny = float(np.linalg.norm(y))
        if not sy > CURVATURE_EPS * ns * ny:
            return False
        if self.capacity == 0:
            return True
        if self.count == self.capacity:
            self._s[:-1] = self._s[1:]
            self._y[:-1] = self._y[1:]
            self._rho[:-1] = self._rho[1:]
            self._sy[:-1] = self._sy[1:]
            self._yy[:-1] = self._yy[1:]
            self.count -= 1
        k = self.count
        self._s[k] = s
        self._y[k] = y
        self._sy[k] = sy
        self._yy[k] = float(np.dot(y, y))
        self._rho[k] = 1.0 / sy
        self.count += 1
        return True

    @property
    def pairs(self) -> list[CurvaturePair]:
        """Stored pairs, oldest to newest (copies)."""
        return [
            CurvaturePair(self._s[j].copy(), self._y[j].copy(), float(self._rho[j]))
            for j in range(self.count)
        ]

    def h0_scale(self) -> float:
        """Initial diagonal scaling: s.y/||y||^2 of the newest pair, else 1."""
        if self.count == 0:
            return 1.0
        k = self.count - 1
        return self._sy[k] / self._yy[k]

    def two_loop_apply(self, v) -> np.ndarray:
        """H v via the two-loop recursion; identity when empty."""
        v = as_vector(v, self.dim, "v")
        if self.count == 0:
            return v.copy()
        n = self.count
        return K.two_loop_apply(
            self._s[:n], self._y[:n], self._rho[:n], self.h0_scale(), v
        )

    def _check_dense_gate(self) -> None:
        if self.dim > _DENSE_DIM_LIMIT:
            raise ResourceLimitError(
                f"dense reconstruction gated at d <= {_DENSE_DIM_LIMIT}, "
                f"got d = {self.dim}"
            )

    def dense_h(self) -> np.ndarray:
        """Explicit H from the recursive rank-two update (oracle path)."""
        self._check_dense_gate()
        d = self.dim
        H = self.h0_scale() * np.eye(d)
        for j in range(self.count):
            s = self._s[j]
            y = self._y[j]
            rho = self._rho[j]
            V = np.eye(d) - rho * np.outer(y, s)
            H = V.T @ H @ V + rho * np.outer(s, s)
        return H

    def dense_b(self) -> np.ndarray:
        """Explicit B = H^{-1} from the complementary update (oracle path)."""
        self._check_dense_gate()
        d = self.dim
        if self.count == 0:
            return np.eye(d)
        k = self.count - 1
        B = (self._yy[k] / self._sy[k]) * np.eye(d)
        for j in range(self.count):
            s = self._s[j]
            y = self._y[j]
            Bs = B @ s
            B = B - np.outer(Bs, Bs) / float(np.dot(s, Bs)) \
                + np.outer(y, y) / self._sy[j]
        return B
