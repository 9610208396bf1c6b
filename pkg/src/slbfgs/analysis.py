"""Curvature bounds, rate certification, and inequality checkers.

Under the standing assumptions (every subsampled Hessian has spectrum
inside [lam_min, lam_max] with lam_min > 0), the limited-memory inverse
Hessian H built from M curvature pairs in dimension d satisfies

    gamma I <= H <= Gamma I,
    gamma = 1 / ((d + M) * lam_max),
    Gamma = ((d + M) * lam_max)^(d + M - 1) / lam_min^(d + M),

and the epoch-to-epoch contraction factor of the variance-reduced
quasi-Newton loop with step size eta and m inner steps is

    alpha = (1/(2*m*eta) + eta * Gamma^2 * lam_max^2)
          / (gamma * lam_min - eta * Gamma^2 * lam_max^2),

valid when eta < gamma*lam_min / (2 * Gamma^2 * lam_max^2) and
gamma*lam_min > 1/(2*m*eta) + 2*eta*Gamma^2*lam_max^2 (then 0 < alpha < 1).

The ``check_*`` functions verify the supporting inequalities on concrete
matrices and objectives (trace/determinant bounds on B, the spectrum
envelope on H, gradient dominance, and the variance bound on the
reduced gradient), each with 1e-9 relative slack.  Gamma is an extremely
loose worst-case bound; reports carry the measured quantities so the gap
is visible rather than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Prng, ResourceLimitError
from .lbfgs import LbfgsMemory
from .objectives import Objective

__all__ = [
    "AssumptionViolationError",
    "SpectrumBounds",
    "RateReport",
    "hessian_approx_bounds",
    "rate_from_constants",
    "convergence_rate",
    "TraceDetReport",
    "EnvelopeReport",
    "InequalityReport",
    "check_trace_det_bounds",
    "check_spectrum_envelope",
    "check_gradient_dominance",
    "check_variance_bound",
    "measure_spectrum_bounds",
    "build_random_memory",
    "sweep_memory_bounds",
]

_SLACK = 1e-9
_ENVELOPE_DIM_LIMIT = 50
_VARIANCE_COUNT_LIMIT = 1000
_MEASURE_DIM_LIMIT = 2000


class AssumptionViolationError(ValueError):
    """The standing curvature assumptions do not hold for the input."""


@dataclass(frozen=True)
class SpectrumBounds:
    """Eigenvalue envelope of subsampled Hessians: 0 < lam_min <= lam_max."""

    lam_min: float
    lam_max: float

    def __post_init__(self):
        if not (math.isfinite(self.lam_min) and math.isfinite(self.lam_max)):
            raise AssumptionViolationError("spectrum bounds must be finite")
        if self.lam_min <= 0:
            raise AssumptionViolationError(
                f"lam_min must be positive, got {self.lam_min} "
                "(strong convexity is required; add regularization)"
            )
        if self.lam_max < self.lam_min:
            raise AssumptionViolationError(
                f"lam_max={self.lam_max} < lam_min={self.lam_min}"
            )


def hessian_approx_bounds(d: int, M: int, bounds: SpectrumBounds,
                          ) -> tuple[float, float]:
    """(gamma, Gamma) envelope for the M-pair inverse Hessian in dim d.

    Gamma is computed in log space; values beyond float range come back
    as inf, which downstream validity flags treat as "condition not met".
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if M < 0:
        raise ValueError(f"M must be >= 0, got {M}")
    q = (d + M) * bounds.lam_max
    gamma = 1.0 / q
    log_big_gamma = (d + M - 1) * math.log(q) - (d + M) * math.log(bounds.lam_min)
    big_gamma = math.exp(log_big_gamma) if log_big_gamma < 709.0 else math.inf
    return gamma, big_gamma


@dataclass(frozen=True)
class RateReport:
    """Certified contraction factor and the validity of its preconditions.

    alpha is None unless both eta_ok and m_ok hold; when set it lies in
    (0, 1).
    """

    gamma: float
    Gamma: float
    alpha: float | None
    eta_ok: bool
    m_ok: bool

    def describe(self) -> str:
        a = "n/a" if self.alpha is None else f"{self.alpha:.6g}"
        return (f"gamma={self.gamma:.6g} Gamma={self.Gamma:.6g} "
                f"alpha={a} eta_ok={self.eta_ok} m_ok={self.m_ok}")


def rate_from_constants(gamma: float, big_gamma: float, lam_min: float,
                        lam_max: float, eta: float, m: int) -> RateReport:
    """Contraction factor from explicitly supplied envelope constants."""
    if not (gamma > 0 and big_gamma >= gamma):
        raise ValueError(f"need 0 < gamma <= Gamma, got {gamma}, {big_gamma}")
    if not (lam_min > 0 and lam_max >= lam_min):
        raise ValueError(f"need 0 < lam_min <= lam_max, got {lam_min}, {lam_max}")
    if not (math.isfinite(eta) and eta > 0):
        raise ValueError(f"eta must be positive and finite, got {eta}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    curv = big_gamma * big_gamma * lam_max * lam_max  # may overflow to inf
    eta_ok = eta < gamma * lam_min / (2.0 * curv) if math.isfinite(curv) else False
    m_ok = gamma * lam_min > 1.0 / (2.0 * m * eta) + 2.0 * eta * curv
    alpha = None
    if eta_ok and m_ok:
        alpha = (1.0 / (2.0 * m * eta) + eta * curv) / (
            gamma * lam_min - eta * curv)
    return RateReport(gamma=gamma, Gamma=big_gamma, alpha=alpha,
                      eta_ok=eta_ok, m_ok=m_ok)


def convergence_rate(d: int, M: int, bounds: SpectrumBounds, eta: float,
                     m: int) -> RateReport:
    """Contraction factor with (gamma, Gamma) derived from the envelope."""
    gamma, big_gamma = hessian_approx_bounds(d, M, bounds)
    return rate_from_constants(gamma, big_gamma, bounds.lam_min,
                               bounds.lam_max, eta, m)


def _require_symmetric(A, name):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max()))
    if float(np.abs(A - A.T).max()) > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    return A


@dataclass(frozen=True)
class TraceDetReport:
    holds: bool
    trace: float
    trace_bound: float
    trace_ok: bool
    logdet: float
    logdet_bound: float
    det_ok: bool
    positive_definite: bool

    def describe(self) -> str:
        return (f"trace={self.trace:.6g}<=bound {self.trace_bound:.6g}: "
                f"{self.trace_ok}; logdet={self.logdet:.6g}>="
                f"{self.logdet_bound:.6g}: {self.det_ok}; "
                f"pd={self.positive_definite}")


def check_trace_det_bounds(B, d: int, M: int, bounds: SpectrumBounds,
                           ) -> TraceDetReport:
    """Verify trace(B) <= (d+M)*lam_max and
    det(B) >= lam_min^(d+M) / ((d+M)*lam_max)^M on a Hessian approximation B.

    The determinant side is compared in log space so small lam_min does
    not underflow.  Positive definiteness is part of the verdict.
    """
    B = _require_symmetric(B, "B")
    if B.shape[0] != d:
        raise ValueError(f"B is {B.shape[0]}x{B.shape[0]} but d={d}")
    eigs = np.linalg.eigvalsh(B)
    pd = bool(eigs[0] > 0)
    trace = float(np.trace(B))
    trace_bound = (d + M) * bounds.lam_max
    trace_ok = trace <= trace_bound * (1.0 + _SLACK)
    q = (d + M) * bounds.lam_max
    logdet_bound = (d + M) * math.log(bounds.lam_min) - M * math.log(q)
    if pd:
        logdet = float(np.sum(np.log(eigs)))
        det_ok = logdet >= logdet_bound - _SLACK * max(1.0, abs(logdet_bound))
    else:
        logdet = -math.inf
        det_ok = False
    return TraceDetReport(holds=pd and trace_ok and det_ok, trace=trace,
                          trace_bound=trace_bound, trace_ok=trace_ok,
                          logdet=logdet, logdet_bound=logdet_bound,
                          det_ok=det_ok, positive_definite=pd)


@dataclass(frozen=True)
class EnvelopeReport:
    holds: bool
    eig_min: float
    eig_max: float
    gamma: float
    Gamma: float

    def describe(self) -> str:
        return (f"spectrum [{self.eig_min:.6g}, {self.eig_max:.6g}] within "
                f"[{self.gamma:.6g}, {self.Gamma:.6g}]: {self.holds}")


def check_spectrum_envelope(H, d: int, M: int, bounds: SpectrumBounds,
                            ) -> EnvelopeReport:
    """Verify gamma I <= H <= Gamma I on an inverse-Hessian approximation."""
    if d > _ENVELOPE_DIM_LIMIT:
        raise ResourceLimitError(
            f"spectrum check gated at d <= {_ENVELOPE_DIM_LIMIT}, got {d}")
    H = _require_symmetric(H, "H")
    if H.shape[0] != d:
        raise ValueError(f"H is {H.shape[0]}x{H.shape[0]} but d={d}")
    gamma, big_gamma = hessian_approx_bounds(d, M, bounds)
    eigs = np.linalg.eigvalsh(H)
    lo = float(eigs[0])
    hi = float(eigs[-1])
    holds = lo >= gamma * (1.0 - _SLACK) and hi <= big_gamma * (1.0 + _SLACK)
    return EnvelopeReport(holds=holds, eig_min=lo, eig_max=hi, gamma=gamma,
                          Gamma=big_gamma)


@dataclass(frozen=True)
class InequalityReport:
    holds: bool
    lhs: float
    rhs: float

    def describe(self) -> str:
        return f"lhs={self.lhs:.6g} rhs={self.rhs:.6g} holds={self.holds}"


def _holds_with_slack(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - _SLACK * max(1.0, abs(rhs))


def check_gradient_dominance(obj: Objective, x, lam_min: float, f_star: float,
                             ) -> InequalityReport:
    """Verify ||grad f(x)||^2 >= 2 * lam_min * (f(x) - f*)."""
    if lam_min <= 0:
        raise AssumptionViolationError(f"lam_min must be positive, got {lam_min}")
    g = obj.grad(obj.all_indices, x)
    lhs = float(np.dot(g, g))
    rhs = 2.0 * lam_min * (obj.value(x) - f_star)
    return InequalityReport(holds=_holds_with_slack(lhs, rhs), lhs=lhs, rhs=rhs)


def check_variance_bound(obj: Objective, x, w_anchor, lam_max: float,
                         f_star: float) -> InequalityReport:
    """Verify the second moment of the size-1 variance-reduced gradient:

    mean_i ||grad_i(x) - grad_i(w) + grad f(w)||^2
        <= 4 * lam_max * (f(x) - f* + f(w) - f*)

    by exhaustive enumeration of all N singleton batches.
    """
    n = obj.count
    if n > _VARIANCE_COUNT_LIMIT:
        raise ResourceLimitError(
            f"variance enumeration gated at N <= {_VARIANCE_COUNT_LIMIT}, "
            f"got N = {n}")
    mu = obj.grad(obj.all_indices, w_anchor)
    idx = np.zeros(1, dtype=np.int64)
    acc = 0.0
    for i in range(n):
        idx[0] = i
        v = (obj.grad(idx, x) - obj.grad(idx, w_anchor)) + mu
        acc += float(np.dot(v, v))
    lhs = acc / n
    fx = obj.value(x)
    fw = obj.value(w_anchor)
    rhs = 4.0 * lam_max * (fx - f_star + fw - f_star)
    return InequalityReport(holds=lhs <= rhs + _SLACK * max(1.0, abs(rhs)),
                            lhs=lhs, rhs=rhs)


def measure_spectrum_bounds(obj: Objective, w=None) -> SpectrumBounds:
    """Envelope constants for an objective.

    lam_max is the largest singleton-Hessian eigenvalue (which dominates
    every subset average).  lam_min is the regularization weight when
    positive; otherwise the smallest eigenvalue of the full Hessian at w
    (default 0) is measured, and a nonpositive result is refused.
    """
    lam_max = obj.component_curvature_max()
    reg = getattr(obj, "reg", 0.0)
    if reg > 0:
        lam_min = float(reg)
    else:
        if obj.dim > _MEASURE_DIM_LIMIT:
            raise ResourceLimitError(
                f"spectrum measurement gated at d <= {_MEASURE_DIM_LIMIT}, "
                f"got d = {obj.dim}")
        if w is None:
            w = np.zeros(obj.dim)
        eigs = np.linalg.eigvalsh(obj.dense_hessian(w))
        lam_min = float(eigs[0])
        if lam_min <= 0:
            raise AssumptionViolationError(
                f"measured strong convexity is {lam_min:.3g} <= 0; "
                "the curvature assumptions need regularization")
    return SpectrumBounds(lam_min=lam_min, lam_max=lam_max)


def build_random_memory(dim: int, M: int, bounds: SpectrumBounds, prng: Prng,
                        ) -> LbfgsMemory:
    """Memory filled with M pairs y = A s, each A a fresh random symmetric
    matrix with spectrum drawn inside [lam_min, lam_max]."""
    memory = LbfgsMemory(M, dim)
    for _ in range(M):
        G = prng.normal((dim, dim))
        Q, _r = np.linalg.qr(G)
        eigs = bounds.lam_min + (bounds.lam_max - bounds.lam_min) * prng.uniform(dim)
        A = (Q * eigs) @ Q.T
        s = prng.normal(dim)
        y = A @ s
        memory.push(s, y)
    return memory


def sweep_memory_bounds(dims, memory_sizes, bounds: SpectrumBounds,
                        trials: int, seed: int) -> tuple[int, list[str]]:
    """Random-memory sweep of the trace/determinant and envelope checks.

    Returns (number of memories checked, failure descriptions).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    prng = Prng(seed)
    checked = 0
    failures: list[str] = []
    for d in dims:
        for M in memory_sizes:
            for trial in range(trials):
                memory = build_random_memory(d, M, bounds, prng)
                B = memory.dense_b()
                H = memory.dense_h()
                td = check_trace_det_bounds(B, d, M, bounds)
                env = check_spectrum_envelope(H, d, M, bounds)
                checked += 1
                if not td.holds:
                    failures.append(
                        f"trace/det d={d} M={M} trial={trial} seed={seed}: "
                        + td.describe())
                if not env.holds:
                    failures.append(
                        f"envelope d={d} M={M} trial={trial} seed={seed}: "
                        + env.describe())
    return checked, failures
