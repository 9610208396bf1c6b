"""Stochastic variance-reduced L-BFGS at empirical-risk scale.

The optimizer couples an epoch-anchored variance-reduced gradient with a
limited-memory inverse-Hessian approximation whose curvature pairs come
from subsampled Hessian-vector products rather than gradient differences.
The package also ships the plain variance-reduced baseline, an online
quasi-Newton variant, minibatch SGD, theory checkers for the curvature
and rate bounds, data/CSV plumbing, and a CLI experiment driver.

Numeric kernels live behind ``slbfgs._kernels``; a compiled backend is
used when built, with a pure NumPy fallback that defines the normative
operation order.  Select explicitly with ``set_backend`` or the
``SLBFGS_BACKEND`` environment variable (``python``, ``compiled``,
``auto``).
"""

from ._kernels import available_backends, set_backend
from .analysis import (
    AssumptionViolationError,
    EnvelopeReport,
    InequalityReport,
    RateReport,
    SpectrumBounds,
    TraceDetReport,
    build_random_memory,
    check_gradient_dominance,
    check_spectrum_envelope,
    check_trace_det_bounds,
    check_variance_bound,
    convergence_rate,
    hessian_approx_bounds,
    measure_spectrum_bounds,
    rate_from_constants,
    sweep_memory_bounds,
)
from .core import (
    Dataset,
    EvalCounters,
    Prng,
    ResourceLimitError,
    SparseRow,
    as_index_set,
    as_vector,
    passes,
    sample_minibatch,
)
from .io import (
    ParseError,
    ReferenceConvergenceError,
    ReferenceSolution,
    RunRecord,
    SyntheticRidge,
    compute_reference,
    gen_synthetic_ridge,
    load_reference,
    parse_libsvm,
    parse_triples,
    read_trajectory,
    save_reference,
    write_libsvm,
    write_trajectory,
)
from .lbfgs import CURVATURE_EPS, CurvaturePair, LbfgsMemory
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
    Trajectory,
    TrajectoryPoint,
    sgd_run,
    slbfgs_run,
    sqn_run,
    svrg_run,
    vr_gradient,
)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the kernel backend currently in use."""
    from . import _kernels

    return _kernels.BACKEND


__all__ = [
    "__version__",
    "available_backends",
    "set_backend",
    "kernel_backend",
    "AssumptionViolationError",
    "EnvelopeReport",
    "InequalityReport",
    "RateReport",
    "SpectrumBounds",
    "TraceDetReport",
    "build_random_memory",
    "check_gradient_dominance",
    "check_spectrum_envelope",
    "check_trace_det_bounds",
    "check_variance_bound",
    "convergence_rate",
    "hessian_approx_bounds",
    "measure_spectrum_bounds",
    "rate_from_constants",
    "sweep_memory_bounds",
    "Dataset",
    "EvalCounters",
    "Prng",
    "ResourceLimitError",
    "SparseRow",
    "as_index_set",
    "as_vector",
    "passes",
    "sample_minibatch",
    "ParseError",
    "ReferenceConvergenceError",
    "ReferenceSolution",
    "RunRecord",
    "SyntheticRidge",
    "compute_reference",
    "gen_synthetic_ridge",
    "load_reference",
    "parse_libsvm",
    "parse_triples",
    "read_trajectory",
    "save_reference",
    "write_libsvm",
    "write_trajectory",
    "CURVATURE_EPS",
    "CurvaturePair",
    "LbfgsMemory",
    "IsotropicQuadraticObjective",
    "MatrixCompletionObjective",
    "Objective",
    "RidgeObjective",
    "SquaredHingeSvmObjective",
    "DivergenceError",
    "SgdSchedule",
    "SlbfgsConfig",
    "Trajectory",
    "TrajectoryPoint",
    "sgd_run",
    "slbfgs_run",
    "sqn_run",
    "svrg_run",
    "vr_gradient",
]
