"""ADMM for non-negative l2-l1 deblurring with a sparse regularization operator.

Solves

    min_{x >= 0}  1/2 ||A x - b||^2 + mu ||L x||_1

with ``A`` a periodic blur (given by its spectrum) and ``L`` a sparse
matrix, through the splitting ``x = y``, ``z = L y``, ``x = w``. The
x-update is a diagonal solve in Fourier space, the z-update a soft
threshold, the y-update an LSQR solve with ``[L; I]`` and the w-update a
projection on the non-negative cone.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import as_image
from .errors import ConfigurationError, DivergenceError
from .graph import GraphConfig, build_adjacency, build_laplacian, build_oracle_laplacian
from .lsqr import DEFAULT_MAX_ITER, DEFAULT_TOL, lsqr_solve
from .reference import compute_reference
from .spectral import Psf, fft2, ifft2, psf_to_spectrum
from .tv import tv_matrix

__all__ = [
    "soft_threshold",
    "project_nonneg",
    "AdmmConfig",
    "AdmmState",
    "AdmmTrace",
    "AdmmProblem",
    "admm_step",
    "admm_deblur",
    "METHODS",
    "MethodResult",
    "run_method",
    "regularization_operator",
]

log = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6
METHODS = ("tikhonov", "tv_l1", "graph", "graph_oracle")


def soft_threshold(v, theta):
    """Elementwise ``sign(v) * max(|v| - theta, 0)``."""
    if theta < 0:
        raise ValueError(f"threshold must be non-negative, got {theta}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def project_nonneg(v):
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)


@dataclass(frozen=True)
class AdmmConfig:
    mu: float
    rho: float = 1e-1
    tau: float = 1e-4
    K: int = 3000
    lsqr_tol: float = DEFAULT_TOL
    lsqr_max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if not self.mu >= 0:
            raise ConfigurationError(f"mu must be non-negative, got {self.mu}")
        if not self.rho > 0:
            raise ConfigurationError(f"rho must be positive, got {self.rho}")
        if not self.tau >= 0:
            raise ConfigurationError(f"tau must be non-negative, got {self.tau}")
        if int(self.K) != self.K or self.K < 1:
            raise ConfigurationError(f"K must be a positive integer, got {self.K}")


@dataclass
class AdmmState:
    """Iterates of the splitting; pixel-space vectors are flat (length N)."""

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    z: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: np.ndarray
    k: int = 0

    @classmethod
    def zeros(cls, N, p):
        return cls(*(np.zeros(m) for m in (N, N, N, p, N, p, N)), k=0)


@dataclass
class AdmmTrace:
    res_xy: list = field(default_factory=list)
    res_zLy: list = field(default_factory=list)
    res_xw: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    relchange: list = field(default_factory=list)
    lsqr_iterations: list = field(default_factory=list)
    lsqr_failures: list = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.objective)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "res_xy", "res_zLy", "res_xw", "objective", "relchange"])
            for k, row in enumerate(
                zip(self.res_xy, self.res_zLy, self.res_xw, self.objective, self.relchange), 1
            ):
                writer.writerow([k, *(repr(float(v)) for v in row)])


class AdmmProblem:
    """Quantities that stay fixed across ADMM iterations."""

    def __init__(self, sigma_A, L, b_delta, cfg):
        b = as_image(b_delta)
        if sigma_A.shape != b.shape:
            raise ConfigurationError(f"spectrum shape {sigma_A.shape} does not match data {b.shape}")
        if L.shape[1] != b.size:
            raise ConfigurationError(f"L has {L.shape[1]} columns, image has {b.size} pixels")
        self.n = b.shape[0]
        self.sigma = sigma_A
        self.L = L
        self.b = b
        self.cfg = cfg
        self.b_norm = float(np.linalg.norm(b))
        self.Atb_hat = np.conj(sigma_A) * fft2(b)
        self.x_denom = np.abs(sigma_A) ** 2 + 2.0 * cfg.rho

    @property
    def shape(self):
        return self.L.shape

    def blur(self, x_flat):
        return ifft2(self.sigma * fft2(x_flat.reshape(self.n, self.n))).real.ravel()

    def objective(self, x, z):
        r = self.blur(x) - self.b.ravel()
        return 0.5 * float(r @ r) + self.cfg.mu * float(np.abs(z).sum())


def admm_step(problem, state):
    """One sweep of the x, z, y, w and multiplier updates.

    Returns ``(new_state, lsqr_report)``; ``state`` is left untouched.
    """
    cfg = problem.cfg
    rho = cfg.rho
    n = problem.n
    rhs = rho * state.y - state.lambda1 + rho * state.w - state.lambda3
    x = ifft2((problem.Atb_hat + fft2(rhs.reshape(n, n))) / problem.x_denom).real.ravel()
    z = soft_threshold(problem.L @ state.y - state.lambda2 / rho, cfg.mu / rho)
    y, report = lsqr_solve(
        problem.L,
        z + state.lambda2 / rho,
        x + state.lambda1 / rho,
        tol=cfg.lsqr_tol,
        max_iter=cfg.lsqr_max_iter,
        warm_start=state.y,
    )
    w = project_nonneg(x + state.lambda3 / rho)
    Ly = problem.L @ y
    new = AdmmState(
        x=x,
        y=y,
        w=w,
        z=z,
        lambda1=state.lambda1 + rho * (x - y),
        lambda2=state.lambda2 + rho * (z - Ly),
        lambda3=state.lambda3 + rho * (x - w),
        k=state.k + 1,
    )
    return new, report


def admm_deblur(sigma_A, L, b_delta, cfg, state=None, return_state=False):
    """Run ADMM until the relative change of ``x`` drops below ``tau``.

    Returns ``(x, trace)`` where ``x`` is the final iterate projected on the
    non-negative cone, as an ``(n, n)`` image. With ``return_state=True``
    the final :class:`AdmmState` is appended to the tuple.
    """
    problem = AdmmProblem(sigma_A, L, b_delta, cfg)
    p, N = L.shape
    state = AdmmState.zeros(N, p) if state is None else state
    trace = AdmmTrace()
    bound = DIVERGENCE_FACTOR * max(problem.b_norm, np.finfo(float).tiny)
    x_prev = None
    for k in range(cfg.K):
        prev = state
        state, report = admm_step(problem, state)
        x = state.x
        x_norm = float(np.linalg.norm(x))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(state.z)) and np.all(np.isfinite(state.y))):
            raise DivergenceError(f"non-finite iterate at iteration {state.k}", state.k)
        if x_norm > bound:
            raise DivergenceError(
                f"||x|| = {x_norm:.3e} exceeds {DIVERGENCE_FACTOR:g} ||b|| at iteration {state.k}",
                state.k,
            )
        trace.lsqr_iterations.append(report.iterations)
        if not report.converged:
            trace.lsqr_failures.append(state.k)
            warnings.warn(
                f"LSQR stopped at relative residual {report.relative_residual:.2e} "
                f"in ADMM iteration {state.k}",
                RuntimeWarning,
                stacklevel=2,
            )
        # each multiplier moves by rho times its coupling residual
        trace.res_xy.append(float(np.linalg.norm(x - state.y)))
        trace.res_zLy.append(float(np.linalg.norm(state.lambda2 - prev.lambda2)) / cfg.rho)
        trace.res_xw.append(float(np.linalg.norm(x - state.w)))
        trace.objective.append(problem.objective(x, state.z))
        if x_prev is None:
            trace.relchange.append(math.nan)
            x_prev = x
            continue
        diff = float(np.linalg.norm(x - x_prev))
        prev_norm = float(np.linalg.norm(x_prev))
        if prev_norm > 0:
            trace.relchange.append(diff / prev_norm)
        else:
            trace.relchange.append(0.0 if diff == 0 else math.inf)
        x_prev = x
        if k > 1 and diff <= cfg.tau * prev_norm:
            trace.converged = True
            break
    log.debug("ADMM finished after %d iterations (converged=%s)", len(trace), trace.converged)
    x_out = project_nonneg(state.x).reshape(problem.n, problem.n)
    if return_state:
        return x_out, trace, state
    return x_out, trace


@dataclass
class MethodResult:
    """Reconstruction plus the intermediate objects that produced it."""

    method: str
    x: np.ndarray
    reference: object = None
    laplacian: object = None
    trace: AdmmTrace = None


def run_method(method, psf, b_delta, mu=None, graph_cfg=None, admm_cfg=None, x_true=None,
               reference=None):
    """Reconstruct ``b_delta`` with one of :data:`METHODS`.

    ``tikhonov`` returns the unclipped GCV-Tikhonov reference. The other
    methods run :func:`admm_deblur` with ``L_TV`` (``tv_l1``), the graph
    Laplacian weighted by the reference (``graph``) or by ``x_true``
    (``graph_oracle``). ``admm_cfg`` overrides ``mu`` when both are given.
    A precomputed ``reference`` (a GcvResult) may be passed to skip GCV.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    b = as_image(b_delta)
    psf = psf if isinstance(psf, Psf) else Psf(psf)
    graph_cfg = graph_cfg or GraphConfig()
    if method == "graph_oracle" and x_true is None:
        raise ConfigurationError("method graph_oracle requires the exact image x_true")
    if method != "tikhonov" and admm_cfg is None:
        if mu is None:
            raise ConfigurationError(f"method {method} requires mu")
        admm_cfg = AdmmConfig(mu=mu)

    if reference is None and method in ("tikhonov", "graph"):
        reference = compute_reference(psf, b)
    if method == "tikhonov":
        return MethodResult(method, reference.x_star, reference=reference)

    L = regularization_operator(method, b.shape[0], reference, graph_cfg, x_true)
    sigma = psf_to_spectrum(psf, b.shape[0])
    x, trace = admm_deblur(sigma, L, b, admm_cfg)
    return MethodResult(method, x, reference=reference, laplacian=L, trace=trace)


def regularization_operator(method, n, reference=None, graph_cfg=None, x_true=None):
    """Sparse ``L`` used by the l2-l1 ``method`` on ``n x n`` images."""
    graph_cfg = graph_cfg or GraphConfig()
    if method == "tv_l1":
        return tv_matrix(n)
    if method == "graph":
        if reference is None:
            raise ConfigurationError("method graph requires the GCV reference reconstruction")
        return build_laplacian(build_adjacency(reference.x_star, graph_cfg))
    if method == "graph_oracle":
        if x_true is None:
            raise ConfigurationError("method graph_oracle requires the exact image x_true")
        return build_oracle_laplacian(as_image(x_true, n), graph_cfg)
    raise ConfigurationError(f"method {method!r} has no sparse regularization operator")
