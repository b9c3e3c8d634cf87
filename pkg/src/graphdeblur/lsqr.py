"""LSQR for the stacked least-squares problem ``min_y ||[L; I] y - [top; bottom]||``.

This is the normal-equations system ``(L^T L + I) y = L^T top + bottom``
solved by Golub-Kahan bidiagonalization (Paige and Saunders, 1982). Each
iteration costs one product with ``[L; I]`` and one with its transpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = ["LsqrReport", "lsqr_solve", "DEFAULT_TOL", "DEFAULT_MAX_ITER"]

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200


@dataclass
class LsqrReport:
    """Outcome of :func:`lsqr_solve`.

    ``relative_residual`` is ``||M^T (M y - v)|| / ||M^T v||`` with
    ``M = [L; I]``, recomputed from the returned ``y``.
    ``residual_norms`` holds the running estimate of ``||M y_j - v||``.
    """

    iterations: int
    relative_residual: float
    converged: bool
    residual_norms: list = field(default_factory=list)


def lsqr_solve(L, top_rhs, bottom_rhs, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, warm_start=None):
    """Solve ``min_y ||L y - top||^2 + ||y - bottom||^2``.

    Returns ``(y, report)``. When ``max_iter`` is hit first the last
    iterate is returned with ``report.converged = False``.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol}")
    top = np.asarray(top_rhs, dtype=np.float64).ravel()
    bottom = np.asarray(bottom_rhs, dtype=np.float64).ravel()
    p, N = L.shape
    if top.size != p or bottom.size != N:
        raise ConfigurationError(
            f"L is {p}x{N} but right-hand sides have lengths {top.size} and {bottom.size}"
        )
    LT = L.T

    def normal_residual(y):
        return LT @ (L @ y - top) + (y - bottom)

    ref = np.linalg.norm(LT @ top + bottom)
    y0 = np.zeros(N) if warm_start is None else np.array(warm_start, dtype=np.float64).ravel()
    if ref == 0.0:
        return np.zeros(N), LsqrReport(0, 0.0, True, [0.0])

    # solve for the correction d = y - y0
    u1 = top - L @ y0
    u2 = bottom - y0
    beta = math.sqrt(u1 @ u1 + u2 @ u2)
    if beta == 0.0:
        return y0, LsqrReport(0, 0.0, True, [0.0])
    u1 /= beta
    u2 /= beta
    v = LT @ u1 + u2
    alpha = np.linalg.norm(v)
    if alpha <= tol * ref:
        rel = np.linalg.norm(normal_residual(y0)) / ref
        return y0, LsqrReport(0, rel, rel <= tol, [beta])
    v /= alpha
    w = v.copy()
    d = np.zeros(N)
    phibar, rhobar = beta, alpha
    history = [beta]
    rel = math.inf

    k = 0
    while k < max_iter:
        k += 1
        u1 = L @ v - alpha * u1
        u2 = v - alpha * u2
        beta = math.sqrt(u1 @ u1 + u2 @ u2)
        if beta > 0.0:
            u1 /= beta
            u2 /= beta
        v = LT @ u1 + u2 - beta * v
        alpha = np.linalg.norm(v)
        if alpha > 0.0:
            v /= alpha

        rho = math.hypot(rhobar, beta)
        c, s = rhobar / rho, beta / rho
        theta = s * alpha
        rhobar = -c * alpha
        phi = c * phibar
        phibar = s * phibar
        d += (phi / rho) * w
        w = v - (theta / rho) * w
        history.append(phibar)

        # cheap estimate of ||M^T r|| first; confirm against the true residual
        if phibar * alpha * abs(c) <= tol * ref or alpha == 0.0:
            rel = np.linalg.norm(normal_residual(y0 + d)) / ref
            if rel <= tol or alpha == 0.0:
                break

    y = y0 + d
    if not rel <= tol:
        rel = np.linalg.norm(normal_residual(y)) / ref
    return y, LsqrReport(k, float(rel), bool(rel <= tol), history)
