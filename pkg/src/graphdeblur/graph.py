"""Image-adapted graph Laplacian.

Pixels are graph nodes. Two pixels within Chebyshev distance ``R`` (no wrap
around the image border) are joined by an edge of weight
``exp(-(x(i) - x(j))**2 / sigma)`` where ``x`` is a reference image. The
Laplacian is ``(D - Omega) / ||Omega||_F``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .core import as_image
from .errors import ConfigurationError, DegenerateGraphError
from .reference import compute_reference

__all__ = [
    "GraphConfig",
    "build_adjacency",
    "build_laplacian",
    "laplacian_apply",
    "build_oracle_laplacian",
    "build_graph_laplacian",
    "write_matrix_market",
    "read_matrix_market",
]

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class GraphConfig:
    """Neighborhood radius ``R`` (pixels) and kernel width ``sigma``."""

    R: int = 10
    sigma: float = 1e-2

    def __post_init__(self):
        if int(self.R) != self.R or self.R < 1:
            raise ConfigurationError(f"R must be a positive integer, got {self.R}")
        if not self.sigma > 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")


def build_adjacency(x_ref, cfg):
    """Weighted adjacency matrix ``Omega`` as a symmetric CSR matrix."""
    x = as_image(x_ref)
    n = x.shape[0]
    R = int(cfg.R)
    idx = np.arange(n * n).reshape(n, n)
    rows, cols, vals = [], [], []
    # one offset at a time keeps the working set at O(N) per step
    for d1 in range(-R, R + 1):
        for d2 in range(-R, R + 1):
            if d1 == 0 and d2 == 0:
                continue
            r0, r1 = max(0, -d1), min(n, n - d1)
            c0, c1 = max(0, -d2), min(n, n - d2)
            if r0 >= r1 or c0 >= c1:
                continue
            src = x[r0:r1, c0:c1]
            dst = x[r0 + d1 : r1 + d1, c0 + d2 : c1 + d2]
            w = np.exp(-((src - dst) ** 2) / cfg.sigma)
            keep = w >= UNDERFLOW
            rows.append(idx[r0:r1, c0:c1][keep])
            cols.append(idx[r0 + d1 : r1 + d1, c0 + d2 : c1 + d2][keep])
            vals.append(w[keep])
    N = n * n
    if rows:
        rows, cols, vals = (np.concatenate(a) for a in (rows, cols, vals))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    omega = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    omega.sort_indices()
    if omega.nnz == 0:
        raise DegenerateGraphError("adjacency matrix is empty (all weights underflow)")
    return omega


def build_laplacian(omega):
    """Return ``(D - Omega) / ||Omega||_F``."""
    omega = sp.csr_matrix(omega)
    fro = sp.linalg.norm(omega, "fro")
    if not fro > 0:
        raise DegenerateGraphError("adjacency matrix has zero Frobenius norm")
    degree = np.asarray(omega.sum(axis=1)).ravel()
    L = (sp.diags(degree) - omega).tocsr() / fro
    L.sort_indices()
    return L


def laplacian_apply(L, x):
    x = np.asarray(x, dtype=np.float64)
    shape = x.shape
    v = x.ravel()
    if L.shape[1] != v.size:
        raise ConfigurationError(f"operator has {L.shape[1]} columns, vector has {v.size} entries")
    y = L @ v
    return y.reshape(shape) if L.shape[0] == v.size else y


def build_oracle_laplacian(x_true, cfg):
    """Laplacian built from the exact image instead of a reconstruction."""
    return build_laplacian(build_adjacency(x_true, cfg))


def build_graph_laplacian(psf, b_delta, cfg):
    """Build the Laplacian from blurred data alone.

    Computes the GCV-Tikhonov reference ``x*`` and uses it to weight the
    graph. Returns ``(L, reference_result)``.
    """
    ref = compute_reference(psf, b_delta)
    return build_laplacian(build_adjacency(ref.x_star, cfg)), ref


def write_matrix_market(path, matrix, comment=""):
    """Write a symmetric sparse matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(
        str(path), sp.coo_matrix(matrix), comment=comment, field="real",
        precision=17, symmetry="symmetric",
    )


def read_matrix_market(path):
    return sp.csr_matrix(scipy.io.mmread(str(path)))
