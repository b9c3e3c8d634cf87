"""Periodic first-difference operator ``L_TV`` and its spectra.

``L1`` is the ``n x n`` forward difference with periodic wrap
(``-1`` on the diagonal, ``+1`` on the superdiagonal and in the bottom-left
corner). ``L_TV`` stacks ``kron(L1, I)`` (differences along rows, axis 0)
on top of ``kron(I, L1)`` (differences along columns, axis 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import as_image
from .errors import ConfigurationError
from .spectral import fft2

__all__ = ["TvOperator", "build_tv", "tv_apply", "difference_matrix", "tv_matrix"]


@dataclass(frozen=True)
class TvOperator:
    n: int
    lambda_x: np.ndarray
    lambda_y: np.ndarray

    @property
    def gram_spectrum(self):
        """Eigenvalues of ``L_TV^T L_TV``."""
        return np.abs(self.lambda_x) ** 2 + np.abs(self.lambda_y) ** 2


def build_tv(n):
    if n < 2:
        raise ConfigurationError(f"TV operator needs n >= 2, got {n}")
    # first columns of kron(L1, I) and kron(I, L1), reshaped to images
    cx = np.zeros((n, n))
    cx[0, 0], cx[n - 1, 0] = -1.0, 1.0
    cy = np.zeros((n, n))
    cy[0, 0], cy[0, n - 1] = -1.0, 1.0
    return TvOperator(n, fft2(cx), fft2(cy))


def tv_apply(op, x):
    """Return ``L_TV @ x.ravel()`` as a length ``2N`` vector."""
    x = as_image(x, op.n)
    dx = np.roll(x, -1, axis=0) - x
    dy = np.roll(x, -1, axis=1) - x
    return np.concatenate([dx.ravel(), dy.ravel()])


def difference_matrix(n):
    """Sparse periodic forward difference ``L1``."""
    L1 = sp.diags([-np.ones(n), np.ones(n - 1)], [0, 1], shape=(n, n), format="lil")
    L1[n - 1, 0] += 1.0
    return L1.tocsr()


def tv_matrix(n):
    """Explicit sparse ``L_TV`` of shape ``(2N, N)``."""
    L1 = difference_matrix(n)
    eye = sp.identity(n, format="csr")
    return sp.vstack([sp.kron(L1, eye), sp.kron(eye, L1)], format="csr")
