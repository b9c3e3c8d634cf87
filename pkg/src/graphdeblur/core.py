"""Image indexing conventions and objective evaluation.

Images are square ``(n, n)`` float64 arrays. Flattening with ``ravel()``
(row-major) gives the lexicographic vector ordering, so pixel ``(i1, i2)``
is entry ``i1 * n + i2``. Indices are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .spectral import bccb_apply

__all__ = ["lex_index", "lex_unindex", "as_image", "Objective", "evaluate_objective"]


def lex_index(i1, i2, n):
    """Linear index of pixel ``(i1, i2)`` in an ``n x n`` image."""
    if not (0 <= i1 < n and 0 <= i2 < n):
        raise IndexError(f"pixel ({i1}, {i2}) outside a {n}x{n} image")
    return i1 * n + i2


def lex_unindex(i, n):
    if not 0 <= i < n * n:
        raise IndexError(f"linear index {i} outside a {n}x{n} image")
    return divmod(i, n)


def as_image(x, n=None):
    """Return ``x`` as a square float64 ``(n, n)`` array.

    Accepts a square 2-D array or a lexicographically ordered vector of
    length ``n**2``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        side = int(round(np.sqrt(x.size)))
        if side * side != x.size:
            raise ConfigurationError(f"vector of length {x.size} is not a square image")
        x = x.reshape(side, side)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ConfigurationError(f"only square images are supported, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise ConfigurationError(f"expected a {n}x{n} image, got {x.shape[0]}x{x.shape[1]}")
    return x


@dataclass(frozen=True)
class Objective:
    """Value of ``1/2 ||A x - b||^2 + mu ||L x||_1`` split into its parts."""

    fidelity: float
    penalty: float
    feasibility_gap: float

    @property
    def total(self):
        return self.fidelity + self.penalty


def evaluate_objective(spectrum_A, L, x, b_delta, mu):
    """Evaluate the constrained l2-l1 objective at ``x``.

    ``L`` is any matrix (dense or scipy sparse) with ``N`` columns.
    ``feasibility_gap`` is ``max(0, -min(x))``.
    """
    if not mu > 0:
        raise ConfigurationError(f"mu must be positive, got {mu}")
    x = as_image(x)
    b_delta = as_image(b_delta)
    if x.shape != b_delta.shape or spectrum_A.shape != x.shape:
        raise ConfigurationError(
            f"shape mismatch: x {x.shape}, b {b_delta.shape}, spectrum {spectrum_A.shape}"
        )
    if L.shape[1] != x.size:
        raise ConfigurationError(f"L has {L.shape[1]} columns, image has {x.size} pixels")
    r = bccb_apply(spectrum_A, x) - b_delta
    fidelity = 0.5 * float(np.dot(r.ravel(), r.ravel()))
    penalty = mu * float(np.abs(L @ x.ravel()).sum())
    gap = max(0.0, -float(x.min()))
    return Objective(fidelity, penalty, gap)
