"""BCCB operator algebra under periodic boundary conditions.

A space-invariant blur with periodic boundaries is a block circulant matrix
with circulant blocks (BCCB). Such a matrix is diagonalized by the 2-D DFT,
so it is stored here as its eigenvalue array (a "spectrum"): a complex
``(n, n)`` array in the frequency ordering of :func:`scipy.fft.fft2`.

The forward transform is unnormalized and the inverse carries the ``1/N``
factor, so every forward/inverse pair is normalization neutral.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import ConfigurationError, NumericIntegrityError, SingularityError

__all__ = [
    "Psf",
    "psf_to_spectrum",
    "bccb_apply",
    "bccb_solve_filtered",
    "fft2",
    "ifft2",
    "IMAG_TOL",
]

#: Relative tolerance on the discarded imaginary part of a real-valued result.
IMAG_TOL = 1e-10


def _workers():
    value = os.environ.get("GRAPHDEBLUR_THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def fft2(x):
    return scipy.fft.fft2(x, workers=_workers())


def ifft2(x):
    return scipy.fft.ifft2(x, workers=_workers())


def _real_part(y, scale, what):
    """Drop the imaginary part of ``y`` after checking it is rounding noise."""
    resid = np.linalg.norm(y.imag)
    if resid > IMAG_TOL * max(scale, np.finfo(float).tiny):
        raise NumericIntegrityError(
            f"{what}: imaginary residue {resid:.3e} exceeds {IMAG_TOL:g} * {scale:.3e}; "
            "is the spectrum conjugate symmetric?"
        )
    return np.ascontiguousarray(y.real)


@dataclass(frozen=True)
class Psf:
    """Point spread function normalized to unit sum.

    ``center`` is the (row, col) index of the kernel entry that sits on the
    output pixel; it defaults to ``(rows // 2, cols // 2)``.
    """

    data: np.ndarray
    center: tuple = field(default=None)

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2 or data.size == 0:
            raise ConfigurationError(f"PSF must be a non-empty 2-D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ConfigurationError("PSF contains non-finite entries")
        total = data.sum()
        if total == 0:
            raise ConfigurationError("PSF entries sum to zero and cannot be normalized")
        data = data / total
        data.setflags(write=False)
        center = self.center
        if center is None:
            center = (data.shape[0] // 2, data.shape[1] // 2)
        center = (int(center[0]), int(center[1]))
        if not (0 <= center[0] < data.shape[0] and 0 <= center[1] < data.shape[1]):
            raise ConfigurationError(f"PSF center {center} outside kernel of shape {data.shape}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "center", center)

    @property
    def shape(self):
        return self.data.shape


def psf_to_spectrum(psf, n):
    """Eigenvalues of the periodic blur generated by ``psf`` on ``n x n`` images.

    The kernel is embedded in an ``n x n`` array and circularly shifted so its
    center lands on index (0, 0); that array is the first column of the BCCB
    matrix and its DFT gives the eigenvalues.
    """
    if not isinstance(psf, Psf):
        psf = Psf(psf)
    rows, cols = psf.shape
    if rows > n or cols > n:
        raise ConfigurationError(f"PSF of shape {psf.shape} does not fit in a {n}x{n} image")
    col = np.zeros((n, n))
    col[:rows, :cols] = psf.data
    col = np.roll(col, (-psf.center[0], -psf.center[1]), axis=(0, 1))
    return fft2(col)


def _check_pair(s, x):
    if s.shape != x.shape or s.ndim != 2:
        raise ConfigurationError(f"spectrum shape {s.shape} does not match image shape {x.shape}")


def bccb_apply(s, x):
    """Multiply image ``x`` by the BCCB matrix whose spectrum is ``s``."""
    x = np.asarray(x, dtype=np.float64)
    _check_pair(s, x)
    y = ifft2(s * fft2(x))
    return _real_part(y, np.linalg.norm(x), "bccb_apply")


def bccb_solve_filtered(sigma, lx, ly, mu, rhs_hat):
    """Apply ``(S*S + mu (Lx*Lx + Ly*Ly))^{-1} S*`` to a transformed right-hand side.

    With ``rhs_hat = fft2(b)`` this is the Tikhonov solution
    ``argmin ||A x - b||^2 + mu ||L_TV x||^2``.
    """
    if mu < 0:
        raise ConfigurationError(f"mu must be non-negative, got {mu}")
    rhs_hat = np.asarray(rhs_hat)
    for s in (lx, ly, rhs_hat):
        _check_pair(sigma, s)
    denom = np.abs(sigma) ** 2 + mu * (np.abs(lx) ** 2 + np.abs(ly) ** 2)
    bad = ~(denom > np.finfo(float).eps ** 2 * denom.max())
    if bad.any():
        k = tuple(int(i) for i in np.argwhere(bad)[0])
        raise SingularityError(f"filter denominator vanishes at frequency {k} (mu={mu:g})")
    y = ifft2(np.conj(sigma) * rhs_hat / denom)
    return _real_part(y, np.linalg.norm(y.real), "bccb_solve_filtered")
