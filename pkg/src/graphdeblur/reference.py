"""Tikhonov reference reconstruction with a GCV-selected parameter.

For a blur spectrum ``sigma`` and TV spectra ``lx``, ``ly`` the Tikhonov
solution ``x_mu`` and the GCV function

    G(mu) = ||A x_mu - b||^2 / trace(I - A (A^T A + mu L^T L)^{-1} A^T)^2

are evaluated frequency by frequency in O(N).
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import as_image
from .errors import DegenerateGCVError, NumericIntegrityError
from .spectral import Psf, bccb_solve_filtered, fft2, psf_to_spectrum
from .tv import build_tv

__all__ = [
    "GcvResult",
    "gcv_terms",
    "gcv_value",
    "gcv_minimize",
    "compute_reference",
    "write_probe_csv",
    "MU_RANGE",
    "POINTS_PER_DECADE",
    "REFINE_RTOL",
]

log = logging.getLogger(__name__)

MU_RANGE = (1e-12, 1e2)
POINTS_PER_DECADE = 15
REFINE_RTOL = 1e-4

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class GcvResult:
    mu_gcv: float
    g_value: float
    evaluations: list = field(default_factory=list)
    x_star: np.ndarray = None


def gcv_terms(sigma, lx, ly, b_hat, mu):
    """Return ``(r_mu**2, t_mu)`` for the Tikhonov/TV filter at ``mu``.

    Both are written in terms of the complementary filter
    ``mu a / (s + mu a)`` (``s = |sigma|^2``, ``a = |lx|^2 + |ly|^2``) so
    that small ``mu`` does not suffer cancellation.
    """
    s = np.abs(sigma) ** 2
    a = np.abs(lx) ** 2 + np.abs(ly) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        comp = mu * a / (s + mu * a)
    # s + mu a == 0 only where both vanish; the filter there is 0/0 and the
    # Tikhonov solution leaves that frequency unresolved.
    comp = np.where(np.isfinite(comp), comp, 1.0)
    r2 = float(np.sum(np.abs(comp * b_hat) ** 2)) / b_hat.size
    t = float(np.sum(comp))
    return r2, t


def gcv_value(sigma, lx, ly, b_hat, mu):
    """GCV function ``G(mu) = r_mu^2 / t_mu^2``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    r2, t = gcv_terms(sigma, lx, ly, b_hat, mu)
    if t <= b_hat.size * np.finfo(float).eps:
        raise DegenerateGCVError(f"GCV trace t_mu={t:.3e} is numerically zero at mu={mu:g}")
    return r2 / t**2


def _safe_gcv(sigma, lx, ly, b_hat, mu):
    try:
        return gcv_value(sigma, lx, ly, b_hat, mu)
    except DegenerateGCVError:
        return math.inf


def _golden_section(f, lo, hi, rtol):
    """Minimize ``f(10**u)`` for ``u`` in ``[lo, hi]`` (log10 of mu)."""
    width = math.log10(1.0 + rtol)
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(10.0**c), f(10.0**d)
    while hi - lo > width:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(10.0**c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(10.0**d)
    return (c, fc) if fc <= fd else (d, fd)


def probe_grid(mu_range=MU_RANGE, per_decade=POINTS_PER_DECADE):
    lo, hi = (math.log10(m) for m in mu_range)
    count = int(round((hi - lo) * per_decade)) + 1
    return np.logspace(lo, hi, count)


def gcv_minimize(sigma, lx, ly, b_hat, mu_range=MU_RANGE, rtol=REFINE_RTOL):
    """Minimize G over a log grid, then refine by golden section.

    The grid has 15 points per decade. If the grid minimum is an endpoint
    it is returned as is, with a warning.
    """
    evaluations = []

    def f(mu):
        g = _safe_gcv(sigma, lx, ly, b_hat, mu)
        evaluations.append((float(mu), g))
        return g

    grid = probe_grid(mu_range)
    values = np.array([f(mu) for mu in grid])
    if not np.isfinite(values).any():
        raise NumericIntegrityError("GCV function is non-finite on the whole probe grid")
    i = int(np.nanargmin(np.where(np.isfinite(values), values, np.inf)))
    if i in (0, len(grid) - 1):
        warnings.warn(
            f"GCV minimum at the boundary of the search range (mu={grid[i]:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
        mu, g = float(grid[i]), float(values[i])
    else:
        _golden_section(f, math.log10(grid[i - 1]), math.log10(grid[i + 1]), rtol)
        mu, g = min(evaluations, key=lambda e: e[1])
    x_star = bccb_solve_filtered(sigma, lx, ly, mu, b_hat)
    log.debug("mu_GCV=%.6e G=%.6e after %d evaluations", mu, g, len(evaluations))
    return GcvResult(mu, g, evaluations, x_star)


def compute_reference(psf, b_delta):
    """Tikhonov/TV reconstruction of ``b_delta`` with the GCV parameter.

    The returned ``x_star`` is not clipped to non-negative values.
    """
    b_delta = as_image(b_delta)
    n = b_delta.shape[0]
    if not isinstance(psf, Psf):
        psf = Psf(psf)
    sigma = psf_to_spectrum(psf, n)
    tv = build_tv(n)
    return gcv_minimize(sigma, tv.lambda_x, tv.lambda_y, fft2(b_delta))


def write_probe_csv(result, path):
    """Dump the ``(mu, G(mu))`` probes, in evaluation order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["mu", "g"])
        for mu, g in result.evaluations:
            writer.writerow([repr(mu), repr(g)])
