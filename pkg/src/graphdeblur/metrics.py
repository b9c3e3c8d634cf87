"""Reconstruction quality metrics: RRE, PSNR and SSIM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import as_image
from .errors import ConfigurationError, UndefinedMetricError

__all__ = ["MetricsReport", "rre", "psnr", "ssim", "compute_metrics"]

SSIM_SIGMA = 1.5
SSIM_RADIUS = 5  # 11 x 11 window
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricsReport:
    rre: float
    psnr: float
    ssim: float


def _pair(x, x_true):
    x, x_true = as_image(x), as_image(x_true)
    if x.shape != x_true.shape:
        raise ConfigurationError(f"image shapes differ: {x.shape} vs {x_true.shape}")
    return x, x_true


def rre(x, x_true):
    """Relative restoration error ``||x - x_true|| / ||x_true||``."""
    x, x_true = _pair(x, x_true)
    ref = np.linalg.norm(x_true)
    if ref == 0:
        raise UndefinedMetricError("RRE is undefined for an all-zero reference image")
    return float(np.linalg.norm(x - x_true) / ref)


def psnr(x, x_true, m=None):
    """Peak signal-to-noise ratio in dB, ``20 log10(n m / ||x - x_true||)``.

    ``m`` defaults to ``max(x_true)``. Identical images give ``inf``.
    """
    x, x_true = _pair(x, x_true)
    if m is None:
        m = float(x_true.max())
    if not m > 0:
        raise UndefinedMetricError(f"peak value must be positive, got {m}")
    err = np.linalg.norm(x - x_true)
    if err == 0:
        return math.inf
    return float(20.0 * math.log10(x.shape[0] * m / err))


def _local_mean(img):
    return ndimage.gaussian_filter(img, SSIM_SIGMA, mode="reflect", radius=SSIM_RADIUS)


def ssim(x, x_true, m=None):
    """Mean structural similarity with an 11x11 Gaussian window (std 1.5).

    Borders use symmetric (half-sample) reflection padding and every pixel
    contributes to the mean. ``m`` is the dynamic range, defaulting to
    ``max(x_true)``.
    """
    x, y = _pair(x, x_true)
    if m is None:
        m = float(y.max())
    c1 = (SSIM_K1 * m) ** 2
    c2 = (SSIM_K2 * m) ** 2
    mx, my = _local_mean(x), _local_mean(y)
    sxx = _local_mean(x * x) - mx * mx
    syy = _local_mean(y * y) - my * my
    sxy = _local_mean(x * y) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def compute_metrics(x, x_true, m=None):
    return MetricsReport(rre(x, x_true), psnr(x, x_true, m), ssim(x, x_true, m))
