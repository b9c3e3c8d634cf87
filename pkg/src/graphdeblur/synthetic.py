"""Synthetic test data: phantoms, builtin PSFs and reproducible noise."""

from __future__ import annotations

import math

import numpy as np

from .core import as_image
from .errors import ConfigurationError
from .spectral import Psf

__all__ = [
    "NOISE_GENERATOR",
    "standard_normal",
    "add_noise",
    "gaussian_psf",
    "average_psf",
    "motion_psf",
    "phantom",
]

#: Identity of the noise stream, recorded in sidecar files.
NOISE_GENERATOR = "philox4x64-boxmuller-v1"


def standard_normal(size, seed):
    """Deterministic standard normal draws.

    Uniforms come from the Philox 4x64 counter-based generator and are
    mapped to normals with the Box-Muller transform, so the stream depends
    only on ``seed``.
    """
    bitgen = np.random.Philox(np.random.SeedSequence(int(seed)))
    gen = np.random.Generator(bitgen)
    pairs = (size + 1) // 2
    # consecutive uniforms form one pair, so shorter draws are prefixes of longer ones
    u = gen.random(2 * pairs)
    u1 = 1.0 - u[0::2]  # (0, 1]
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:size]


def add_noise(b, level, seed):
    """Return ``b + eta`` with ``||eta|| = level * ||b||`` exactly.

    Also works on non-square arrays; the shape of ``b`` is preserved.
    """
    if level < 0:
        raise ConfigurationError(f"noise level must be non-negative, got {level}")
    b = np.asarray(b, dtype=np.float64)
    if level == 0:
        return b.copy()
    eta = standard_normal(b.size, seed).reshape(b.shape)
    eta *= level * np.linalg.norm(b) / np.linalg.norm(eta)
    return b + eta


def gaussian_psf(std, size):
    """Isotropic Gaussian kernel of shape ``(size, size)``."""
    if not std > 0 or size < 1:
        raise ConfigurationError(f"invalid Gaussian PSF parameters std={std}, size={size}")
    t = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(t**2) / (2.0 * std**2))
    return Psf(np.outer(g, g))


def average_psf(size):
    """Uniform ``size x size`` box blur."""
    if size < 1:
        raise ConfigurationError(f"invalid average PSF size {size}")
    return Psf(np.ones((size, size)))


def motion_psf(length, angle=0.0):
    """Linear motion blur of ``length`` pixels at ``angle`` degrees.

    Samples a segment centered on the kernel center with bilinear weights.
    """
    if length < 1:
        raise ConfigurationError(f"invalid motion length {length}")
    size = int(length) if int(length) % 2 == 1 else int(length) + 1
    c = size // 2
    kernel = np.zeros((size, size))
    theta = math.radians(angle)
    steps = max(2, 4 * size)
    for t in np.linspace(-(length - 1) / 2.0, (length - 1) / 2.0, steps):
        r = c - t * math.sin(theta)
        q = c + t * math.cos(theta)
        r0, q0 = int(math.floor(r)), int(math.floor(q))
        fr, fq = r - r0, q - q0
        for dr, wr in ((0, 1 - fr), (1, fr)):
            for dq, wq in ((0, 1 - fq), (1, fq)):
                if 0 <= r0 + dr < size and 0 <= q0 + dq < size:
                    kernel[r0 + dr, q0 + dq] += wr * wq
    return Psf(kernel, center=(c, c))


def phantom(n, kind="blocks"):
    """Piecewise-constant test image with values in ``[0, 1]``.

    ``kind`` is ``"blocks"`` (rectangles, a disk and a thin bar on a dim
    background) or ``"constant"``.
    """
    if n < 4:
        raise ConfigurationError(f"phantom needs n >= 4, got {n}")
    if kind == "constant":
        return np.full((n, n), 0.5)
    if kind != "blocks":
        raise ConfigurationError(f"unknown phantom kind {kind!r}")
    img = np.full((n, n), 0.1)
    r, c = np.mgrid[0:n, 0:n] / n
    img[(r >= 0.12) & (r < 0.45) & (c >= 0.10) & (c < 0.55)] = 0.6
    img[(r >= 0.20) & (r < 0.32) & (c >= 0.22) & (c < 0.40)] = 0.9
    img[(r - 0.68) ** 2 + (c - 0.68) ** 2 < 0.2**2] = 1.0
    img[(r - 0.68) ** 2 + (c - 0.68) ** 2 < 0.08**2] = 0.35
    img[(r >= 0.60) & (r < 0.90) & (c >= 0.15) & (c < 0.22)] = 0.8
    img[(r >= 0.05) & (r < 0.10) & (c >= 0.62) & (c < 0.95)] = 0.45
    return as_image(img)
