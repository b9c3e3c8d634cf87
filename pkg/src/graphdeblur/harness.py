"""Experiment plumbing shared by the command line and the demos.

Covers PSF descriptors, layered configuration (defaults, config file,
command-line flags), mu sweeps scored against a ground truth and the
four-method comparison.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field


from .admm import METHODS, AdmmConfig, admm_deblur, regularization_operator
from .core import as_image
from .errors import ConfigurationError
from .graph import GraphConfig
from .imageio import read_image
from .metrics import compute_metrics
from .reference import compute_reference
from .spectral import Psf, bccb_apply, psf_to_spectrum
from .synthetic import add_noise, average_psf, gaussian_psf, motion_psf

__all__ = [
    "DEFAULTS",
    "ExperimentConfig",
    "SweepRow",
    "sweep_mu",
    "blur_image",
    "compare_methods",
    "thread_limit",
]

log = logging.getLogger(__name__)

#: Parameter values used unless overridden.
DEFAULTS = {"R": 10, "sigma": 1e-2, "rho": 1e-1, "tau": 1e-4, "K": 3000}


def thread_limit():
    """Worker cap from ``GRAPHDEBLUR_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("GRAPHDEBLUR_THREADS", "1")))
    except ValueError:
        return 1


def _parse_pair(text, kinds, flag):
    parts = str(text).split(":")
    if not 1 <= len(parts) <= len(kinds):
        raise ConfigurationError(f"cannot parse {flag} value {text!r}")
    try:
        return [kind(p) for kind, p in zip(kinds, parts)]
    except ValueError:
        raise ConfigurationError(f"cannot parse {flag} value {text!r}") from None


@dataclass
class ExperimentConfig:
    image: str = None
    psf: str = None
    psf_gaussian: str = None
    psf_average: int = None
    psf_motion: str = None
    noise_level: float = 0.0
    seed: int = 0
    methods: tuple = ("graph",)
    R: int = DEFAULTS["R"]
    sigma: float = DEFAULTS["sigma"]
    rho: float = DEFAULTS["rho"]
    tau: float = DEFAULTS["tau"]
    K: int = DEFAULTS["K"]
    mu: float = None
    mus: tuple = ()
    truth: str = None
    out: str = "."
    from_image: str = None

    @classmethod
    def layered(cls, file_values=None, cli_values=None):
        """Defaults, then config-file values, then command-line values."""
        names = {f.name for f in dataclasses.fields(cls)}
        merged = {}
        for layer in (file_values or {}, cli_values or {}):
            unknown = set(layer) - names
            if unknown:
                raise ConfigurationError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
            merged.update({k: v for k, v in layer.items() if v is not None})
        if isinstance(merged.get("methods"), str):
            merged["methods"] = (merged["methods"],)
        if "methods" in merged:
            merged["methods"] = tuple(merged["methods"])
        if "mus" in merged:
            merged["mus"] = tuple(float(m) for m in merged["mus"])
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path, cli_values=None):
        with open(path) as fh:
            return cls.layered(json.load(fh), cli_values)

    def validate(self):
        if self.noise_level < 0:
            raise ConfigurationError(f"noise level must be non-negative, got {self.noise_level}")
        for name in ("sigma", "rho", "tau"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.R) != self.R or self.R < 1 or int(self.K) != self.K or self.K < 1:
            raise ConfigurationError(f"R and K must be positive integers, got R={self.R}, K={self.K}")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigurationError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if self.mu is not None and not self.mu > 0:
            raise ConfigurationError(f"mu must be positive, got {self.mu}")
        specs = [self.psf, self.psf_gaussian, self.psf_average, self.psf_motion]
        if sum(s is not None for s in specs) > 1:
            raise ConfigurationError("give exactly one of --psf, --psf-gaussian, --psf-average, --psf-motion")

    def has_psf(self):
        return any(s is not None for s in (self.psf, self.psf_gaussian, self.psf_average, self.psf_motion))

    def make_psf(self):
        if self.psf is not None:
            return Psf(read_image(self.psf))
        if self.psf_gaussian is not None:
            std, size = _parse_pair(self.psf_gaussian, (float, int), "--psf-gaussian")
            return gaussian_psf(std, size)
        if self.psf_average is not None:
            return average_psf(int(self.psf_average))
        if self.psf_motion is not None:
            length, *angle = _parse_pair(self.psf_motion, (int, float), "--psf-motion")
            return motion_psf(length, *angle)
        raise ConfigurationError("no PSF given: use --psf, --psf-gaussian, --psf-average or --psf-motion")

    def psf_descriptor(self):
        if self.psf is not None:
            return {"kind": "file", "path": str(self.psf)}
        if self.psf_gaussian is not None:
            std, size = _parse_pair(self.psf_gaussian, (float, int), "--psf-gaussian")
            return {"kind": "gaussian", "std": std, "size": size}
        if self.psf_average is not None:
            return {"kind": "average", "size": int(self.psf_average)}
        if self.psf_motion is not None:
            length, *angle = _parse_pair(self.psf_motion, (int, float), "--psf-motion")
            return {"kind": "motion", "length": length, "angle": angle[0] if angle else 0.0}
        return None

    def graph_config(self):
        return GraphConfig(int(self.R), float(self.sigma))

    def admm_config(self, mu=None):
        mu = self.mu if mu is None else mu
        if mu is None:
            raise ConfigurationError("the l2-l1 methods need --mu")
        return AdmmConfig(mu=float(mu), rho=self.rho, tau=self.tau, K=int(self.K))


def blur_image(x, psf, noise_level, seed):
    """Return ``(b_delta, b)``: the noisy blurred image and its clean blur."""
    x = as_image(x)
    b = bccb_apply(psf_to_spectrum(psf, x.shape[0]), x)
    return add_noise(b, noise_level, seed), b


@dataclass
class SweepRow:
    mu: float
    rre: float
    psnr: float
    ssim: float
    iterations: int
    best: bool = False


@dataclass
class SweepResult:
    method: str
    rows: list
    images: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)

    @property
    def best(self):
        return next(r for r in self.rows if r.best)


def sweep_mu(method, psf, b_delta, x_true, mus, graph_cfg=None, rho=0.1, tau=1e-4, K=3000,
             reference=None, workers=None):
    """Deblur with each ``mu`` and score against ``x_true``.

    The operator ``L`` is built once and shared by every run. The row with
    the smallest RRE is flagged ``best``. Runs are independent, so they may
    go to a thread pool of ``workers`` threads; results are keyed by ``mu``.
    """
    mus = [float(m) for m in mus]
    if not mus:
        raise ConfigurationError("mu list is empty")
    if method == "tikhonov":
        raise ConfigurationError("tikhonov has no hand-tuned mu to sweep")
    b = as_image(b_delta)
    x_true = as_image(x_true, b.shape[0])
    psf = psf if isinstance(psf, Psf) else Psf(psf)
    if reference is None and method == "graph":
        reference = compute_reference(psf, b)
    L = regularization_operator(method, b.shape[0], reference, graph_cfg, x_true)
    sigma = psf_to_spectrum(psf, b.shape[0])

    def run(mu):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return admm_deblur(sigma, L, b, AdmmConfig(mu=mu, rho=rho, tau=tau, K=K))

    workers = workers or thread_limit()
    if workers > 1 and len(mus) > 1:
        with ThreadPoolExecutor(min(workers, len(mus))) as pool:
            outputs = list(pool.map(run, mus))
    else:
        outputs = [run(mu) for mu in mus]

    result = SweepResult(method, [])
    for mu, (x, trace) in zip(mus, outputs):
        m = compute_metrics(x, x_true)
        result.rows.append(SweepRow(mu, m.rre, m.psnr, m.ssim, len(trace)))
        result.images[mu] = x
        result.traces[mu] = trace
        log.info("%s mu=%.3e rre=%.5f ssim=%.5f iterations=%d", method, mu, m.rre, m.ssim, len(trace))
    best = min(range(len(mus)), key=lambda i: result.rows[i].rre)
    result.rows[best].best = True
    return result


def compare_methods(x_true, psf, b_delta, mu_grids, graph_cfg=None, rho=0.1, tau=1e-4, K=3000,
                    workers=None):
    """Run Tikhonov and every swept l2-l1 method on the same data.

    ``mu_grids`` maps a method name to its mu list. Returns a dict mapping
    method to ``(image, MetricsReport, chosen_mu)``.
    """
    x_true = as_image(x_true)
    reference = compute_reference(psf, b_delta)
    table = {"tikhonov": (reference.x_star, compute_metrics(reference.x_star, x_true), reference.mu_gcv)}
    for method, mus in mu_grids.items():
        sweep = sweep_mu(method, psf, b_delta, x_true, mus, graph_cfg, rho, tau, K,
                         reference=reference, workers=workers)
        best = sweep.best
        table[method] = (sweep.images[best.mu], compute_metrics(sweep.images[best.mu], x_true), best.mu)
    return table
