"""Command-line front end: ``graphdeblur {blur,deblur,graph,sweep-mu}``.

Every command reads its parameters from, in increasing priority, built-in
defaults, an optional ``--config`` JSON file and the command-line flags.
Images move between stages as GLF1 files so nothing is quantized; an 8-bit
PGM preview is written next to each output image.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .admm import METHODS, run_method
from .errors import ConfigurationError, DivergenceError, GraphDeblurError
from .graph import build_adjacency, build_laplacian, write_matrix_market
from .harness import ExperimentConfig, blur_image, sweep_mu
from .imageio import read_image, write_image
from .metrics import compute_metrics
from .reference import compute_reference, write_probe_csv
from .synthetic import NOISE_GENERATOR

log = logging.getLogger("graphdeblur")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# command-line dest -> ExperimentConfig field
_FIELD_FOR = {
    "image": "image", "psf": "psf", "psf_gaussian": "psf_gaussian", "psf_average": "psf_average",
    "psf_motion": "psf_motion", "noise": "noise_level", "seed": "seed", "method": "methods",
    "R": "R", "sigma": "sigma", "rho": "rho", "tau": "tau", "maxit": "K", "mu": "mu",
    "mus": "mus", "truth": "truth", "out": "out", "from_image": "from_image",
}


def _mu_list(text):
    try:
        values = [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse mu list {text!r}") from None
    return values


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="JSON", help="configuration file; flags override its values")
    p.add_argument("--out", metavar="DIR", help="output directory (default: current directory)")
    p.add_argument("--image", metavar="PATH", help="input image (PGM, GLF1 or .npy)")
    psf = p.add_argument_group("point spread function (pick one)")
    psf.add_argument("--psf", metavar="PATH", help="PSF image file")
    psf.add_argument("--psf-gaussian", metavar="STD:SIZE", help="Gaussian PSF")
    psf.add_argument("--psf-average", metavar="SIZE", type=int, help="SIZE x SIZE box PSF")
    psf.add_argument("--psf-motion", metavar="LEN[:ANGLE]", help="linear motion PSF, angle in degrees")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _solver_flags(p):
    p.add_argument("--R", type=int, help="graph neighbourhood radius (default 10)")
    p.add_argument("--sigma", type=float, help="graph weight scale (default 1e-2)")
    p.add_argument("--rho", type=float, help="ADMM penalty (default 0.1)")
    p.add_argument("--tau", type=float, help="ADMM stopping tolerance (default 1e-4)")
    p.add_argument("--maxit", type=int, help="ADMM iteration cap K (default 3000)")
    p.add_argument("--truth", metavar="PATH", help="exact image, for metrics and graph_oracle")


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="graphdeblur", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blur", parents=[common], help="blur an image and add seeded white noise")
    p.add_argument("--noise", type=float, help="noise norm as a fraction of ||b|| (default 0)")
    p.add_argument("--seed", type=int, help="noise seed (default 0)")

    p = sub.add_parser("deblur", parents=[common], help="reconstruct a blurred image")
    p.add_argument("--method", choices=METHODS, help="reconstruction method (default graph)")
    p.add_argument("--mu", type=float, help="regularization weight for the l2-l1 methods")
    _solver_flags(p)

    p = sub.add_parser("graph", parents=[common], help="build and export the graph Laplacian")
    p.add_argument("--R", type=int, help="graph neighbourhood radius (default 10)")
    p.add_argument("--sigma", type=float, help="graph weight scale (default 1e-2)")
    p.add_argument("--from-image", metavar="PATH", help="weight the graph with this image directly")

    p = sub.add_parser("sweep-mu", parents=[common], help="score a list of mu values against the truth")
    p.add_argument("--method", choices=[m for m in METHODS if m != "tikhonov"],
                   help="method to sweep (default graph)")
    p.add_argument("--mus", type=_mu_list, metavar="LIST", help="comma-separated mu values")
    _solver_flags(p)
    return parser


def _config(args):
    cli = {}
    for dest, name in _FIELD_FOR.items():
        value = getattr(args, dest, None)
        if value is not None:
            cli[name] = value
    if args.config:
        return ExperimentConfig.from_json(args.config, cli)
    return ExperimentConfig.layered(None, cli)


def _read(path, what):
    if path is None:
        raise ConfigurationError(f"missing --{what}")
    img = read_image(path)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ConfigurationError(f"{path}: images must be square, got shape {img.shape}")
    return img


def _load_psf(cfg, n):
    psf = cfg.make_psf()
    rows, cols = psf.data.shape
    if rows > n or cols > n:
        raise ConfigurationError(f"PSF of size {rows}x{cols} does not fit a {n}x{n} image")
    return psf


def _write_output(out, stem, img):
    write_image(out / f"{stem}.glf", img)
    write_image(out / f"{stem}.pgm", img)


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_metrics(path, method, m):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "rre", "psnr", "ssim"])
        w.writerow([method, repr(m.rre), repr(m.psnr), repr(m.ssim)])


def cmd_blur(cfg):
    x = _read(cfg.image, "image")
    psf = _load_psf(cfg, x.shape[0])
    out = _outdir(cfg)
    b_delta, b = blur_image(x, psf, cfg.noise_level, cfg.seed)
    b_norm = float(np.linalg.norm(b))
    delta = cfg.noise_level * b_norm
    _write_output(out, "blurred", b_delta)
    _write_json(out / "blurred.json", {
        "delta": delta,
        "eta_norm": float(np.linalg.norm(b_delta - b)),
        "b_norm": b_norm,
        "noise_level": cfg.noise_level,
        "seed": cfg.seed,
        "generator": NOISE_GENERATOR,
        "psf": cfg.psf_descriptor(),
        "shape": list(x.shape),
    })
    print(f"wrote {out / 'blurred.glf'} (delta = {delta:.6e})")
    return 0


def cmd_deblur(cfg):
    b = _read(cfg.image, "image")
    n = b.shape[0]
    psf = _load_psf(cfg, n)
    truth = _truth(cfg, n)
    method = cfg.methods[0]
    if method == "graph_oracle" and truth is None:
        raise ConfigurationError("method graph_oracle needs --truth")
    admm_cfg = None if method == "tikhonov" else cfg.admm_config()
    out = _outdir(cfg)
    result = run_method(method, psf, b, graph_cfg=cfg.graph_config(), admm_cfg=admm_cfg, x_true=truth)
    _write_output(out, method, result.x)
    if result.trace is not None:
        result.trace.write_csv(out / f"{method}_trace.csv")
        state = "converged" if result.trace.converged else "stopped at K"
        print(f"{method}: {len(result.trace)} ADMM iterations ({state})")
    else:
        print(f"{method}: mu_GCV = {result.reference.mu_gcv!r}")
    if truth is not None:
        m = compute_metrics(result.x, truth)
        _write_metrics(out / f"{method}_metrics.csv", method, m)
        print(f"rre={m.rre:.6f} psnr={m.psnr:.4f} ssim={m.ssim:.6f}")
    return 0


def cmd_graph(cfg):
    gcfg = cfg.graph_config()
    out = _outdir(cfg)
    if cfg.from_image is not None:
        x_ref = _read(cfg.from_image, "from-image")
        L = build_laplacian(build_adjacency(x_ref, gcfg))
        write_matrix_market(out / "laplacian.mtx", L, comment=f"R={gcfg.R} sigma={gcfg.sigma!r}")
        print(f"wrote {out / 'laplacian.mtx'} ({L.shape[0]} nodes, {L.nnz} nonzeros)")
        return 0
    b = _read(cfg.image, "image")
    psf = _load_psf(cfg, b.shape[0])
    ref = compute_reference(psf, b)
    L = build_laplacian(build_adjacency(ref.x_star, gcfg))
    write_matrix_market(out / "laplacian.mtx", L, comment=f"R={gcfg.R} sigma={gcfg.sigma!r}")
    _write_output(out, "reference", ref.x_star)
    write_probe_csv(ref, out / "gcv_probes.csv")
    _write_json(out / "gcv.json", {
        "mu_gcv": ref.mu_gcv,
        "g_value": ref.g_value,
        "evaluations": len(ref.evaluations),
    })
    print(f"mu_GCV = {ref.mu_gcv!r}")
    print(f"wrote {out / 'laplacian.mtx'} ({L.shape[0]} nodes, {L.nnz} nonzeros)")
    return 0


def cmd_sweep_mu(cfg):
    b = _read(cfg.image, "image")
    n = b.shape[0]
    psf = _load_psf(cfg, n)
    truth = _truth(cfg, n)
    if truth is None:
        raise ConfigurationError("sweep-mu needs --truth")
    if not cfg.mus:
        raise ConfigurationError("sweep-mu needs a non-empty --mus list")
    method = cfg.methods[0]
    out = _outdir(cfg)
    sweep = sweep_mu(method, psf, b, truth, cfg.mus, cfg.graph_config(), cfg.rho, cfg.tau, int(cfg.K))
    path = out / f"sweep_{method}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mu", "rre", "psnr", "ssim", "iterations", "best"])
        for r in sweep.rows:
            w.writerow([repr(r.mu), repr(r.rre), repr(r.psnr), repr(r.ssim), r.iterations, int(r.best)])
            print(f"mu={r.mu:.3e} rre={r.rre:.6f} psnr={r.psnr:.4f} ssim={r.ssim:.6f}"
                  + ("  <- best" if r.best else ""))
    return 0


def _truth(cfg, n):
    if cfg.truth is None:
        return None
    truth = _read(cfg.truth, "truth")
    if truth.shape != (n, n):
        raise ConfigurationError(f"{cfg.truth}: truth is {truth.shape}, data is {(n, n)}")
    return truth


def _outdir(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


COMMANDS = {"blur": cmd_blur, "deblur": cmd_deblur, "graph": cmd_graph, "sweep-mu": cmd_sweep_mu}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        print(f"graphdeblur {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{name}: {exc.strerror}" if name and exc.strerror else str(exc)
        print(f"graphdeblur {args.command}: {detail}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"graphdeblur {args.command}: ADMM diverged: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except GraphDeblurError as exc:
        print(f"graphdeblur {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
