"""
Four reconstructions side by side
=================================

Tikhonov with GCV, l1 of finite differences, l1 of the data-driven graph
Laplacian and l1 of the Laplacian built from the exact image. Each l1
method gets the best mu of a short sweep. Images are written as PGM files.
"""

import sys
import tempfile
import warnings
from pathlib import Path

from graphdeblur import GraphConfig, add_noise, bccb_apply, gaussian_psf, phantom, psf_to_spectrum
from graphdeblur.harness import compare_methods
from graphdeblur.imageio import write_pgm

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="graphdeblur-"))
out.mkdir(parents=True, exist_ok=True)

n = 64
x = phantom(n)
psf = gaussian_psf(2.0, 9)
b = add_noise(bccb_apply(psf_to_spectrum(psf, n), x), 0.01, seed=7)
write_pgm(out / "truth.pgm", x)
write_pgm(out / "blurred.pgm", b)

grids = {"tv_l1": [3e-4, 1e-3, 3e-3], "graph": [3e-3, 1e-2, 3e-2], "graph_oracle": [1e-2, 1e-1]}
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    table = compare_methods(x, psf, b, grids, GraphConfig(R=3, sigma=1e-2))

print("%-13s %9s %8s %8s %8s" % ("method", "mu", "RRE", "PSNR", "SSIM"))
for method, (img, m, mu) in table.items():
    print("%-13s %9.1e %8.4f %8.2f %8.4f" % (method, mu, m.rre, m.psnr, m.ssim))
    write_pgm(out / f"{method}.pgm", img)
print("images written to", out)
