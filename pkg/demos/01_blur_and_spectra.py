"""
Periodic blur in the Fourier domain
===================================

A space-invariant blur with periodic boundaries is diagonalized by the 2-D
FFT, so applying it costs two transforms and a pointwise product.
"""

import numpy as np

from graphdeblur import add_noise, bccb_apply, build_tv, gaussian_psf, phantom, psf_to_spectrum

# a 64x64 piecewise-constant test image with values in [0, 1]
x = phantom(64)
print("image levels:", np.unique(x))

# the PSF is normalized to unit sum, so the zero frequency is exactly 1
psf = gaussian_psf(2.0, 9)
sigma = psf_to_spectrum(psf, 64)
print("sigma[0, 0] =", sigma[0, 0])
print("smallest |sigma|:", np.abs(sigma).min())

# blur, then add noise whose norm is 1% of the blurred image's norm
b = bccb_apply(sigma, x)
b_delta = add_noise(b, 0.01, seed=7)
print("relative noise:", np.linalg.norm(b_delta - b) / np.linalg.norm(b))

# the periodic first-difference operator has its own diagonal spectrum
tv = build_tv(4)
print("1-D difference spectrum at n=4:", np.round(tv.lambda_x[:, 0], 12))

# blurring lowers the total variation of the image
def total_variation(img):
    return np.abs(np.diff(img, axis=0)).sum() + np.abs(np.diff(img, axis=1)).sum()

print("TV before / after blur: %.1f / %.1f" % (total_variation(x), total_variation(b)))
