import warnings

import numpy as np
import pytest

from graphdeblur import (
    DegenerateGCVError,
    Psf,
    add_noise,
    bccb_apply,
    bccb_solve_filtered,
    build_tv,
    compute_reference,
    gaussian_psf,
    gcv_minimize,
    gcv_value,
    phantom,
    psf_to_spectrum,
    rre,
)
from graphdeblur.reference import gcv_terms, probe_grid, write_probe_csv
from graphdeblur.spectral import fft2

from conftest import dense_blur, dense_gcv, dense_gcv_literal, dense_tv, well_conditioned_psf


@pytest.fixture
def instance(rng):
    n = 8
    psf = well_conditioned_psf(rng)
    b = rng.random((n, n))
    tv = build_tv(n)
    return n, psf, b, psf_to_spectrum(psf, n), tv


def test_gcv_matches_dense_over_probe_grid(instance):
    n, psf, b, s, tv = instance
    A, L = dense_blur(psf, n), dense_tv(n)
    b_hat = fft2(b)
    for mu in probe_grid():
        got = gcv_value(s, tv.lambda_x, tv.lambda_y, b_hat, mu)
        assert got == pytest.approx(dense_gcv(A, L, b.ravel(), mu), rel=1e-10)
        if mu >= 1e-2:
            assert got == pytest.approx(dense_gcv_literal(A, L, b.ravel(), mu), rel=1e-10)


def test_gcv_large_mu_limit(instance):
    n, psf, b, s, tv = instance
    b_hat = fft2(b)
    N = n * n
    limit = (np.sum(np.abs(b_hat) ** 2) - np.abs(b_hat[0, 0]) ** 2) / N / (N - 1) ** 2
    assert gcv_value(s, tv.lambda_x, tv.lambda_y, b_hat, 1e12) == pytest.approx(limit, rel=1e-9)


def test_gcv_zero_data(instance):
    n, psf, b, s, tv = instance
    for mu in (1e-8, 1.0, 1e3):
        assert gcv_value(s, tv.lambda_x, tv.lambda_y, np.zeros((n, n), complex), mu) == 0.0


def test_gcv_degenerate_trace():
    n = 4
    tv = build_tv(n)
    with pytest.raises(DegenerateGCVError):
        gcv_value(np.ones((n, n), complex), tv.lambda_x, tv.lambda_y, np.ones((n, n)), 1e-300)


def test_gcv_terms_against_filter_formula(instance):
    n, psf, b, s, tv = instance
    b_hat = fft2(b)
    S = np.abs(s) ** 2
    a = tv.gram_spectrum
    for mu in probe_grid():
        if mu < 1e-3:
            continue
        f = S / (S + mu * a)
        r2 = np.sum(np.abs((f - 1) * b_hat) ** 2) / b_hat.size
        t = np.sum(1 - f)
        assert gcv_value(s, tv.lambda_x, tv.lambda_y, b_hat, mu) == pytest.approx(r2 / t**2, rel=1e-12)


def test_gcv_terms_monotone(instance):
    n, psf, b, s, tv = instance
    b_hat = fft2(b)
    terms = np.array([gcv_terms(s, tv.lambda_x, tv.lambda_y, b_hat, mu) for mu in probe_grid()])
    r2, t = terms[:, 0], terms[:, 1]
    assert np.all(np.diff(t) > 0)
    assert np.all(np.diff(r2) >= 0)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_spectral_tikhonov_matches_dense_on_grid(rng, n):
    psf = well_conditioned_psf(rng)
    A, L = dense_blur(psf, n), dense_tv(n)
    b = rng.random((n, n))
    s, tv = psf_to_spectrum(psf, n), build_tv(n)
    for mu in probe_grid()[::7]:
        expect = np.linalg.solve(A.T @ A + mu * L.T @ L, A.T @ b.ravel())
        got = bccb_solve_filtered(s, tv.lambda_x, tv.lambda_y, mu, fft2(b)).ravel()
        assert np.linalg.norm(got - expect) <= 1e-10 * np.linalg.norm(expect)


def flat_spectrum_data(n, seed=0):
    """Real image whose DFT has unit modulus at every nonzero frequency."""
    rng = np.random.default_rng(seed)
    phase = np.exp(2j * np.pi * rng.random((n, n)))
    b = np.fft.ifft2(phase).real
    b_hat = np.fft.fft2(b)
    b_hat = b_hat / np.abs(b_hat)
    b_hat[0, 0] = 0
    return np.fft.ifft2(b_hat).real


def test_minimizer_at_right_boundary():
    n = 8
    tv = build_tv(n)
    b_hat = fft2(flat_spectrum_data(n))
    ones = np.ones((n, n), complex)
    g = [gcv_value(ones, tv.lambda_x, tv.lambda_y, b_hat, mu) for mu in probe_grid()]
    assert np.all(np.diff(g) < 0)
    with pytest.warns(RuntimeWarning, match="boundary"):
        res = gcv_minimize(ones, tv.lambda_x, tv.lambda_y, b_hat)
    assert res.mu_gcv == pytest.approx(1e2)


def test_noiseless_invertible_blur_picks_smallest_mu():
    n = 8
    psf = gaussian_psf(1.0, 3)
    s, tv = psf_to_spectrum(psf, n), build_tv(n)
    b = dense_blur(psf, n) @ phantom(n).ravel()
    A, L = dense_blur(psf, n), dense_tv(n)
    grid = probe_grid()
    dense = [dense_gcv(A, L, b, mu) for mu in grid]
    assert np.all(np.diff(dense) > 0)
    with pytest.warns(RuntimeWarning):
        res = gcv_minimize(s, tv.lambda_x, tv.lambda_y, fft2(b.reshape(n, n)))
    assert res.mu_gcv == grid[0]


def test_minimizer_matches_exhaustive_grid():
    n = 16
    x = phantom(n)
    psf = gaussian_psf(1.2, 5)
    s, tv = psf_to_spectrum(psf, n), build_tv(n)
    b_hat = fft2(add_noise(bccb_apply(s, x), 0.01, seed=5))
    res = gcv_minimize(s, tv.lambda_x, tv.lambda_y, b_hat)
    fine = np.logspace(-12, 2, 10_000)
    g = np.array([gcv_value(s, tv.lambda_x, tv.lambda_y, b_hat, mu) for mu in fine])
    j = int(np.argmin(g))
    step = np.log10(fine[1] / fine[0])
    assert abs(np.log10(res.mu_gcv) - np.log10(fine[j])) <= step
    assert res.g_value <= g[j] * (1 + 1e-12)
    assert all(res.g_value <= gval for _, gval in res.evaluations)
    assert res.mu_gcv > 0


def test_reference_identity_blur():
    x = phantom(32)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = compute_reference(Psf([[1.0]]), x)
    assert rre(res.x_star, x) <= 1e-3


def test_reference_improves_on_data():
    n = 64
    x = phantom(n)
    psf = gaussian_psf(2.0, 9)
    b = add_noise(bccb_apply(psf_to_spectrum(psf, n), x), 0.01, seed=1)
    res = compute_reference(psf, b)
    assert rre(res.x_star, x) < rre(b, x)


@pytest.mark.parametrize("psf", [gaussian_psf(1.5, 7), Psf(np.arange(1.0, 7.0).reshape(2, 3))])
def test_reference_constant_image(psf):
    x = np.full((16, 16), 0.7)
    b = bccb_apply(psf_to_spectrum(psf, 16), x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = compute_reference(psf, b)
    np.testing.assert_allclose(res.x_star, x, atol=1e-8)


def test_reference_keeps_negative_values():
    n = 32
    x = phantom(n)
    x[x < 0.2] = 0.0
    psf = gaussian_psf(2.0, 9)
    b = add_noise(bccb_apply(psf_to_spectrum(psf, n), x), 0.05, seed=2)
    assert compute_reference(psf, b).x_star.min() < 0


def test_probe_csv(tmp_path):
    psf = gaussian_psf(1.5, 5)
    b = add_noise(bccb_apply(psf_to_spectrum(psf, 16), phantom(16)), 0.01, 5)
    s, tv = psf_to_spectrum(psf, 16), build_tv(16)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = gcv_minimize(s, tv.lambda_x, tv.lambda_y, fft2(b))
    path = tmp_path / "probes.csv"
    write_probe_csv(res, path)
    rows = path.read_text().splitlines()
    assert rows[0] == "mu,g"
    assert len(rows) == len(res.evaluations) + 1
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data[np.argmin(data[:, 1]), 0] == res.mu_gcv
