import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from graphdeblur import (
    AdmmConfig,
    DivergenceError,
    admm_deblur,
    bccb_apply,
    gaussian_psf,
    phantom,
    psf_to_spectrum,
    read_matrix_market,
    rre,
)
from graphdeblur import cli
from graphdeblur.admm import regularization_operator
from graphdeblur.imageio import read_image, write_image


def run(*args):
    return cli.main([str(a) for a in args])


def total_variation(img):
    return np.abs(np.diff(img, axis=0)).sum() + np.abs(np.diff(img, axis=1)).sum()


@pytest.fixture
def scene(tmp_path):
    x = phantom(16)
    write_image(tmp_path / "x.glf", x)
    assert run("blur", "--image", tmp_path / "x.glf", "--psf-gaussian", "1.0:5",
               "--noise", "0.01", "--seed", "7", "--out", tmp_path / "b") == 0
    return tmp_path, x


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_blur_identity_psf_without_noise(tmp_path, rng):
    x = rng.random((8, 8))
    write_image(tmp_path / "x.glf", x)
    assert run("blur", "--image", tmp_path / "x.glf", "--psf-average", 1, "--out", tmp_path) == 0
    np.testing.assert_allclose(read_image(tmp_path / "blurred.glf"), x, rtol=1e-14, atol=1e-15)


def test_blur_sidecar_and_smoothing(tmp_path):
    x = phantom(64)
    write_image(tmp_path / "x.pgm", x)
    x8 = read_image(tmp_path / "x.pgm")
    assert run("blur", "--image", tmp_path / "x.pgm", "--psf-gaussian", "2.0:9",
               "--noise", "0.05", "--seed", 3, "--out", tmp_path) == 0
    side = json.loads((tmp_path / "blurred.json").read_text())
    b = bccb_apply(psf_to_spectrum(gaussian_psf(2.0, 9), 64), x8)
    assert side["delta"] == pytest.approx(0.05 * np.linalg.norm(b), rel=1e-14)
    assert side["eta_norm"] == pytest.approx(side["delta"], rel=1e-13)
    assert side["seed"] == 3 and side["generator"] == "philox4x64-boxmuller-v1"
    assert side["psf"] == {"kind": "gaussian", "std": 2.0, "size": 9}
    assert total_variation(b) < total_variation(x8)
    assert (tmp_path / "blurred.pgm").exists()


def test_missing_input_names_the_path(tmp_path, capsys):
    assert run("blur", "--image", tmp_path / "nope.glf", "--psf-average", 3) == 2
    err = capsys.readouterr().err
    assert "nope.glf" in err and len(err.strip().splitlines()) == 1


@pytest.mark.parametrize("extra,message", [
    ([], "PSF"),
    (["--psf-average", 3, "--psf-gaussian", "1:3"], "exactly one"),
    (["--psf-gaussian", "abc"], "--psf-gaussian"),
    (["--psf-average", 40], "does not fit"),
    (["--psf-average", 3, "--noise", -1], "noise"),
])
def test_blur_configuration_errors(tmp_path, capsys, extra, message):
    write_image(tmp_path / "x.glf", np.ones((8, 8)))
    assert run("blur", "--image", tmp_path / "x.glf", *extra) == 2
    assert message in capsys.readouterr().err


def test_non_square_image_rejected_early(tmp_path, capsys):
    write_image(tmp_path / "x.glf", np.ones((4, 6)))
    assert run("deblur", "--image", tmp_path / "x.glf", "--psf-average", 3, "--mu", 1) == 2
    assert "square" in capsys.readouterr().err


def test_truth_shape_mismatch(scene, capsys):
    tmp, _ = scene
    write_image(tmp / "small.glf", np.ones((8, 8)))
    code = run("deblur", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5",
               "--method", "tv_l1", "--mu", 1e-3, "--truth", tmp / "small.glf")
    assert code == 2 and "truth" in capsys.readouterr().err


def test_tikhonov_on_identity_blur(tmp_path):
    x = phantom(16)
    write_image(tmp_path / "b.glf", x)
    with pytest.warns(RuntimeWarning):
        code = run("deblur", "--image", tmp_path / "b.glf", "--psf-average", 1,
                   "--method", "tikhonov", "--truth", tmp_path / "b.glf", "--out", tmp_path)
    assert code == 0
    assert rre(read_image(tmp_path / "tikhonov.glf"), x) <= 1e-6
    rows = read_csv(tmp_path / "tikhonov_metrics.csv")
    assert rows[0]["method"] == "tikhonov" and float(rows[0]["rre"]) <= 1e-6


def test_deblur_outputs_and_determinism(scene):
    tmp, x = scene
    args = ["deblur", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5", "--method", "graph",
            "--R", 2, "--mu", 1e-2, "--maxit", 200, "--truth", tmp / "x.glf"]
    assert run(*args, "--out", tmp / "r1") == 0
    assert run(*args, "--out", tmp / "r2") == 0
    for name in ("graph.glf", "graph.pgm", "graph_trace.csv", "graph_metrics.csv"):
        assert (tmp / "r1" / name).read_bytes() == (tmp / "r2" / name).read_bytes()
    rows = read_csv(tmp / "r1/graph_metrics.csv")
    assert float(rows[0]["rre"]) == pytest.approx(rre(read_image(tmp / "r1/graph.glf"), x), rel=1e-15)
    trace = read_csv(tmp / "r1/graph_trace.csv")
    assert list(trace[0]) == ["k", "res_xy", "res_zLy", "res_xw", "objective", "relchange"]


def test_oracle_requires_truth(scene, capsys):
    tmp, _ = scene
    code = run("deblur", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5",
               "--method", "graph_oracle", "--mu", 1e-2)
    assert code == 2 and "--truth" in capsys.readouterr().err


def test_divergence_gives_nonzero_exit(scene, monkeypatch, capsys):
    tmp, _ = scene

    def boom(*a, **k):
        raise DivergenceError("blew up", 5)

    monkeypatch.setattr(cli, "run_method", boom)
    code = run("deblur", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5", "--mu", 1e-2)
    assert code == cli.EXIT_NUMERIC != 0
    assert "diverged" in capsys.readouterr().err


def test_graph_command(scene, capsys):
    tmp, _ = scene
    assert run("graph", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5",
               "--R", 2, "--out", tmp / "g") == 0
    printed = capsys.readouterr().out
    mu = float(printed.split("mu_GCV = ")[1].split()[0])
    probes = np.loadtxt(tmp / "g/gcv_probes.csv", delimiter=",", skiprows=1)
    assert probes[np.argmin(probes[:, 1]), 0] == mu
    assert json.loads((tmp / "g/gcv.json").read_text())["mu_gcv"] == mu
    L = read_matrix_market(tmp / "g/laplacian.mtx")
    assert L.shape == (256, 256) and (L != L.T).nnz == 0
    assert read_image(tmp / "g/reference.glf").shape == (16, 16)


def test_graph_from_constant_image(tmp_path):
    write_image(tmp_path / "c.glf", np.full((6, 6), 0.4))
    assert run("graph", "--from-image", tmp_path / "c.glf", "--R", 2, "--out", tmp_path) == 0
    L = read_matrix_market(tmp_path / "laplacian.mtx")
    assert np.abs(np.asarray(L.sum(axis=1))).max() <= 1e-12


def test_sweep_mu(scene):
    tmp, x = scene
    base = ["sweep-mu", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5",
            "--method", "tv_l1", "--truth", tmp / "x.glf"]
    assert run(*base, "--mus", "1e-3", "--out", tmp / "s1") == 0
    assert len(read_csv(tmp / "s1/sweep_tv_l1.csv")) == 1
    assert run(*base, "--mus", "1e-4,1e-3,1e-2", "--out", tmp / "s3") == 0
    rows = read_csv(tmp / "s3/sweep_tv_l1.csv")
    assert [float(r["mu"]) for r in rows] == [1e-4, 1e-3, 1e-2]
    rres = [float(r["rre"]) for r in rows]
    assert [int(r["best"]) for r in rows] == [int(i == np.argmin(rres)) for i in range(3)]


def test_sweep_tiny_mu_approaches_unregularized_run(scene):
    tmp, x = scene
    assert run("sweep-mu", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5", "--method", "tv_l1",
               "--truth", tmp / "x.glf", "--mus", "1e-12", "--maxit", 300, "--out", tmp) == 0
    b = read_image(tmp / "b/blurred.glf")
    x0, _ = admm_deblur(psf_to_spectrum(gaussian_psf(1.0, 5), 16), regularization_operator("tv_l1", 16), b,
                        AdmmConfig(mu=0.0, K=300))
    got = float(read_csv(tmp / "sweep_tv_l1.csv")[0]["rre"])
    assert got == pytest.approx(rre(x0, x), rel=1e-6)


@pytest.mark.parametrize("extra,message", [([], "--truth"), (["--truth", "T"], "--mus")])
def test_sweep_requires_truth_and_mus(scene, capsys, extra, message):
    tmp, _ = scene
    extra = [tmp / "x.glf" if e == "T" else e for e in extra]
    assert run("sweep-mu", "--image", tmp / "b/blurred.glf", "--psf-gaussian", "1.0:5", *extra) == 2
    assert message in capsys.readouterr().err


def test_config_file_precedence(scene, tmp_path):
    tmp, _ = scene
    cfg_path = tmp / "cfg.json"
    cfg_path.write_text(json.dumps({"image": str(tmp / "x.glf"), "psf_gaussian": "1.0:5",
                                    "noise_level": 0.02, "seed": 5, "out": str(tmp / "c1")}))
    assert run("blur", "--config", cfg_path) == 0
    side = json.loads((tmp / "c1/blurred.json").read_text())
    assert side["seed"] == 5 and side["noise_level"] == 0.02
    assert run("blur", "--config", cfg_path, "--seed", 9, "--out", tmp / "c2") == 0
    side = json.loads((tmp / "c2/blurred.json").read_text())
    assert side["seed"] == 9 and side["noise_level"] == 0.02


def test_unknown_config_key(tmp_path, capsys):
    (tmp_path / "cfg.json").write_text(json.dumps({"bogus": 1}))
    assert run("blur", "--config", tmp_path / "cfg.json") == 2
    assert "bogus" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "graphdeblur", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "graphdeblur" in out.stdout
