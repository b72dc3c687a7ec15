import json
import subprocess
import sys

import numpy as np
import pytest

from twlp.cli import main, parse_config, UsageError
from twlp.imageio import read_image, write_pgm

X = np.arange(64)


def _decode(path):
    px, _ = read_image(path)
    side = json.loads(path.with_name(path.name + ".json").read_text())
    norm = side["renormalization"]
    return norm["scale"] * px + norm["offset"]


def _corr(a, b):
    a, b = a - a.mean(), b - b.mean()
    return float(np.sum(a * b) / np.sqrt(np.sum(a * a) * np.sum(b * b)))


@pytest.fixture
def stripe(tmp_path):
    theta = 2 * np.pi * 4 * (X[:, None] + X[None, :]) / 64
    path = tmp_path / "stripe.pgm"
    write_pgm(path, np.rint(127.5 * (1 + np.cos(theta))).astype(int), 255)
    return path, theta


def test_constant_image_filters_to_zero(tmp_path):
    src = tmp_path / "flat.pgm"
    write_pgm(src, np.full((16, 16), 77), 255)
    out = tmp_path / "out.pgm"
    assert main(["filter", "--input", str(src), "--output", str(out)]) == 0
    assert np.allclose(_decode(out), 0.0, atol=1e-9)


def test_stripe_is_phase_shifted(stripe, tmp_path):
    src, theta = stripe
    out = tmp_path / "out.pgm"
    assert main(["filter", "--input", str(src), "--output", str(out)]) == 0
    assert _corr(_decode(out), np.sin(theta)) > 0.999


def test_filter_twice_negates(stripe, tmp_path):
    src, theta = stripe
    once, twice = tmp_path / "a.pgm", tmp_path / "b.pgm"
    main(["filter", "--input", str(src), "--output", str(once)])
    main(["filter", "--input", str(once), "--output", str(twice)])
    assert _corr(_decode(twice), -np.cos(theta)) > 0.999


@pytest.mark.parametrize("mult", ["riesz1", "riesz2", "flag1", "flag2", "flag3"])
def test_other_multipliers_run(stripe, tmp_path, mult):
    src, _ = stripe
    out = tmp_path / "o.png"
    assert main(["filter", "--input", str(src), "--output", str(out), "--mult", mult]) == 0
    side = json.loads((tmp_path / "o.png.json").read_text())
    assert side["config"]["mult"] == mult


def test_non_power_of_two_needs_crop(tmp_path):
    src = tmp_path / "odd.pgm"
    write_pgm(src, np.random.default_rng(0).integers(0, 256, (20, 24)), 255)
    out = tmp_path / "o.pgm"
    assert main(["filter", "--input", str(src), "--output", str(out)]) == 2
    assert main(["filter", "--input", str(src), "--output", str(out), "--center-crop"]) == 0
    assert read_image(out)[0].shape == (16, 16)


def test_regions_legend(tmp_path):
    out = tmp_path / "r.pgm"
    assert main(["regions", "--n", "8", "--output", str(out)]) == 0
    legend = json.loads((tmp_path / "r.pgm.json").read_text())
    counts = legend["counts"]
    assert all(counts[k] > 0 for k in ("I", "II", "III", "IV", "V", "VI", "Nodal"))
    assert sum(counts.values()) == 64
    assert counts["Nodal"] == 21


def test_region_image_is_antipodal(tmp_path):
    out = tmp_path / "r.pgm"
    main(["regions", "--n", "16", "--output", str(out)])
    legend = json.loads((tmp_path / "r.pgm.json").read_text())
    inv = {v: k for k, v in legend["codes"].items()}
    codes, _ = read_image(out)
    sign = {"I": 1, "II": -1, "III": 1, "IV": -1, "V": 1, "VI": -1, "Nodal": 0}
    for i in range(1, 16):
        for j in range(1, 16):
            if 8 in (i, j):
                continue
            a = sign[inv[codes[i, j]]]
            b = sign[inv[codes[(-i) % 16, (-j) % 16]]]
            assert a == -b


def test_verify_single_suite(tmp_path):
    rep = tmp_path / "v.json"
    assert main(["verify", "--suite", "tht_isometry", "--report", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert [s["name"] for s in report["suites"]] == ["tht_isometry"]
    assert report["all_pass"]


def test_verify_unknown_suite():
    with pytest.raises(UsageError):
        parse_config(["verify", "--suite", "nope"])
    assert main(["verify", "--suite", "nope"]) == 2


def test_bad_seed_is_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "twlp.cli", "verify", "--seed", "abc"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2 and "--seed" in proc.stderr


@pytest.mark.parametrize(
    "argv",
    [
        ["filter", "--output", "x.pgm"],
        ["regions", "--n", "12", "--output", "x.pgm"],
        ["regions", "--q", "2", "--output", "x.pgm"],
        ["verify", "--h", "0"],
        ["verify", "--N1", "0"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == 2


def test_decompose_zero_image(tmp_path):
    src = tmp_path / "z.pgm"
    write_pgm(src, np.zeros((32, 32), int), 255)
    rep = tmp_path / "d.json"
    assert main(["decompose", "--input", str(src), "--report", str(rep)]) == 0
    assert json.loads(rep.read_text())["atoms"] == []


def test_decompose_plane_wave_image(tmp_path):
    src = tmp_path / "w.pgm"
    w = np.cos(2 * np.pi * (6 * X[:, None] + 5 * X[None, :]) / 64)
    write_pgm(src, np.rint(127.5 * (w + 1)).astype(int), 255)
    rep, out = tmp_path / "d.json", tmp_path / "levels"
    assert main(["decompose", "--input", str(src), "--report", str(rep), "--output", str(out)]) == 0
    report = json.loads(rep.read_text())
    levels = {a["level"] for a in report["atoms"]}
    assert len(levels) == 1
    assert report["residual"]["relative_error"] < 0.05
    assert sorted(p.name for p in out.iterdir()) == [f"level_{levels.pop()}.pgm"]
