import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twlp.corpus import in_band, nodal_free, rng_for
from twlp.littlewood_paley import (
    BandLeakageWarning,
    ScaleGrid,
    area_function,
    build_pair,
    build_phi_partition,
    covered_mask,
    g_square,
    g_square_batch,
    leakage_fraction,
    partition_sum,
    reconstruct,
    smooth_step,
    spectrum_factors,
)
from twlp.maximal import chi_r_hat
from twlp.signal_grid import Grid2D, Signal2D

PAIR = build_pair(1)


def _brute_square(f, family, sg, area=False):
    # one full complex FFT per radius triple, no factorization or pruning
    g = f.grid
    F = np.fft.fft2(f.values)
    out = np.zeros(g.shape)
    for r in itertools.product(sg.radii, repeat=3):
        u = np.fft.ifft2(F * spectrum_factors(family, r, g))
        e = np.abs(u) ** 2
        if area:
            rr = [max(v, g.h) for v in r]
            e = np.fft.ifft2(np.fft.fft2(e) * chi_r_hat(rr, g)).real
        out += sg.weight**3 * e
    return np.sqrt(np.maximum(out, 0))


def test_smooth_step_limits():
    assert smooth_step(-1.0) == 0 and smooth_step(2.0) == 1
    assert smooth_step(0.5) == pytest.approx(0.5)


@settings(max_examples=100)
@given(st.floats(0.0, 1.0))
def test_partition_sums_to_one_in_band(u):
    sg = ScaleGrid(8, -20, 20)
    lo, hi = sg.covered_band()
    s = lo * (hi / lo) ** u
    assert abs(partition_sum(build_phi_partition(8), sg, s) - 1) < 1e-6


def test_partition_at_zero():
    assert partition_sum(build_phi_partition(8), ScaleGrid(8, -5, 5), 0.0) == 0


def test_covering_grid_contains_default_band():
    g = Grid2D.square(64)
    sg = ScaleGrid.covering(g)
    lo, hi = sg.covered_band()
    assert lo <= 2 * np.pi * 4 / 64 and hi >= 2 * np.pi * 16 / 64
    assert (sg.k_lo, sg.k_hi) == (-13, 18)


@pytest.mark.parametrize("N", [1, 2])
def test_psi_moments_vanish(N):
    x, v = build_pair(N).psi_samples()
    dx = x[1] - x[0]
    scale = np.abs(v).sum() * dx
    for k in range(2 * N):
        assert abs(np.sum(v * x**k) * dx) < 1e-10 * scale


def test_psi_is_compact():
    n, h = 64, 1.0
    cap = PAIR.caps[0].samples(4.0, n, h)
    idx = np.nonzero(cap)[0]
    k = np.where(idx <= n // 2, idx, idx - n)
    assert np.abs(k).max() * h <= 2 * 4.0 / PAIR.lam


def test_calibration_is_one_on_band():
    g = Grid2D.square(64)
    sg = ScaleGrid.covering(g)
    assert PAIR.calibration_error(sg, g) < 1e-12


def test_calibration_vanishes_on_nodal_set():
    g = Grid2D.square(32)
    sg = ScaleGrid.covering(g)
    cal = PAIR.calibration(sg, g)
    k = np.arange(32)
    assert np.all(cal[k, (-k) % 32] == 0)


def test_single_exponential_reconstructs():
    g = Grid2D.square(64)
    sg = ScaleGrid.covering(g)
    x1, x2 = g.coords()
    w = 2 * np.pi / 64
    f = Signal2D(g, np.exp(1j * w * (6 * x1 + 5 * x2)))
    out = reconstruct(f, PAIR, sg)
    assert np.abs(out.values / f.values - 1).max() < 1e-3


def test_nodal_energy_is_leakage():
    g = Grid2D.square(64)
    sg = ScaleGrid.covering(g)
    x1, x2 = g.coords()
    w = 2 * np.pi / 64
    f = Signal2D(g, np.broadcast_to(np.cos(w * 6 * (x1 - x2)), g.shape))
    assert leakage_fraction(f, sg) == pytest.approx(1.0)
    with pytest.warns(BandLeakageWarning):
        out = reconstruct(f, PAIR, sg)
    assert np.abs(out.values).max() < 1e-12


def test_random_in_band_round_trip():
    g = Grid2D.square(64)
    sg = ScaleGrid.covering(g)
    f = in_band(g, rng_for(0, 3), sg)
    with warnings.catch_warnings():
        warnings.simplefilter("error", BandLeakageWarning)
        out = reconstruct(f, PAIR, sg)
    assert np.linalg.norm(out.values - f.values) / np.linalg.norm(f.values) < 1e-3


SMALL = ScaleGrid(4, -4, 6)
G16 = Grid2D.square(16)


@pytest.mark.parametrize("area", [False, True])
def test_square_sums_match_brute_force(area):
    f = Signal2D(G16, np.random.default_rng(0).standard_normal(G16.shape))
    op = area_function if area else g_square
    fast = op(f, PAIR.phi_family, SMALL).values
    assert np.allclose(fast, _brute_square(f, PAIR.phi_family, SMALL, area), rtol=1e-10, atol=1e-12)


def test_square_sums_complex_input():
    rng = np.random.default_rng(1)
    f = Signal2D(G16, rng.standard_normal(G16.shape) + 1j * rng.standard_normal(G16.shape))
    fast = g_square(f, PAIR.phi_family, SMALL).values
    assert np.allclose(fast, _brute_square(f, PAIR.phi_family, SMALL), rtol=1e-10)


def test_zero_signal():
    f = Signal2D(G16, np.zeros(G16.shape))
    assert np.all(g_square(f, PAIR, SMALL).values == 0)
    assert np.all(area_function(f, PAIR, SMALL).values == 0)


def test_single_frequency_square_function_is_flat():
    g = Grid2D.square(32)
    x1, x2 = g.coords()
    w = 2 * np.pi / 32
    f = Signal2D(g, np.exp(1j * w * (5 * x1 + 3 * x2)))
    v = g_square(f, PAIR, ScaleGrid.covering(g)).values
    assert np.ptp(v) < 1e-10 * v.max()


def test_batch_matches_single():
    rng = np.random.default_rng(2)
    fs = [Signal2D(G16, rng.standard_normal(G16.shape)) for _ in range(3)]
    batch = g_square_batch(fs, PAIR, SMALL, area=True)
    for f, b in zip(fs, batch):
        assert np.allclose(b.values, area_function(f, PAIR, SMALL).values, atol=1e-12)


def test_square_and_area_share_energy():
    g = Grid2D.square(32)
    sg = ScaleGrid.covering(g)
    f = in_band(g, rng_for(0, 4), sg)
    gs = g_square(f, PAIR, sg).norm()
    s = area_function(f, PAIR, sg).norm()
    assert abs(s / gs - 1) < 1e-8


def test_plancherel_with_quadratic_partition():
    g = Grid2D.square(32)
    sg = ScaleGrid.covering(g)
    fam = build_phi_partition(8, quadratic=True)
    f = Signal2D(g, nodal_free(g, rng_for(0, 5)).values)
    F = np.fft.fft2(f.values) * covered_mask(sg, g)
    f = Signal2D(g, np.fft.ifft2(F).real)
    assert 0.95 <= g_square(f, fam, sg).norm() / f.norm() <= 1.05


def test_pair_rejects_bad_orders():
    with pytest.raises(ValueError):
        build_pair((1, 0, 1))
    with pytest.raises(ValueError):
        build_phi_partition(2)
