import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from twlp.signal_grid import (
    Grid2D,
    Signal2D,
    Signal3D,
    alias_index,
    axis_delta,
    conv2,
    conv_twist,
    dft2,
    grid_delta,
    idft2,
    pushforward3,
    signed_index,
)


def _direct_conv(f, g, h):
    # O(n^4) periodic sum
    n1, n2 = f.shape
    out = np.zeros(f.shape, dtype=complex)
    for a in range(n1):
        for b in range(n2):
            for c in range(n1):
                for d in range(n2):
                    out[a, b] += f[(a - c) % n1, (b - d) % n2] * g[c, d]
    return out * h * h


def _direct_twist(f, phi, h):
    n = f.shape[0]
    out = np.zeros(f.shape, dtype=complex)
    for a in range(n):
        for b in range(n):
            for u in range(n):
                out[a, b] += f[(a - u) % n, (b - u) % n] * phi[u]
    return out * h


def _direct_fiber(F, h):
    n = F.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            for u in range(n):
                out[a, b] += F[(a - u) % n, (b - u) % n, u]
    return out * h


def test_signed_index_range():
    assert signed_index(8).tolist() == [0, 1, 2, 3, 4, -3, -2, -1]
    assert alias_index(np.array([5, 8, -4, 12]), 8).tolist() == [-3, 0, 4, 4]


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        Grid2D(12, 16)
    with pytest.raises(ValueError):
        Grid2D.square(8, h=0.0)


def test_constant_has_dc_only_spectrum():
    g = Grid2D.square(8)
    F = dft2(Signal2D(g, np.ones(g.shape))).values.copy()
    assert abs(F[0, 0] - 64.0) < 1e-12
    F[0, 0] = 0
    assert np.abs(F).max() < 1e-12


def test_delta_has_flat_spectrum():
    g = Grid2D.square(8, h=0.5)
    F = dft2(grid_delta(g)).values
    assert np.allclose(np.abs(F), 1.0, atol=1e-14)


def test_round_trip_random_complex():
    rng = np.random.default_rng(0)
    g = Grid2D.square(16, h=0.3)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    back = idft2(dft2(Signal2D(g, v))).values
    assert np.linalg.norm(back - v) / np.linalg.norm(v) < 1e-12


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (8, 8), elements=st.floats(-10, 10)))
def test_parseval(v):
    g = Grid2D.square(8, h=0.25)
    F = dft2(Signal2D(g, v)).values
    lhs = g.cell_area * np.sum(np.abs(v) ** 2)
    rhs = g.parseval * np.sum(np.abs(F) ** 2)
    assert np.isclose(lhs, rhs, rtol=1e-10, atol=1e-10)


def test_conv2_matches_direct_sum():
    rng = np.random.default_rng(1)
    g = Grid2D.square(8, h=0.5)
    f, k = rng.standard_normal((2, 8, 8))
    fast = conv2(Signal2D(g, f), Signal2D(g, k)).values
    assert np.abs(fast - _direct_conv(f, k, g.h)).max() < 1e-12


def test_conv2_identities():
    rng = np.random.default_rng(2)
    g = Grid2D.square(8, h=0.5)
    f = Signal2D(g, rng.standard_normal(g.shape))
    k = Signal2D(g, rng.standard_normal(g.shape))
    assert np.allclose(conv2(grid_delta(g), f).values, f.values, atol=1e-12)
    assert np.allclose(conv2(f, k).values, conv2(k, f).values, atol=1e-12)
    one = Signal2D(g, np.ones(g.shape))
    assert np.allclose(conv2(one, f).values, g.cell_area * f.values.sum(), atol=1e-12)


def test_conv_twist_matches_direct_sum():
    rng = np.random.default_rng(3)
    g = Grid2D.square(16, h=0.7)
    f = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    phi = rng.standard_normal(16)
    fast = conv_twist(Signal2D(g, f), phi).values
    assert np.abs(fast - _direct_twist(f, phi, g.h)).max() < 1e-10


def test_conv_twist_delta_and_diagonal_null():
    g = Grid2D.square(16, h=0.5)
    rng = np.random.default_rng(4)
    f = Signal2D(g, rng.standard_normal(g.shape))
    assert np.allclose(conv_twist(f, axis_delta(16, g.h)).values, f.values, atol=1e-12)
    # a mode with xi1 + xi2 = 0 only sees phi_hat(0)
    x1, x2 = g.coords()
    w = 2 * np.pi * 3 / (16 * g.h)
    e = Signal2D(g, np.exp(1j * w * (x1 - x2)))
    phi = rng.standard_normal(16)
    out = conv_twist(e, phi).values
    assert np.allclose(out, g.h * phi.sum() * e.values, atol=1e-12)


def test_pushforward_delta_and_constant():
    n, h = 8, 0.5
    d = axis_delta(n, h)
    out = pushforward3(Signal3D.tensor(d, d, d, h)).values
    want = np.zeros((n, n))
    want[0, 0] = 1 / h**2
    assert np.allclose(out, want, atol=1e-12)
    one = np.ones(n)
    assert np.allclose(pushforward3(Signal3D.tensor(one, one, one, h)).values, n * h)


def test_pushforward_matches_fiber_sum():
    rng = np.random.default_rng(5)
    n, h = 16, 0.4
    F = rng.standard_normal((n, n, n))
    fast = pushforward3(Signal3D(n, h, F)).values
    assert np.abs(fast - _direct_fiber(F, h)).max() < 1e-10


def test_signals_reject_nonfinite_and_mismatch():
    g = Grid2D.square(4)
    with pytest.raises(ValueError):
        Signal2D(g, np.full((4, 4), np.nan))
    with pytest.raises(ValueError):
        Signal2D(g, np.zeros((4, 8)))
