import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from twlp.maximal import (
    ScaleList,
    chi_r,
    disc_mask,
    m_hl,
    m_iterated,
    m_strong,
    m_tube_brute,
    tube_average,
    tube_mask,
)
from twlp.signal_grid import Grid2D, Signal2D

G8 = Grid2D.square(8)
G16 = Grid2D.square(16)


def _direct_hl(v, radii):
    # shift-and-average over every center, straight from the disc predicate
    n = v.shape[0]
    k = [i if i <= n // 2 else i - n for i in range(n)]
    out = np.abs(v).astype(float)
    for r in radii:
        offs = [(a, b) for a in k for b in k if a * a + b * b < r * r]
        for x, y in itertools.product(range(n), repeat=2):
            avg = np.mean([abs(v[(x + a) % n, (y + b) % n]) for a, b in offs])
            out[x, y] = max(out[x, y], avg)
    return out


def test_scale_list_validation():
    assert ScaleList.dyadic(G16).radii == (1, 2, 4, 8)
    with pytest.raises(ValueError):
        ScaleList((2.0, 1.0))


def test_constant_is_fixed():
    one = Signal2D(G16, np.ones(G16.shape))
    for op in (m_hl, m_strong, m_iterated, m_tube_brute):
        assert np.allclose(op(one).values, 1.0, atol=1e-12)


def test_hl_matches_direct_average():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(G8.shape)
    got = m_hl(Signal2D(G8, v)).values
    assert np.allclose(got, _direct_hl(v, ScaleList.dyadic(G8).radii), atol=1e-12)


def test_hl_of_one_cell():
    v = np.zeros(G8.shape)
    v[0, 0] = 1.0
    out = m_hl(Signal2D(G8, v)).values
    # at offset (2, 0) the smallest disc reaching the cell is r = 4
    assert out[2, 0] == pytest.approx(1.0 / np.count_nonzero(disc_mask(4, G8)))


def test_strong_dominates_on_stripe():
    v = np.zeros(G16.shape)
    v[5:7, :] = 3.0
    out = m_strong(Signal2D(G16, v)).values
    assert np.all(out[5:7, :] >= 3.0 - 1e-12)


def test_chi_mass_and_symmetry():
    rng = np.random.default_rng(1)
    g = Grid2D.square(64)
    for _ in range(20):
        r = 2.0 ** rng.uniform(0, 4, 3)
        assert abs(chi_r(r, g).values.sum() * g.cell_area - 1) < 1e-10
    sym = chi_r((4.0, 4.0, 4.0), g).values
    assert np.allclose(sym, sym.T, atol=1e-14)


def test_chi_with_thin_third_ball_is_product():
    g = Grid2D.square(32)
    c = chi_r((4.0, 2.0, 1.0), g).values
    from twlp.maximal import axis_ball

    prod = axis_ball(4.0, 32, 1.0)[:, None] * axis_ball(2.0, 32, 1.0)[None, :]
    assert np.allclose(c, prod, atol=1e-14)


def test_iterated_of_delta_peaks_at_origin():
    v = np.zeros(G16.shape)
    v[0, 0] = 1.0
    out = m_iterated(Signal2D(G16, v)).values
    assert out[0, 0] == out.max()
    assert out[0, 0] > out[4, 4] > out[8, 8]


def test_tube_oracle_on_slant_stripe():
    g = Grid2D.square(32)
    x1, x2 = g.coords()
    d = np.mod(np.arange(32)[:, None] - np.arange(32)[None, :] + 16, 32) - 16
    v = (np.abs(d) < 2).astype(float)
    out = m_tube_brute(Signal2D(g, v)).values
    on = v > 0
    assert np.allclose(out[on], 1.0)
    # a thin slant tube along the stripe is the witness
    assert np.allclose(tube_average(Signal2D(g, v), (1.0, 1.0, 16.0)).values[on], 1.0)


def test_tube_mask_counts():
    g = Grid2D.square(16)
    assert np.count_nonzero(tube_mask((2.0, 2.0, 1.0), g)) == 9
    assert np.count_nonzero(tube_mask((1.0, 1.0, 1.0), g)) == 1


@settings(max_examples=15, deadline=None)
@given(arrays(np.float64, (8, 8), elements=st.floats(-5, 5)))
def test_maximal_functions_are_bounded_by_sup(v):
    f = Signal2D(G8, v)
    top = np.abs(v).max()
    for op in (m_hl, m_strong, m_iterated, m_tube_brute):
        out = op(f).values
        assert np.all(out <= top + 1e-9)
        assert np.all(out >= -1e-12)


@settings(max_examples=15, deadline=None)
@given(arrays(np.float64, (8, 8), elements=st.floats(0, 5)), st.floats(0.1, 10))
def test_maximal_functions_are_homogeneous(v, c):
    f, cf = Signal2D(G8, v), Signal2D(G8, c * v)
    for op in (m_hl, m_strong):
        assert np.allclose(op(cf).values, c * op(f).values, rtol=1e-9, atol=1e-9)


def test_strong_dominates_hl_up_to_constant():
    rng = np.random.default_rng(2)
    f = Signal2D(G16, rng.random(G16.shape))
    assert np.all(m_hl(f).values <= 4 * m_strong(f).values + 1e-12)
