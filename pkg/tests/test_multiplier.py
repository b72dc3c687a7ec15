import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twlp.corpus import nodal_free, rng_for
from twlp.multiplier import (
    REGION_CODES,
    RegionLabel,
    apply_multiplier,
    classify_region,
    cone_cutoff,
    flag_split,
    flag_weights,
    nodal_mask,
    pushforward_multiplier,
    region_codes,
    riesz_multiplier,
    tht_multiplier,
    tht_symbol,
)
from twlp.signal_grid import Grid2D, Signal2D

nonzero = st.floats(-50, 50).filter(lambda v: abs(v) > 1e-6)


def test_symbol_values():
    assert tht_symbol(1, 1) == -1j
    assert tht_symbol(-1, -1) == 1j
    assert tht_symbol(1, -1) == 0


@pytest.mark.parametrize(
    "xi, label",
    [((1, 1), "I"), ((-1, 2), "II"), ((-2, 1), "III"), ((-1, -1), "IV"), ((1, -2), "V"), ((3, -1), "VI"), ((0, 4), "Nodal")],
)
def test_classify_region(xi, label):
    assert classify_region(*xi) is RegionLabel(label)


@settings(max_examples=200)
@given(nonzero, nonzero)
def test_symbol_is_odd_and_unimodular(a, b):
    s = tht_symbol(a, b)
    assert tht_symbol(-a, -b) == -s
    if abs(a + b) > 1e-9:
        assert abs(abs(s) - 1) < 1e-15


def test_pushforward_of_lifted_sign_product():
    g = Grid2D.square(16)
    m3 = pushforward_multiplier(lambda a, b, c: (-1j) ** 3 * np.sign(a) * np.sign(b) * np.sign(c), g)
    assert np.allclose(m3.values, (-1j) ** 2 * tht_multiplier(g).values, atol=0)


def test_pushforward_trivial_cases():
    g = Grid2D.square(8, h=0.5)
    assert np.all(pushforward_multiplier(lambda a, b, c: np.ones_like(a), g).values == 1)
    xi1, xi2 = g.freqs()
    third = pushforward_multiplier(lambda a, b, c: c, g).values
    assert np.allclose(third, xi1 + xi2)


def test_flag_split_sums_back():
    rng = np.random.default_rng(0)
    g = Grid2D.square(32)
    m = tht_multiplier(g)
    m = type(m)(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape), m.nodal_mask)
    m1, m2, m3 = flag_split(m)
    assert np.abs(m.values - (m1.values + m2.values + m3.values)).max() < 1e-15


def test_flag_weights_examples():
    w = flag_weights(1.0, 1.0)
    assert [float(x) for x in w] == [0.0, 0.0, 1.0]
    assert cone_cutoff(0.01) == 1.0
    w = flag_weights(0.1, 1.0)
    assert [float(x) for x in w] == [1.0, 0.0, 0.0]


def test_flag_split_rejects_bad_cutoff():
    with pytest.raises(ValueError):
        flag_split(tht_multiplier(Grid2D.square(8)), eta=lambda t: np.ones_like(t))


def test_cos_becomes_sin():
    g = Grid2D.square(32, h=0.25)
    x1, x2 = g.coords()
    w = 2 * np.pi / (32 * g.h)
    f = Signal2D(g, np.broadcast_to(np.cos(w * (x1 + x2)), g.shape))
    out = apply_multiplier(tht_multiplier(g), f).values
    assert np.allclose(out, np.sin(w * (x1 + x2)), atol=1e-12)


def test_twice_negates_nodal_free():
    g = Grid2D.square(32)
    f = nodal_free(g, rng_for(0, 1))
    m = tht_multiplier(g)
    out = apply_multiplier(m, apply_multiplier(m, f)).values
    assert np.linalg.norm(out + f.values) / np.linalg.norm(f.values) < 1e-10


def test_identity_multiplier():
    g = Grid2D.square(16)
    f = Signal2D(g, np.random.default_rng(1).standard_normal(g.shape))
    one = pushforward_multiplier(lambda a, b, c: np.ones_like(a), g)
    assert np.allclose(apply_multiplier(one, f).values, f.values, atol=1e-13)


def test_isometry_off_nodal_set():
    g = Grid2D.square(32)
    f = nodal_free(g, rng_for(0, 2))
    out = apply_multiplier(tht_multiplier(g), f)
    assert abs(out.norm() / f.norm() - 1) < 1e-12


def test_riesz_values():
    g = Grid2D.square(16, h=2 * np.pi / 16)  # unit frequency spacing
    r1 = riesz_multiplier(1, g).values
    r2 = riesz_multiplier(2, g).values
    assert r1[1, 0] == -1j
    assert r1[0, 1] == 0
    assert np.isclose(r2[3, 4], -0.8j)
    assert r1[0, 0] == 0
    with pytest.raises(ValueError):
        riesz_multiplier(3, g)


def test_region_codes_on_8_grid():
    g = Grid2D.square(8)
    codes = region_codes(g)
    present = {lab for lab, c in REGION_CODES.items() if np.any(codes == c)}
    assert present == set(RegionLabel)
    k = [i if i <= 4 else i - 8 for i in range(8)]
    brute = sum(1 for a in k for b in k if a == 0 or b == 0 or a + b == 0)
    assert brute == 3 * 8 - 3  # the antidiagonal misses the Nyquist index
    assert np.count_nonzero(nodal_mask(g)) == brute
    assert np.count_nonzero(codes == REGION_CODES[RegionLabel.NODAL]) == brute


def test_region_counts_pair_antipodally():
    g = Grid2D.square(16)
    codes = region_codes(g)
    count = {lab: np.count_nonzero(codes == c) for lab, c in REGION_CODES.items()}
    # the Nyquist row and column have no antipode on the grid; count interior only
    k = np.arange(16)
    inner = (k != 8)[:, None] & (k != 8)[None, :]
    inner_count = {lab: np.count_nonzero((codes == c) & inner) for lab, c in REGION_CODES.items()}
    for a, b in (("I", "IV"), ("II", "V"), ("III", "VI")):
        assert inner_count[RegionLabel(a)] == inner_count[RegionLabel(b)]
    assert sum(count.values()) == 256
