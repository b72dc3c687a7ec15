"""
Phase regions of the twisted Hilbert multiplier
===============================================

The multiplier is ``-i`` times the product of the signs of ``xi1``, ``xi2``
and ``xi1 + xi2``. Three lines through the origin cut the frequency plane
into six sectors, and the sign alternates from one sector to the next.
"""
import numpy as np

from twlp.corpus import nodal_free, rng_for
from twlp.multiplier import (
    REGION_CODES,
    RegionLabel,
    apply_multiplier,
    region_codes,
    tht_multiplier,
)
from twlp.signal_grid import Grid2D, Signal2D

###############################################################################
# Region map
# ----------
# Codes on a 16 x 16 grid, shifted so the zero frequency sits in the middle.

grid = Grid2D.square(16)
codes = np.fft.fftshift(region_codes(grid))
names = {c: lab.value for lab, c in REGION_CODES.items()}
for row in codes:
    print(" ".join(f"{names[c]:>5}" for c in row))

###############################################################################
# Sector sizes pair up under ``xi -> -xi`` (I with IV, II with V, III with VI)
# once the Nyquist row and column, which have no antipode, are left out

raw = region_codes(grid)
inner = raw[np.ix_(np.arange(16) != 8, np.arange(16) != 8)]
for lab in RegionLabel:
    c = REGION_CODES[lab]
    print(f"{lab.value:>5}: {np.count_nonzero(raw == c):>3} total, {np.count_nonzero(inner == c):>3} inner")

###############################################################################
# A plane wave along the diagonal
# -------------------------------
# ``cos(w (x1 + x2))`` lives in sectors I and IV, where the multiplier is
# ``-i`` and ``+i``; the output is the matching sine.

grid = Grid2D.square(64)
x1, x2 = grid.coords()
w = 2 * np.pi * 3 / 64
wave = Signal2D(grid, np.broadcast_to(np.cos(w * (x1 + x2)), grid.shape))
out = apply_multiplier(tht_multiplier(grid), wave).values
print("max |H cos - sin| =", np.abs(out - np.sin(w * (x1 + x2))).max())

###############################################################################
# Off the nodal lines the multiplier squares to -1

m = tht_multiplier(grid)
f = nodal_free(grid, rng_for(0, 1))
twice = apply_multiplier(m, apply_multiplier(m, f)).values
print("||H H f + f|| / ||f|| =", np.linalg.norm(twice + f.values) / np.linalg.norm(f.values))
