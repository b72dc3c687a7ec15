"""
Three-parameter square functions
================================

A pair of families ``psi``, ``phi`` reproduces every signal whose three
frequencies ``xi1``, ``xi2``, ``xi1 + xi2`` lie in the covered band. The
square function and the area function built from ``phi`` carry the same
energy.
"""
import numpy as np

from twlp.corpus import in_band, rng_for
from twlp.littlewood_paley import (
    ScaleGrid,
    area_function,
    build_pair,
    g_square,
    reconstruct,
)
from twlp.signal_grid import Grid2D

grid = Grid2D.square(64)
sg = ScaleGrid.covering(grid)
pair = build_pair(1)
lo, hi = sg.covered_band()
print(f"{len(sg)} radii per axis, covered band [{lo:.3f}, {hi:.3f}]")

###############################################################################
# Calibration is one on the band to round-off

print("calibration error:", pair.calibration_error(sg, grid))

###############################################################################
# Reconstruction of a random in-band signal

f = in_band(grid, rng_for(0, 1), sg)
rec = reconstruct(f, pair, sg)
print("relative error:", np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values))

###############################################################################
# Square and area functions
# -------------------------
# The area function averages the same energies over tubes, so the two L^2
# norms agree.

g = g_square(f, pair, sg)
S = area_function(f, pair, sg)
print("||g||_2 =", g.norm(), " ||S||_2 =", S.norm())
print("pointwise ratio S/g ranges over", (S.values / g.values).min(), (S.values / g.values).max())
