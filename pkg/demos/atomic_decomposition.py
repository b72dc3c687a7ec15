"""
Atomic decomposition of an in-band signal
=========================================

Cells of the scale tents get a level from the area function; cells of one
level and type form an atom. Each atom is a sum of particles, every
particle being a product of Laplacians applied to a potential supported
near one tube.
"""
import numpy as np

from twlp.atoms import atom_decompose, reconstruct_from_atoms, validate_atom
from twlp.corpus import in_band, rng_for
from twlp.littlewood_paley import ScaleGrid, build_pair
from twlp.signal_grid import Grid2D

grid = Grid2D.square(64)
sg = ScaleGrid.covering(grid)
pair = build_pair(1)
f = in_band(grid, rng_for(0, 2), sg)

dec = atom_decompose(f, pair, sg)
rec = reconstruct_from_atoms(dec.records, grid)
print("atoms:", len(dec.records), "particles:", dec.report["particles"])
print("relative error:", np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values))
print("sum |lambda| / ||S f||_1 =", dec.report["lambda_ratio"])

###############################################################################
# Coefficients by level

levels: dict = {}
for r in dec.records:
    levels.setdefault(r.level, []).append(r.lam)
for k in sorted(levels):
    print(f"level {k:>3}: {len(levels[k]):>3} atoms, sum lambda {sum(levels[k]):.4g}")

###############################################################################
# Every atom meets the support and budget checks

worst: dict = {}
for r in dec.records:
    v = validate_atom(r)
    assert v.passed, v.violations
    for key, val in v.worst.items():
        worst[key] = max(worst.get(key, 0.0), val)
print("worst budget ratios:", worst)
