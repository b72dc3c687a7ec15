"""Twisted Hilbert multiplier, its six phase regions, flag split, Riesz baseline."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .signal_grid import Grid2D, Signal2D, apply_symbol


class RegionLabel(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    NODAL = "Nodal"


# sign pattern of (xi1, xi2, xi1 + xi2) for each open sector
_SIGNS = {
    (1, 1, 1): RegionLabel.I,
    (-1, 1, 1): RegionLabel.II,
    (-1, 1, -1): RegionLabel.III,
    (-1, -1, -1): RegionLabel.IV,
    (1, -1, -1): RegionLabel.V,
    (1, -1, 1): RegionLabel.VI,
}
REGION_CODES = {lab: i for i, lab in enumerate(RegionLabel)}


@dataclass(frozen=True)
class Multiplier2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)
    nodal_mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("values", "nodal_mask"):
            v = np.asarray(getattr(self, name))
            if v.shape != self.grid.shape:
                raise ValueError(f"{name} shape {v.shape} does not match grid {self.grid.shape}")
            v = np.array(v, copy=True)
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def __add__(self, other: "Multiplier2D") -> "Multiplier2D":
        return Multiplier2D(self.grid, self.values + other.values, self.nodal_mask)


def nodal_mask(grid: Grid2D) -> np.ndarray:
    xi1, xi2 = grid.freqs()
    return np.broadcast_to((xi1 == 0) | (xi2 == 0) | (xi1 + xi2 == 0), grid.shape).copy()


def tht_symbol(xi1, xi2) -> np.ndarray:
    """``-i sgn(xi1) sgn(xi2) sgn(xi1 + xi2)`` at arbitrary real frequencies."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    sigma = np.sign(xi1) * np.sign(xi2) * np.sign(xi1 + xi2)
    return -1j * sigma


def tht_multiplier(grid: Grid2D) -> Multiplier2D:
    """Twisted Hilbert multiplier on the grid.

    The frequency sum uses the signed representatives of each axis (no
    wrap-around), so region membership on the grid agrees with
    :func:`classify_region`.
    """
    xi1, xi2 = grid.freqs()
    values = np.broadcast_to(tht_symbol(xi1, xi2), grid.shape)
    return Multiplier2D(grid, values, nodal_mask(grid))


def classify_region(xi1: float, xi2: float) -> RegionLabel:
    s = (int(np.sign(xi1)), int(np.sign(xi2)), int(np.sign(xi1 + xi2)))
    if 0 in s:
        return RegionLabel.NODAL
    return _SIGNS[s]


def region_codes(grid: Grid2D) -> np.ndarray:
    """Integer region code for every grid frequency (see ``REGION_CODES``)."""
    xi1, xi2 = grid.freqs()
    xi1, xi2 = np.broadcast_arrays(xi1, xi2)
    s1, s2, s3 = np.sign(xi1), np.sign(xi2), np.sign(xi1 + xi2)
    codes = np.full(grid.shape, REGION_CODES[RegionLabel.NODAL], dtype=np.int64)
    for signs, lab in _SIGNS.items():
        hit = (s1 == signs[0]) & (s2 == signs[1]) & (s3 == signs[2])
        codes[hit] = REGION_CODES[lab]
    return codes


def pushforward_multiplier(m3: Callable, grid: Grid2D) -> Multiplier2D:
    """Restrict a lifted multiplier ``m3(xi1, xi2, xi3)`` to ``xi3 = xi1 + xi2``.

    ``m3`` must accept broadcastable arrays.
    """
    xi1, xi2 = grid.freqs()
    xi1, xi2 = np.broadcast_arrays(xi1, xi2)
    values = np.asarray(m3(xi1, xi2, xi1 + xi2))
    values = np.broadcast_to(values, grid.shape)
    return Multiplier2D(grid, values, nodal_mask(grid))


def _quintic_step(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (10 - 15 * s + 6 * s * s)


def cone_cutoff(t) -> np.ndarray:
    """Default cone cutoff: 1 on ``[0, 1/8]``, 0 from ``1/4`` on, C^2 in between."""
    t = np.asarray(t, dtype=float)
    out = 1.0 - _quintic_step((t - 0.125) / 0.125)
    return np.where(np.isnan(t), 0.0, out)


def _check_cutoff(eta: Callable) -> None:
    probe = np.concatenate([np.linspace(0, 4, 801), [1e3, 1e9, np.inf]])
    with np.errstate(all="ignore"):
        v = np.asarray(eta(probe), dtype=float)
    if v.shape != probe.shape or not np.all(np.isfinite(v)):
        raise ValueError("cutoff must return finite values elementwise")
    if np.any(v < 0) or np.any(v > 1):
        raise ValueError("cutoff values must lie in [0, 1]")
    if np.any(v[probe > 0.25] != 0):
        raise ValueError("cutoff must vanish beyond 1/4")


def flag_weights(xi1, xi2, eta: Callable = cone_cutoff):
    """Cone weights ``(w1, w2, w3)`` with ``w1 + w2 + w3 = 1`` pointwise.

    ``w1 = eta(|xi1|^2/|xi2|^2)`` lives in the cone around the ``xi2`` axis,
    ``w2`` symmetrically. At the origin both cone weights are zero.
    """
    xi1, xi2 = np.broadcast_arrays(np.asarray(xi1, float), np.asarray(xi2, float))
    a, b = xi1 * xi1, xi2 * xi2
    with np.errstate(divide="ignore", invalid="ignore"):
        t12 = np.where(b > 0, a / np.where(b > 0, b, 1.0), np.inf)
        t21 = np.where(a > 0, b / np.where(a > 0, a, 1.0), np.inf)
    w1 = np.asarray(eta(t12), dtype=float)
    w2 = np.asarray(eta(t21), dtype=float)
    return w1, w2, 1.0 - w1 - w2


def flag_split(m: Multiplier2D, eta: Callable = cone_cutoff):
    """Split ``m`` into two cone pieces and a remainder, ``m = m1 + m2 + m3``."""
    _check_cutoff(eta)
    xi1, xi2 = m.grid.freqs()
    w1, w2, _ = flag_weights(xi1, xi2, eta)
    m1 = m.values * w1
    m2 = m.values * w2
    m3 = m.values - m1 - m2
    return tuple(Multiplier2D(m.grid, v, m.nodal_mask) for v in (m1, m2, m3))


def apply_multiplier(m: Multiplier2D, f: Signal2D) -> Signal2D:
    if m.grid != f.grid:
        raise ValueError("multiplier and signal live on different grids")
    return apply_symbol(f, m.values)


def riesz_multiplier(j: int, grid: Grid2D) -> Multiplier2D:
    """Riesz multiplier ``-i xi_j / |xi|`` with value 0 at the origin."""
    if j not in (1, 2):
        raise ValueError("axis index must be 1 or 2")
    xi1, xi2 = np.broadcast_arrays(*grid.freqs())
    r = np.hypot(xi1, xi2)
    num = xi1 if j == 1 else xi2
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(r > 0, -1j * num / np.where(r > 0, r, 1.0), 0.0)
    return Multiplier2D(grid, values, r == 0)
