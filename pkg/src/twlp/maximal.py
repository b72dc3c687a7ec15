"""Discrete maximal operators: Hardy-Littlewood, strong, iterated and tube.

Every sup over a continuum of radii is replaced by a sup over a dyadic
:class:`ScaleList`. Averages are periodic and computed with FFTs; masks are
built from the signed periodic coordinates of the grid.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .signal_grid import Grid2D, Signal2D, signed_index
from .tubes import TubeParams, tube_contains


@dataclass(frozen=True)
class ScaleList:
    radii: tuple

    def __post_init__(self):
        r = tuple(float(v) for v in self.radii)
        if not r or any(v <= 0 for v in r) or list(r) != sorted(r):
            raise ValueError("radii must be a nonempty ascending list of positive numbers")
        object.__setattr__(self, "radii", r)

    @classmethod
    def dyadic(cls, grid: Grid2D) -> "ScaleList":
        """Radii ``h, 2h, ..., L/2``."""
        n = min(grid.shape)
        return cls(tuple(grid.h * 2.0**i for i in range(int(np.log2(n)))))

    def __iter__(self):
        return iter(self.radii)

    def __len__(self):
        return len(self.radii)


def axis_ball(r: float, n: int, h: float) -> np.ndarray:
    """Normalized indicator of ``|x| < r`` on an ``n``-point periodic axis."""
    if r < h * (1 - 1e-12):
        raise ValueError(f"radius {r} is below the grid resolution {h}")
    x = signed_index(n) * h
    ind = (np.abs(x) < r).astype(float)
    return ind / (h * ind.sum())


def _axis_ball_hat(r: float, n: int, h: float) -> np.ndarray:
    return np.fft.fft(axis_ball(r, n, h)) * h


def chi_r(r, grid: Grid2D) -> Signal2D:
    """Push-forward of the product of three normalized balls."""
    v = np.fft.ifft2(chi_r_hat(r, grid)).real / grid.cell_area
    return Signal2D(grid, np.maximum(v, 0.0))


def chi_r_hat(r, grid: Grid2D) -> np.ndarray:
    """Spectrum of :func:`chi_r` (with the ``h^2`` DFT weight)."""
    if grid.n1 != grid.n2:
        raise ValueError("chi_r needs a square grid")
    n, h = grid.n1, grid.h
    a1, a2, a3 = (_axis_ball_hat(ri, n, h) for ri in r)
    return a1[:, None] * a2[None, :] * a3[grid.sum_freq_index()]


def _average(absf_hat: np.ndarray, kernel_hat: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(absf_hat * kernel_hat).real


def _normalized_mask_hat(mask: np.ndarray) -> np.ndarray:
    return np.fft.fft2(mask / mask.sum())


def disc_mask(r: float, grid: Grid2D) -> np.ndarray:
    x1, x2 = grid.coords()
    return (x1 * x1 + x2 * x2) < r * r


def m_hl(f: Signal2D, scales: ScaleList | None = None) -> Signal2D:
    """Centered Hardy-Littlewood maximal function over discrete discs."""
    scales = scales or ScaleList.dyadic(f.grid)
    fh = np.fft.fft2(np.abs(f.values))
    out = np.abs(f.values).astype(float)
    for r in scales:
        out = np.maximum(out, _average(fh, _normalized_mask_hat(disc_mask(r, f.grid))))
    return Signal2D(f.grid, out)


def m_strong(f: Signal2D, scales: ScaleList | None = None) -> Signal2D:
    """Centered strong maximal function over axis-parallel rectangles."""
    scales = scales or ScaleList.dyadic(f.grid)
    g = f.grid
    fh = np.fft.fft2(np.abs(f.values))
    b1 = [np.fft.fft(axis_ball(r, g.n1, g.h)) * g.h for r in scales]
    b2 = [np.fft.fft(axis_ball(r, g.n2, g.h)) * g.h for r in scales]
    out = np.abs(f.values).astype(float)
    for u, v in itertools.product(b1, b2):
        out = np.maximum(out, _average(fh, u[:, None] * v[None, :]))
    return Signal2D(g, out)


def m_iterated(f: Signal2D, scales: ScaleList | None = None) -> Signal2D:
    """``sup_r |f| * chi_r`` over all triples from ``scales``."""
    scales = scales or ScaleList.dyadic(f.grid)
    g = f.grid
    n, h = g.n1, g.h
    fh = np.fft.fft2(np.abs(f.values))
    hats = {r: _axis_ball_hat(r, n, h) for r in scales}
    ks = g.sum_freq_index()
    out = np.zeros(g.shape)
    for r1, r2 in itertools.product(scales, scales):
        base = fh * (hats[r1][:, None] * hats[r2][None, :])
        stack = np.stack([base * hats[r3][ks] for r3 in scales])
        out = np.maximum(out, np.fft.ifft2(stack).real.max(axis=0))
    return Signal2D(g, out)


def tube_mask(r, grid: Grid2D) -> np.ndarray:
    """Grid cells whose signed offset from the origin lies in ``T(0, r)``."""
    x1, x2 = grid.coords()
    pts = np.stack(np.broadcast_arrays(x1, x2), axis=-1)
    return tube_contains(TubeParams((0.0, 0.0), tuple(r)), pts)


def tube_average(f: Signal2D, r) -> Signal2D:
    """Average of ``|f|`` over the cells of ``x + T(0, r)`` at every ``x``."""
    mask = tube_mask(r, f.grid)
    return Signal2D(f.grid, _average(np.fft.fft2(np.abs(f.values)), _normalized_mask_hat(mask)))


def m_tube_brute(f: Signal2D, scales: ScaleList | None = None) -> Signal2D:
    """Sup of tube averages over all radius triples from ``scales``.

    Each tube is enumerated cell by cell from the membership predicate; the
    averages for all centers are then one periodic correlation per tube.
    """
    scales = scales or ScaleList.dyadic(f.grid)
    fh = np.fft.fft2(np.abs(f.values))
    seen = {}
    out = np.abs(f.values).astype(float)
    for r in itertools.product(scales, repeat=3):
        mask = tube_mask(r, f.grid)
        key = mask.tobytes()
        if key in seen:
            continue
        seen[key] = True
        out = np.maximum(out, _average(fh, _normalized_mask_hat(mask)))
    return Signal2D(f.grid, out)
