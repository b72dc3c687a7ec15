"""Seeded signal and open-set corpora shared by the verification suites."""
from __future__ import annotations

import numpy as np

from .covering import OpenSetMask, random_open_set
from .littlewood_paley import ScaleGrid, covered_mask
from .multiplier import nodal_mask
from .signal_grid import Grid2D, Signal2D


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for a named sub-stream of one seed."""
    return np.random.default_rng([int(seed), *map(int, stream)])


def white_noise(grid: Grid2D, rng: np.random.Generator) -> Signal2D:
    return Signal2D(grid, rng.standard_normal(grid.shape))


def uniform_noise(grid: Grid2D, rng: np.random.Generator) -> Signal2D:
    """Independent uniform [0, 1) samples; positive, so local averages never vanish."""
    return Signal2D(grid, rng.random(grid.shape))


def nodal_free(grid: Grid2D, rng: np.random.Generator) -> Signal2D:
    """Real white noise with every nodal frequency removed."""
    F = np.fft.fft2(rng.standard_normal(grid.shape))
    F[nodal_mask(grid)] = 0.0
    return Signal2D(grid, np.fft.ifft2(F).real)


def in_band(grid: Grid2D, rng: np.random.Generator, scale_grid: ScaleGrid | None = None) -> Signal2D:
    """Real Gaussian signal whose spectrum lies in the covered band."""
    sg = scale_grid or ScaleGrid.covering(grid)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    mask = covered_mask(sg, grid)
    if not mask.any():
        raise ValueError("the covered band holds no grid frequency; use a larger grid")
    c = c * mask
    return Signal2D(grid, np.fft.ifft2(c).real * grid.n1)


def smooth_positive(grid: Grid2D, rng: np.random.Generator, bumps: int = 6) -> Signal2D:
    """Sum of random periodic Gaussian bumps with random widths."""
    n, h = grid.n1, grid.h
    L = n * h
    x1, x2 = (np.arange(n) * h)[:, None], (np.arange(n) * h)[None, :]
    out = np.zeros(grid.shape)
    for _ in range(bumps):
        c = rng.uniform(0, L, 2)
        w = L * rng.uniform(0.02, 0.15, 2)
        d1 = np.mod(x1 - c[0] + L / 2, L) - L / 2
        d2 = np.mod(x2 - c[1] + L / 2, L) - L / 2
        out += rng.uniform(0.5, 2.0) * np.exp(-0.5 * ((d1 / w[0]) ** 2 + (d2 / w[1]) ** 2))
    return Signal2D(grid, out)


def signals(kind: str, grid: Grid2D, count: int, seed: int, stream: int = 0) -> list[Signal2D]:
    make = {
        "noise": white_noise,
        "uniform": uniform_noise,
        "nodal_free": nodal_free,
        "in_band": in_band,
        "smooth": smooth_positive,
    }[kind]
    return [make(grid, rng_for(seed, stream, i)) for i in range(count)]


def open_sets(grid: Grid2D, count: int, seed: int, stream: int = 0, pieces: int = 4, coarse: int = 16) -> list[OpenSetMask]:
    return [random_open_set(grid, rng_for(seed, stream, i), pieces, coarse) for i in range(count)]
