"""Periodic grids, signals and spectra, plus the fiber push-forward and the
twisted convolution.

The DFT convention multiplies the forward sum by the cell area ``h**2`` and
divides the inverse by ``n1 * n2 * h**2``, so discrete sums approximate the
continuous Fourier integrals as ``h -> 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.array(values, copy=True)
    out.setflags(write=False)
    return out


def signed_index(n: int) -> np.ndarray:
    """Signed frequency indices in ``(-n/2, n/2]`` for an ``n``-point axis."""
    k = np.arange(n)
    return np.where(k <= n // 2, k, k - n)


def alias_index(k: np.ndarray, n: int) -> np.ndarray:
    """Reduce integer frequency indices to their representative in ``(-n/2, n/2]``."""
    r = np.mod(k, n)
    return np.where(r <= n // 2, r, r - n)


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid with ``n1 x n2`` samples and spacing ``h``."""

    n1: int
    n2: int
    h: float = 1.0

    def __post_init__(self):
        if not (_is_pow2(int(self.n1)) and _is_pow2(int(self.n2))):
            raise ValueError(f"grid sizes must be powers of two, got {self.n1}x{self.n2}")
        if not self.h > 0:
            raise ValueError("spacing h must be positive")

    @classmethod
    def square(cls, n: int, h: float = 1.0) -> "Grid2D":
        return cls(n, n, h)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def length(self) -> tuple[float, float]:
        return (self.n1 * self.h, self.n2 * self.h)

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def parseval(self) -> float:
        """Constant ``c`` with ``h^2 sum|f|^2 = c * sum|F|^2``."""
        return 1.0 / (self.n1 * self.n2 * self.h * self.h)

    def axis_freqs(self, axis: int) -> np.ndarray:
        """Angular frequencies of one axis (``axis`` is 0 or 1)."""
        n = self.shape[axis]
        return 2 * np.pi * signed_index(n) / (n * self.h)

    def freqs(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable frequency arrays ``(xi1, xi2)`` of shape ``(n1, 1)`` and ``(1, n2)``."""
        return self.axis_freqs(0)[:, None], self.axis_freqs(1)[None, :]

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Signed periodic sample coordinates, broadcastable like :meth:`freqs`."""
        x1 = signed_index(self.n1) * self.h
        x2 = signed_index(self.n2) * self.h
        return x1[:, None], x2[None, :]

    def sum_freq_index(self) -> np.ndarray:
        """Index on the shared axis of the aliased frequency sum ``xi1 + xi2``."""
        if self.n1 != self.n2:
            raise ValueError("frequency sum needs a square grid")
        n = self.n1
        return np.mod(np.arange(n)[:, None] + np.arange(n)[None, :], n)

    def sum_freq(self) -> np.ndarray:
        """Aliased frequency ``xi1 + xi2`` reduced to the one-axis band."""
        n = self.n1
        k = alias_index(np.arange(n)[:, None] + np.arange(n)[None, :], n)
        return 2 * np.pi * k / (n * self.h)

    def axis_length_check(self, values: np.ndarray) -> None:
        if self.n1 != self.n2 or values.shape != (self.n1,):
            raise ValueError(
                f"one-axis signal of length {self.n1} expected on a square grid, "
                f"got shape {values.shape}"
            )


@dataclass(frozen=True)
class Signal2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    def norm(self, p: float = 2.0) -> float:
        """Quadrature ``L^p`` norm ``(h^2 sum |f|^p)^(1/p)``."""
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max())
        return float((self.grid.cell_area * np.sum(a**p)) ** (1.0 / p))

    def with_values(self, values: np.ndarray) -> "Signal2D":
        return Signal2D(self.grid, values)


@dataclass(frozen=True)
class Spectrum2D:
    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def normalization(self) -> float:
        return self.grid.parseval


@dataclass(frozen=True)
class Signal3D:
    """Samples on the lifted space, one shared axis grid ``(n, h)`` per direction."""

    n: int
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 3 or len(set(v.shape)) != 1:
            raise ValueError(f"lifted signal needs three equal axes, got shape {v.shape}")
        if v.shape[0] != self.n:
            raise ValueError(f"axis length {v.shape[0]} differs from n={self.n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def tensor(cls, f1, f2, f3, h: float) -> "Signal3D":
        f1, f2, f3 = (np.asarray(f) for f in (f1, f2, f3))
        if not (f1.shape == f2.shape == f3.shape and f1.ndim == 1):
            raise ValueError("tensor factors must be one-dimensional with equal length")
        return cls(f1.size, h, np.einsum("i,j,k->ijk", f1, f2, f3))

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.n, self.n, self.h)


def dft2(f: Signal2D) -> Spectrum2D:
    return Spectrum2D(f.grid, np.fft.fft2(f.values) * f.grid.cell_area)


def idft2(F: Spectrum2D) -> Signal2D:
    return Signal2D(F.grid, np.fft.ifft2(F.values) / F.grid.cell_area)


def dft1(values: np.ndarray, h: float) -> np.ndarray:
    """One-axis DFT with the quadrature weight ``h``."""
    return np.fft.fft(values) * h


def idft1(values: np.ndarray, h: float) -> np.ndarray:
    return np.fft.ifft(values) / h


def grid_delta(grid: Grid2D) -> Signal2D:
    """Unit-mass impulse at the origin (``1/h^2`` on one cell)."""
    v = np.zeros(grid.shape)
    v[0, 0] = 1.0 / grid.cell_area
    return Signal2D(grid, v)


def axis_delta(n: int, h: float) -> np.ndarray:
    """Unit-mass impulse on the one-axis grid."""
    v = np.zeros(n)
    v[0] = 1.0 / h
    return v


def pushforward3(F: Signal3D) -> Signal2D:
    """Integrate ``F`` along the fibers ``u -> (x1 - u, x2 - u, u)``.

    The fiber integral is the periodic sum ``h * sum_u F(x1-u, x2-u, u)``;
    it is evaluated in Fourier space, where the 3D spectrum is restricted to
    the plane ``xi3 = xi1 + xi2`` (taken modulo the band).
    """
    n, h = F.n, F.h
    G = np.fft.fftn(F.values)
    k = np.arange(n)
    ks = np.mod(k[:, None] + k[None, :], n)
    restricted = G[k[:, None], k[None, :], ks]
    # fftn carries no weight; the 3D spectrum needs h^3 and the inverse 2D DFT removes h^2
    out = np.fft.ifft2(restricted) * h
    if np.isrealobj(F.values):
        out = out.real
    return Signal2D(F.grid, out)


def conv2(f: Signal2D, g: Signal2D) -> Signal2D:
    """Periodic convolution ``h^2 sum_y f(x - y) g(y)``."""
    if f.grid != g.grid:
        raise ValueError("conv2 needs signals on the same grid")
    out = np.fft.ifft2(np.fft.fft2(f.values) * np.fft.fft2(g.values)) * f.grid.cell_area
    if np.isrealobj(f.values) and np.isrealobj(g.values):
        out = out.real
    return Signal2D(f.grid, out)


def conv_twist(f: Signal2D, phi: np.ndarray) -> Signal2D:
    """Twisted convolution ``h sum_u f(x1 - u, x2 - u) phi(u)``.

    ``phi`` lives on the one-axis grid shared by both directions. On the
    Fourier side this multiplies by ``phi_hat`` evaluated at the aliased
    frequency sum.
    """
    phi = np.asarray(phi)
    f.grid.axis_length_check(phi)
    phat = dft1(phi, f.grid.h)
    symbol = phat[f.grid.sum_freq_index()]
    out = np.fft.ifft2(np.fft.fft2(f.values) * symbol)
    if np.isrealobj(f.values) and np.isrealobj(phi):
        out = out.real
    return Signal2D(f.grid, out)


def apply_symbol(f: Signal2D, symbol: np.ndarray) -> Signal2D:
    """Multiply the spectrum of ``f`` by ``symbol``; real output kept real when
    the symbol is Hermitian-compatible and ``f`` is real."""
    out = np.fft.ifft2(np.fft.fft2(f.values) * symbol)
    if np.isrealobj(f.values) and _hermitian(symbol):
        out = out.real
    return Signal2D(f.grid, out)


def _hermitian(symbol: np.ndarray) -> bool:
    s = np.asarray(symbol)
    if s.ndim != 2:
        return False
    flipped = np.roll(s[::-1, ::-1], 1, axis=(0, 1))
    return bool(np.allclose(flipped, np.conj(s), rtol=0, atol=1e-14 * max(1.0, np.abs(s).max())))
