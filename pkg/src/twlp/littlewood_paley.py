"""Three-parameter dilation families, the Calderon pair, square and area functions.

A family is anything with ``axis_hat(axis, r, n, h)`` returning the Fourier
values of the dilate at scale ``r`` on one periodic axis (FFT index order).
The spectrum of ``phi_r`` on the plane is the product of the three axis
values at ``(xi1, xi2, xi1 + xi2)``, the third taken at the aliased index of
the frequency sum, which is exactly the spectrum of the push-forward of the
three sampled one-axis dilates.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import BSpline

from .maximal import axis_ball
from .signal_grid import Grid2D, Signal2D, Spectrum2D, signed_index

LN2 = float(np.log(2.0))


class BandLeakageWarning(UserWarning):
    """Signal energy outside the band reproduced by the scale grid."""


def smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def axis_freqs(n: int, h: float) -> np.ndarray:
    return 2 * np.pi * signed_index(n) / (n * h)


@dataclass(frozen=True)
class RadialProfile:
    """Even Fourier profile ``s -> fourier(|s|)`` used identically on all three axes."""

    fourier: Callable = field(repr=False)
    support: tuple = (0.5, 2.0)
    moments: int = 0
    name: str = ""

    def __call__(self, s) -> np.ndarray:
        return self.fourier(np.abs(np.asarray(s, dtype=float)))

    def axis_hat(self, axis: int, r: float, n: int, h: float) -> np.ndarray:
        return self(r * axis_freqs(n, h))


def _partition_bump(q: int):
    # b(t) = G(t) - G(t - 1/q) in t = log2(s); its 1/q-shifts telescope to 1
    delta = 1.0 / q
    width = 2.0 - delta

    def G(t):
        return smooth_step((t + 1.0) / width)

    def bump(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            t = np.log2(np.where(s > 0, s, 1.0))
        out = G(t) - G(t - delta)
        return np.where((s > 0.5) & (s < 2.0), np.maximum(out, 0.0), 0.0)

    return bump


def build_phi_partition(q: int, quadratic: bool = False) -> RadialProfile:
    """Annulus profile with ``int phi_hat(r s) dr/r = 1`` for every ``s > 0``.

    The bump is normalized by its Mellin integral ``ln2 / q``; its dilates on
    the grid ``r = 2**(k/q)`` with weight ``ln2 / q`` then sum to one exactly.
    With ``quadratic=True`` the square root of the bump is used, so that
    ``int |phi_hat(r s)|^2 dr/r = 1`` instead.
    """
    if q < 4:
        raise ValueError("q must be at least 4")
    bump = _partition_bump(q)
    scale = q / LN2
    if quadratic:
        return RadialProfile(lambda s: np.sqrt(bump(s) * scale), (0.5, 2.0), 0, f"l2-partition q={q}")
    return RadialProfile(lambda s: bump(s) * scale, (0.5, 2.0), 0, f"partition q={q}")


@dataclass(frozen=True)
class ScaleGrid:
    """Log-spaced radii ``2**(k/q)``, ``k_lo <= k <= k_hi``, shared by the three axes."""

    q: int
    k_lo: int
    k_hi: int

    def __post_init__(self):
        if self.k_hi < self.k_lo:
            raise ValueError("empty scale range")

    @property
    def radii(self) -> np.ndarray:
        return 2.0 ** (np.arange(self.k_lo, self.k_hi + 1) / self.q)

    @property
    def weight(self) -> float:
        return LN2 / self.q

    def __len__(self):
        return self.k_hi - self.k_lo + 1

    def triples(self):
        return itertools.product(self.radii, repeat=3)

    def covered_band(self) -> tuple[float, float]:
        """Angular frequencies where the discrete partition sums to one."""
        lo = 2.0 ** (1 - (self.k_hi + 1) / self.q)
        hi = 2.0 ** ((1 - self.k_lo) / self.q - 1)
        return lo, hi

    @classmethod
    def covering(cls, grid: Grid2D, q: int = 8, band: tuple[int, int] | None = None) -> "ScaleGrid":
        """Smallest grid whose covered band contains the index band ``band``.

        The default band keeps wavelengths between ``4h`` and ``L/4``: indices
        ``4 <= |k| <= n/4``.
        """
        n = min(grid.shape)
        kmin, kmax = band if band is not None else default_band(n)
        L = n * grid.h
        s_lo = 2 * np.pi * kmin / L
        s_hi = 2 * np.pi * kmax / L
        eps = 1e-9
        k_hi = int(np.ceil(q * (1 - np.log2(s_lo)) - 1 - eps))
        k_lo = int(np.floor(1 - q * (1 + np.log2(s_hi)) + eps))
        return cls(q, k_lo, k_hi)


def default_band(n: int) -> tuple[int, int]:
    return (4, max(4, n // 4))


def partition_sum(profile: RadialProfile, scale_grid: ScaleGrid, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return scale_grid.weight * sum(profile(r * s) for r in scale_grid.radii)


def bspline_bump(order: int):
    """Centered B-spline of even ``order`` on ``[-2, 2]`` with unit integral.

    Returns ``(g, g_hat)`` with ``g_hat(xi) = sinc(w xi / 2)**order``,
    ``w = 4 / order``.
    """
    if order % 2:
        raise ValueError("B-spline order must be even")
    knots = np.linspace(-2.0, 2.0, order + 1)
    b = BSpline.basis_element(knots, extrapolate=False)
    w = 4.0 / order

    def g(x):
        return np.nan_to_num(b(np.asarray(x, dtype=float)), nan=0.0) * (order / 4.0)

    def g_hat(xi):
        return np.sinc(w * np.asarray(xi, dtype=float) / (2 * np.pi)) ** order

    return g, g_hat


def second_difference(v: np.ndarray, dx: float) -> np.ndarray:
    """``-(v[i+1] - 2 v[i] + v[i-1]) / dx^2`` with zero padding outside."""
    p = np.pad(v, 1)
    return -(p[2:] - 2 * p[1:-1] + p[:-2]) / (dx * dx)


@dataclass(frozen=True)
class _AxisCap:
    """Compact potential ``Psi`` on one axis of the pair."""

    order: int
    lam: float
    g: Callable = field(repr=False)

    def samples(self, r: float, n: int, h: float) -> np.ndarray:
        # (r/lam)^(2N) times a unit-mass sampled bump of width r/lam
        rho = r / self.lam
        x = signed_index(n) * h
        v = self.g(x / rho)
        if not np.any(v > 0):
            v = (x == 0).astype(float)
        return (rho ** (2 * self.order)) * v / (h * v.sum())

    def hat(self, r: float, n: int, h: float) -> np.ndarray:
        return (np.fft.fft(self.samples(r, n, h)) * h).real


@dataclass(frozen=True)
class _PairFamily:
    pair: "PairPsiPhi"
    which: str

    def axis_hat(self, axis: int, r: float, n: int, h: float) -> np.ndarray:
        return self.pair._axis_hat(self.which, axis, r, n, h)


@dataclass(frozen=True)
class PairPsiPhi:
    """Calderon pair with ``sum_r w psi_hat_r phi_hat_r = 1`` on the covered band.

    Per axis, ``psi`` is the ``N``-th power of the Laplacian applied to a
    compact potential ``Psi`` (a B-spline of width ``r / lam``), and
    ``phi_hat = partition / psi_hat`` on the annulus. On a grid both are
    realized from the sampled potential, so ``psi`` keeps exact compact
    support and the calibration identity holds to round-off.
    """

    orders: tuple
    lam: float
    q: int
    spline_order: int
    partition: RadialProfile = field(repr=False)
    psi: tuple = field(repr=False)
    phi: tuple = field(repr=False)
    caps: tuple = field(repr=False)

    @property
    def psi_family(self):
        return _PairFamily(self, "psi")

    @property
    def phi_family(self):
        return _PairFamily(self, "phi")

    @property
    def cap_family(self):
        return _PairFamily(self, "cap")

    def _axis_hat(self, which: str, axis: int, r: float, n: int, h: float) -> np.ndarray:
        cap = self.caps[axis]
        cap_hat = cap.hat(r, n, h)
        if which == "cap":
            return cap_hat
        xi = axis_freqs(n, h)
        psi_hat = (xi * xi) ** cap.order * cap_hat
        if which == "psi":
            return psi_hat
        part = self.partition(r * xi)
        out = np.zeros(n)
        nz = part != 0
        if np.any(psi_hat[nz] == 0):
            raise ValueError("psi_hat vanishes on the annulus; try another lambda")
        out[nz] = part[nz] / psi_hat[nz]
        return out

    def calibration(self, scale_grid: ScaleGrid, grid: Grid2D) -> np.ndarray:
        """``sum_r w psi_hat_r phi_hat_r`` at every grid frequency."""
        return calibration_product(self.psi_family, self.phi_family, scale_grid, grid)

    def calibration_error(self, scale_grid: ScaleGrid, grid: Grid2D) -> float:
        cal = self.calibration(scale_grid, grid)
        mask = covered_mask(scale_grid, grid)
        return float(np.max(np.abs(cal[mask] - 1.0))) if np.any(mask) else 0.0

    def psi_samples(self, axis: int = 0, dx: float = 1.0 / 64):
        """Space-side ``lam * (Delta^N g)(lam x)`` on a fine grid.

        ``Delta`` is the centered second difference, so the discrete moments
        of orders below ``2N`` vanish to round-off.
        """
        cap = self.caps[axis]
        g, _ = bspline_bump(self.spline_order)
        half = 2.0 / self.lam + (cap.order + 1) * dx
        x = np.arange(-np.ceil(half / dx), np.ceil(half / dx) + 1) * dx
        v = g(self.lam * x)
        for _ in range(cap.order):
            v = second_difference(v, dx / self.lam)
        return x, self.lam * v


def build_pair(N=1, lam: float = 8.0, q: int = 8, spline_order: int | None = None) -> PairPsiPhi:
    """Calderon pair with per-axis Laplacian orders ``N`` (int or triple)."""
    orders = (N, N, N) if np.isscalar(N) else tuple(int(v) for v in N)
    if len(orders) != 3 or min(orders) < 1:
        raise ValueError("orders must be positive integers")
    p = spline_order or 2 * max(orders) + 6
    g, g_hat = bspline_bump(p)
    part = build_phi_partition(q)
    s = np.linspace(0.5, 2.0, 2001)
    psis, phis = [], []
    for Nj in orders:
        psi_fn = (lambda Nj: lambda t: (t / lam) ** (2 * Nj) * g_hat(t / lam))(Nj)
        vals = psi_fn(s)
        if np.min(np.abs(vals)) <= 1e-12 * np.max(np.abs(vals)):
            raise ValueError(f"psi_hat vanishes on the annulus for lambda={lam}; pick another lambda")
        psis.append(RadialProfile(psi_fn, (0.0, np.inf), 2 * Nj, f"psi N={Nj}"))

        def phi_fn(t, psi_fn=psi_fn):
            t = np.asarray(t, dtype=float)
            num = part(t)
            out = np.zeros_like(num)
            nz = num != 0
            out[nz] = num[nz] / psi_fn(t[nz])
            return out

        phis.append(RadialProfile(phi_fn, (0.5, 2.0), 0, f"phi N={Nj}"))
    caps = tuple(_AxisCap(Nj, lam, g) for Nj in orders)
    return PairPsiPhi(orders, lam, q, p, part, tuple(psis), tuple(phis), caps)


def _family(obj):
    if isinstance(obj, PairPsiPhi):
        return obj.phi_family
    return obj


def spectrum_factors(family, r, grid: Grid2D) -> np.ndarray:
    """Planar spectrum of the three-parameter dilate at ``r``."""
    if grid.n1 != grid.n2:
        raise ValueError("three-parameter families need a square grid")
    n, h = grid.n1, grid.h
    a1 = family.axis_hat(0, r[0], n, h)
    a2 = family.axis_hat(1, r[1], n, h)
    a3 = family.axis_hat(2, r[2], n, h)
    return a1[:, None] * a2[None, :] * a3[grid.sum_freq_index()]


def phi_r_spectrum(pair_or_profile, r, grid: Grid2D) -> Spectrum2D:
    return Spectrum2D(grid, spectrum_factors(_family(pair_or_profile), r, grid))


def axis_sums(family_a, family_b, scale_grid: ScaleGrid, n: int, h: float, axis: int) -> np.ndarray:
    w = scale_grid.weight
    return w * sum(
        family_a.axis_hat(axis, r, n, h) * family_b.axis_hat(axis, r, n, h) for r in scale_grid.radii
    )


def calibration_product(family_a, family_b, scale_grid: ScaleGrid, grid: Grid2D) -> np.ndarray:
    """``sum_r w a_r(xi) b_r(xi)`` over the full triple grid, using the product structure."""
    n, h = grid.n1, grid.h
    c = [axis_sums(family_a, family_b, scale_grid, n, h, ax) for ax in range(3)]
    return c[0][:, None] * c[1][None, :] * c[2][grid.sum_freq_index()]


def covered_mask(scale_grid: ScaleGrid, grid: Grid2D) -> np.ndarray:
    """Non-nodal frequencies whose three coordinates lie in the covered band.

    The third coordinate is the aliased frequency sum.
    """
    lo, hi = scale_grid.covered_band()
    tol = 1e-12
    xi1, xi2 = grid.freqs()
    xs = grid.sum_freq()

    def inside(v):
        a = np.abs(v)
        return (a >= lo * (1 - tol)) & (a <= hi * (1 + tol))

    return np.broadcast_to(inside(xi1) & inside(xi2), grid.shape) & inside(xs)


def leakage_fraction(f: Signal2D, scale_grid: ScaleGrid) -> float:
    """Share of spectral energy of ``f`` outside the covered band."""
    e = np.abs(np.fft.fft2(f.values)) ** 2
    total = e.sum()
    if total == 0:
        return 0.0
    return float(e[~covered_mask(scale_grid, f.grid)].sum() / total)


def _square_sums(
    fhat: np.ndarray,
    family,
    scale_grid: ScaleGrid,
    grid: Grid2D,
    area: bool,
    bands: tuple | None = None,
):
    """``sum_r w |f * phi_r|^2`` (optionally convolved with ``chi_r``) for a stack of spectra.

    ``fhat`` has shape ``(B, n, n)`` and carries the plain FFT (no weight).
    Families are even in each frequency, so real signals stay real and the
    half-spectrum transforms suffice. With ``bands`` (one integer label per
    radius and axis) the unconvolved energies are also summed per label
    triple and returned as a second value.
    """
    n, h = grid.n1, grid.h
    ks = grid.sum_freq_index()
    radii = scale_grid.radii
    K = len(radii)
    w3 = scale_grid.weight**3
    flip = (-np.arange(n)) % n
    real = bool(
        np.all(np.abs(fhat - np.conj(fhat[:, flip][:, :, flip])) <= 1e-12 * max(1.0, np.abs(fhat).max()))
    )
    H0 = np.stack([family.axis_hat(0, r, n, h) for r in radii])
    H1 = np.stack([family.axis_hat(1, r, n, h) for r in radii])
    H2 = np.stack([family.axis_hat(2, r, n, h) for r in radii])[:, ks]
    tol = 1e-12 * max(1e-300, np.abs(fhat).max())
    support = np.any(np.abs(fhat) > tol, axis=0)
    rows = np.any(support, axis=1)
    cols = np.any(support, axis=0)
    live0 = [i for i in range(K) if np.any(H0[i][rows])]
    live1 = [i for i in range(K) if np.any(H1[i][cols])]
    half = n // 2 + 1
    if real:
        fhat = fhat[..., :half]
        H2 = H2[..., :half]
        support = support[:, :half]
        H1 = H1[:, :half]
    B = fhat.shape[0]
    out = np.zeros((B, n, n))
    keys = [np.array([_ball_key((r, r, r), n, h)[0] for r in radii])] * 3
    groups: dict = {}
    band_acc: dict = {}

    def add(store, key, val):
        if key in store:
            store[key] += val
        else:
            store[key] = val.copy()

    for i1 in live0:
        for i2 in live1:
            base = H0[i1][:, None] * H1[i2][None, :]
            live = np.nonzero(np.any((H2 * base)[:, support], axis=1))[0]
            if live.size == 0:
                continue
            sym = H2[live] * base
            prod = fhat[:, None] * sym[None]
            if real:
                u = np.fft.irfft2(prod, s=(n, n), axes=(-2, -1))
                e = u * u * w3
            else:
                u = np.fft.ifft2(prod, axes=(-2, -1))
                e = (u.real**2 + u.imag**2) * w3
            if not area and bands is None:
                out += e.sum(axis=1)
                continue
            # radii are sorted, so ball sizes and band labels form runs along i3
            for labels, store, tag in ((keys, groups, area), (bands, band_acc, bands is not None)):
                if not tag:
                    continue
                lab = labels[2][live]
                starts = np.concatenate([[0], np.nonzero(np.diff(lab))[0] + 1])
                sums = np.add.reduceat(e, starts, axis=1)
                for s_idx, st in enumerate(starts):
                    add(store, (labels[0][i1], labels[1][i2], lab[st]), sums[:, s_idx])
            if not area:
                out += e.sum(axis=1)
    if area:
        for key, acc in groups.items():
            kh = _ball_hat_from_key(key, grid)
            out += np.fft.ifft2(np.fft.fft2(acc, axes=(-2, -1)) * kh, axes=(-2, -1)).real
        np.maximum(out, 0.0, out=out)
    if bands is not None:
        return out, band_acc
    return out


def _ball_key(r, n, h):
    # balls are identified by their cell counts; radii below h give one cell
    return tuple(int(np.count_nonzero(np.abs(signed_index(n) * h) < max(ri, h))) for ri in r)


def _ball_hat_from_key(key, grid: Grid2D) -> np.ndarray:
    n, h = grid.n1, grid.h
    hats = []
    for c in key:
        radius = max(c // 2 + 0.5, 1.0) * h
        hats.append(np.fft.fft(axis_ball(radius, n, h)) * h)
    return hats[0][:, None] * hats[1][None, :] * hats[2][grid.sum_freq_index()]


def _stack(fs) -> tuple[np.ndarray, Grid2D]:
    if isinstance(fs, Signal2D):
        return np.fft.fft2(fs.values)[None], fs.grid
    fs = list(fs)
    return np.stack([np.fft.fft2(f.values) for f in fs]), fs[0].grid


def g_square(f: Signal2D, family, scale_grid: ScaleGrid) -> Signal2D:
    """Littlewood-Paley square function ``(sum_r w |f * phi_r|^2)^(1/2)``."""
    fh, grid = _stack(f)
    return Signal2D(grid, np.sqrt(_square_sums(fh, _family(family), scale_grid, grid, False)[0]))


def area_function(f: Signal2D, family, scale_grid: ScaleGrid) -> Signal2D:
    """Area function ``(sum_r w (|f * phi_r|^2 * chi_r))^(1/2)``.

    Radii below the grid spacing use the one-cell ball.
    """
    fh, grid = _stack(f)
    return Signal2D(grid, np.sqrt(_square_sums(fh, _family(family), scale_grid, grid, True)[0]))


def g_square_batch(fs, family, scale_grid: ScaleGrid, area: bool = False) -> list[Signal2D]:
    """Square (or area) functions of several signals sharing one grid."""
    fh, grid = _stack(fs)
    sums = _square_sums(fh, _family(family), scale_grid, grid, area)
    return [Signal2D(grid, np.sqrt(s)) for s in sums]


def reconstruct(f: Signal2D, pair: PairPsiPhi, scale_grid: ScaleGrid, warn: bool = True) -> Signal2D:
    """``sum_r w f * psi_r * phi_r``; energy outside the covered band is reported."""
    frac = leakage_fraction(f, scale_grid)
    if warn and frac > 1e-12:
        warnings.warn(f"{frac:.3e} of the energy lies outside the covered band", BandLeakageWarning)
    cal = pair.calibration(scale_grid, f.grid)
    out = np.fft.ifft2(np.fft.fft2(f.values) * cal)
    if np.isrealobj(f.values):
        out = out.real
    return Signal2D(f.grid, out)
