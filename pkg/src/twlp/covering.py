"""Maximal dyadic tubes inside discrete open sets, hat enlargements and covering sums.

All five tube types reduce to axis-aligned dyadic blocks once the mask is
read in the type's factor coordinates: the shears ``(x1 - x2, x2)`` and
``(x1, x2 - x1)`` map the periodic pixel lattice onto itself. Containment
and density of every dyadic block are then read off pyramids of block
counts.

Sides are physical (``2**s`` with ``h`` a power of two); pixel ``(i, j)``
sits at ``(i h, j h)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .maximal import ScaleList, tube_mask
from .signal_grid import Grid2D
from .tubes import ALL_KINDS, DyadicKind, DyadicTube, kind_allows


@dataclass(frozen=True)
class OpenSetMask:
    grid: Grid2D
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != self.grid.shape:
            raise ValueError(f"mask shape {m.shape} does not match grid {self.grid.shape}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def measure(self) -> float:
        return self.grid.cell_area * self.count

    def __or__(self, other: "OpenSetMask") -> "OpenSetMask":
        return OpenSetMask(self.grid, self.mask | other.mask)


class HatCase(enum.Enum):
    PLAIN = "Plain"
    CASE1 = "Case1"
    CASE2 = "Case2"


@dataclass(frozen=True)
class MaximalTubeEntry:
    """A maximal tube with its hat scale.

    ``hat_scale`` is the exponent of the enlarged first factor and
    ``hat_scale2`` the exponent reached by the second factor (it only moves
    in the joint growth of ``CASE2``). ``capped`` flags hats stopped by the
    scale range rather than by the density condition.
    """

    tube: DyadicTube
    hat_scale: int
    case: HatCase = HatCase.PLAIN
    hat_scale2: int | None = None
    capped: bool = False
    direction: int = 2

    @property
    def ratio(self) -> float:
        return 2.0 ** (self.tube.s1 - self.hat_scale)


def _log2h(grid: Grid2D) -> int:
    e = np.log2(grid.h)
    if abs(e - round(e)) > 1e-12:
        raise ValueError("dyadic machinery needs a power-of-two spacing h")
    if grid.n1 != grid.n2:
        raise ValueError("dyadic machinery needs a square grid")
    return int(round(e))


def sheared(mask: np.ndarray, kind: DyadicKind) -> np.ndarray:
    """``M[u, v]`` = mask value at the pixel with factor coordinates ``(u, v)``."""
    n = mask.shape[0]
    u = np.arange(n)[:, None]
    v = np.arange(n)[None, :]
    if kind.family == "rect":
        return np.asarray(mask)
    if kind.family == "first":
        return np.asarray(mask)[(u + v) % n, np.broadcast_to(v, (n, n))]
    return np.asarray(mask)[np.broadcast_to(u, (n, n)), (u + v) % n]


def unsheared(values: np.ndarray, kind: DyadicKind) -> np.ndarray:
    """Inverse of :func:`sheared`."""
    n = values.shape[0]
    x1 = np.arange(n)[:, None]
    x2 = np.arange(n)[None, :]
    if kind.family == "rect":
        return np.asarray(values)
    if kind.family == "first":
        return np.asarray(values)[(x1 - x2) % n, np.broadcast_to(x2, (n, n))]
    return np.asarray(values)[np.broadcast_to(x1, (n, n)), (x2 - x1) % n]


class _Pyramid:
    """Block counts ``counts[a][b]`` of a sheared mask for blocks of ``2**a x 2**b`` pixels."""

    def __init__(self, mask: np.ndarray, kind: DyadicKind):
        m = sheared(mask, kind).astype(np.int64)
        n = m.shape[0]
        self.levels = int(np.log2(n))
        rows = [m]
        for _ in range(self.levels):
            p = rows[-1]
            rows.append(p[0::2] + p[1::2])
        self.counts = []
        for r in rows:
            col = [r]
            for _ in range(self.levels):
                p = col[-1]
                col.append(p[:, 0::2] + p[:, 1::2])
            self.counts.append(col)

    def count(self, a: int, b: int, k1, k2):
        c = self.counts[a][b]
        return c[np.mod(k1, c.shape[0]), np.mod(k2, c.shape[1])]

    def full(self, a: int, b: int) -> np.ndarray:
        return self.counts[a][b] == (1 << (a + b))


@lru_cache(maxsize=64)
def _pyramid_cached(key: bytes, n: int, kind: DyadicKind) -> _Pyramid:
    mask = np.frombuffer(key, dtype=bool).reshape(n, n)
    return _Pyramid(mask, kind)


def _pyramid(omega: OpenSetMask, kind: DyadicKind) -> _Pyramid:
    return _pyramid_cached(omega.mask.tobytes(), omega.grid.n1, kind)


def _exponent_range(grid: Grid2D, scale_range) -> tuple[int, int]:
    """Pixel exponents ``(a_lo, a_hi)`` for a physical scale range."""
    e = _log2h(grid)
    top = int(np.log2(grid.n1))
    if scale_range is None:
        return 0, top
    lo, hi = scale_range
    a_lo, a_hi = max(0, int(lo) - e), min(top, int(hi) - e)
    if a_lo > a_hi:
        raise ValueError(f"scale range {scale_range} is empty on this grid")
    return a_lo, a_hi


def maximal_tubes(
    omega: OpenSetMask,
    kind: DyadicKind,
    direction: int,
    scale_range: tuple[int, int] | None = None,
) -> list[MaximalTubeEntry]:
    """Type-``kind`` dyadic tubes in ``omega`` that are maximal in one direction.

    A contained tube is maximal in direction 1 (2) when its dyadic parent in
    the first (second) factor is not contained, or does not exist within the
    type and the scale range. For the slanted types the second factor runs
    along the diagonal. Entries come back unenlarged (``hat_scale = s1``).
    """
    if direction not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    e = _log2h(omega.grid)
    a_lo, a_hi = _exponent_range(omega.grid, scale_range)
    if omega.count == 0:
        return []
    pyr = _pyramid(omega, kind)
    out = []
    for a in range(a_lo, a_hi + 1):
        for b in range(a_lo, a_hi + 1):
            if not kind_allows(kind, a, b):
                continue
            full = pyr.full(a, b)
            if not full.any():
                continue
            pa, pb = (a + 1, b) if direction == 1 else (a, b + 1)
            if pa <= a_hi and pb <= a_hi and kind_allows(kind, pa, pb):
                parent = pyr.full(pa, pb)
                if direction == 1:
                    blocked = parent[np.arange(full.shape[0]) // 2][:, :]
                else:
                    blocked = parent[:, np.arange(full.shape[1]) // 2]
                maximal = full & ~blocked
            else:
                maximal = full
            for k1, k2 in zip(*np.nonzero(maximal)):
                t = DyadicTube(kind, a + e, b + e, int(k1), int(k2))
                out.append(MaximalTubeEntry(t, a + e, direction=direction))
    out.sort(key=lambda en: en.tube.key())
    return out


def fully_maximal_tubes(
    omega: OpenSetMask, kind: DyadicKind, scale_range: tuple[int, int] | None = None
) -> list[DyadicTube]:
    """Tubes maximal in both directions: not inside any larger type-``kind`` tube in ``omega``."""
    one = {en.tube for en in maximal_tubes(omega, kind, 1, scale_range)}
    two = {en.tube for en in maximal_tubes(omega, kind, 2, scale_range)}
    return sorted(one & two)


def fully_maximal_flags(omega: OpenSetMask, kind: DyadicKind, scale_range=None) -> dict:
    """``{(a, b): flags}`` over pixel exponents; ``flags[k1, k2]`` marks fully maximal blocks."""
    a_lo, a_hi = _exponent_range(omega.grid, scale_range)
    pyr = _pyramid(omega, kind)
    out = {}
    for a in range(a_lo, a_hi + 1):
        for b in range(a_lo, a_hi + 1):
            if not kind_allows(kind, a, b):
                continue
            flags = pyr.full(a, b).copy()
            if a + 1 <= a_hi and kind_allows(kind, a + 1, b):
                flags &= ~pyr.full(a + 1, b)[np.arange(flags.shape[0]) // 2]
            if b + 1 <= a_hi and kind_allows(kind, a, b + 1):
                flags &= ~pyr.full(a, b + 1)[:, np.arange(flags.shape[1]) // 2]
            out[(a, b)] = flags
    return out


def _density_above_half(pyr: _Pyramid, a, b, k1, k2) -> bool:
    return 2 * int(pyr.count(a, b, k1, k2)) > (1 << (a + b))


def hat_enlargement(
    entry: MaximalTubeEntry,
    omega: OpenSetMask,
    kind: DyadicKind | None = None,
    scale_range: tuple[int, int] | None = None,
) -> MaximalTubeEntry:
    """Enlarge the first factor ``I`` of a maximal tube to ``I_hat``.

    Densities are taken in ``omega``. Rectangles and the types whose first
    factor is the longer side use the longest dyadic ``I_hat`` with
    ``|I_hat x J ∩ omega| > |I_hat x J| / 2``. When the first factor is the
    shorter side (types II and IV) the split on the density at ``|I| = |J|``
    decides between that search below ``|J|`` (``CASE1``) and a joint
    growth of both factors that keeps the side ratio (``CASE2``).
    """
    t = entry.tube
    kind = kind or t.kind
    if kind is not t.kind:
        raise ValueError("entry type does not match the requested type")
    e = _log2h(omega.grid)
    _, a_hi = _exponent_range(omega.grid, scale_range)
    pyr = _pyramid(omega, kind)
    a, b = t.s1 - e, t.s2 - e
    k1, k2 = t.k1, t.k2

    def dense(da, db):
        return _density_above_half(pyr, a + da, b + db, k1 >> da, k2 >> db)

    shorter_first = kind in (DyadicKind.II, DyadicKind.IV)
    if not shorter_first:
        best = 0
        for d in range(1, a_hi - a + 1):
            if dense(d, 0):
                best = d
        capped = a + best == a_hi
        return replace(entry, hat_scale=t.s1 + best, case=HatCase.PLAIN, hat_scale2=t.s2, capped=capped)
    k0 = b - a
    if not dense(k0, 0):
        best = 0
        for d in range(1, k0):
            if dense(d, 0):
                best = d
        return replace(entry, hat_scale=t.s1 + best, case=HatCase.CASE1, hat_scale2=t.s2, capped=False)
    best = 0
    top = a_hi - b
    for l in range(1, top + 1):
        if dense(k0 + l, l):
            best = l
    capped = best == top
    return replace(
        entry, hat_scale=t.s1 + k0 + best, case=HatCase.CASE2, hat_scale2=t.s2 + best, capped=capped
    )


def covering_sum(entries, kappa: float, m: int = 1, include_capped: bool = False) -> float:
    """``sum |R| (l(I) / l(I_hat))**(kappa m)`` over the entries.

    Capped hats are skipped unless ``include_capped`` is set.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    total = 0.0
    for en in entries:
        if en.capped and not include_capped:
            continue
        total += en.tube.volume**m * en.ratio ** (kappa * m)
    return float(total)


def dyadic_maximal(values: np.ndarray, grid: Grid2D, kind: DyadicKind, scale_range=None) -> np.ndarray:
    """Uncentered maximal average over type-``kind`` dyadic tubes containing each pixel."""
    a_lo, a_hi = _exponent_range(grid, scale_range)
    v = sheared(np.abs(values).astype(float), kind)
    n = v.shape[0]
    sums = [v]
    for _ in range(a_hi):
        p = sums[-1]
        sums.append(p[0::2] + p[1::2])
    out = np.zeros_like(v)
    for a in range(a_lo, a_hi + 1):
        col = sums[a]
        for b in range(0, a_hi + 1):
            if b >= a_lo and kind_allows(kind, a, b):
                avg = col / float(1 << (a + b))
                tiled = np.repeat(np.repeat(avg, 1 << a, axis=0), 1 << b, axis=1)
                out = np.maximum(out, tiled[:n, :n])
            if b < a_hi:
                col = col[:, 0::2] + col[:, 1::2]
    return unsheared(out, kind)


def tilde_set(
    omega: OpenSetMask,
    which_maximal: str | DyadicKind = "tube",
    threshold: float = 0.5,
    scale_range=None,
) -> OpenSetMask:
    """``omega`` together with ``{M(chi_omega) > threshold}``.

    ``which_maximal`` is ``"tube"`` (centered averages over tubes with
    dyadic radii) or a :class:`DyadicKind` (uncentered dyadic tubes of that
    type).
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    chi = omega.mask.astype(float)
    if isinstance(which_maximal, DyadicKind):
        m = dyadic_maximal(chi, omega.grid, which_maximal, scale_range)
    elif which_maximal == "tube":
        m = _centered_tube_maximal(chi, omega.grid)
    else:
        raise ValueError(f"unknown maximal operator {which_maximal!r}")
    return OpenSetMask(omega.grid, omega.mask | (m > threshold))


def _centered_tube_maximal(chi: np.ndarray, grid: Grid2D) -> np.ndarray:
    fh = np.fft.fft2(chi)
    out = chi.copy()
    seen = set()
    radii = ScaleList.dyadic(grid).radii
    for r1 in radii:
        for r2 in radii:
            for r3 in radii:
                mask = tube_mask((r1, r2, r3), grid)
                key = mask.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                kh = np.fft.fft2(mask / mask.sum())
                # correlation: the tube centered at x, not anchored at x
                avg = np.fft.ifft2(fh * np.conj(kh)).real
                out = np.maximum(out, avg)
    return out


def covering_ratios(
    omega: OpenSetMask,
    kappas=(0.5, 1.0, 2.0),
    kinds=ALL_KINDS,
    scale_range=None,
) -> dict:
    """``covering_sum / |omega|`` per type and ``kappa`` over ``m_2`` entries."""
    out = {}
    if omega.count == 0:
        return {(k.value, kap): 0.0 for k in kinds for kap in kappas}
    for kind in kinds:
        entries = [
            hat_enlargement(en, omega, kind, scale_range)
            for en in maximal_tubes(omega, kind, 2, scale_range)
        ]
        for kap in kappas:
            out[(kind.value, kap)] = covering_sum(entries, kap) / omega.measure
    return out


def random_open_set(grid: Grid2D, rng: np.random.Generator, pieces: int = 4, coarse: int = 16) -> OpenSetMask:
    """Union of random dyadic tubes of random types on a coarse lattice.

    Shapes are aligned to the ``coarse``-point lattice of the same period, so
    every refining resolution samples the same continuous set.
    """
    n = grid.n1
    if n % coarse:
        raise ValueError("grid must refine the coarse lattice")
    step = n // coarse
    top = int(np.log2(coarse))
    mask = np.zeros((n, n), dtype=bool)
    for _ in range(pieces):
        kind = ALL_KINDS[rng.integers(len(ALL_KINDS))]
        while True:
            a, b = (int(v) for v in rng.integers(0, top - 1, 2))
            if kind_allows(kind, a, b):
                break
        k1 = int(rng.integers(coarse >> a))
        k2 = int(rng.integers(coarse >> b))
        block = np.zeros((n, n), dtype=bool)
        u0, v0 = k1 * (step << a), k2 * (step << b)
        block[u0 : u0 + (step << a), v0 : v0 + (step << b)] = True
        mask |= unsheared(block, kind)
    return OpenSetMask(grid, mask)
