"""Tube geometry, the five dyadic tube types, enlargements and tents.

A tube ``T(x, r)`` is an axis rectangle when ``r1, r2 >= r3`` and a
parallelogram sheared along the diagonal otherwise. Dyadic tubes are boxes
in one of three coordinate systems ("factor coordinates"):

* type I:      ``(x1, x2)``
* types II/III: ``(x1 - x2, x2)``
* types IV/V:  ``(x1, x2 - x1)``

Points are arrays whose last axis has length ``2 m``. Dyadic machinery is
planar (``m = 1``).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np


class ShapeKind(enum.Enum):
    RECTANGLE = "Rectangle"
    SLANT_FIRST = "SlantFirst"
    SLANT_SECOND = "SlantSecond"


@dataclass(frozen=True)
class TubeShape:
    kind: ShapeKind
    a: float
    b: float


@dataclass(frozen=True)
class TubeParams:
    center: tuple
    r: tuple

    def __post_init__(self):
        if len(self.r) != 3 or min(self.r) <= 0:
            raise ValueError(f"radii must be three positive numbers, got {self.r}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))


def tube_shape(r) -> TubeShape:
    r1, r2, r3 = r
    if min(r) <= 0:
        raise ValueError("radii must be positive")
    if r1 >= r3 and r2 >= r3:
        return TubeShape(ShapeKind.RECTANGLE, r1, r2)
    if r1 >= r2 and r3 >= r2:
        return TubeShape(ShapeKind.SLANT_FIRST, r1, r3)
    return TubeShape(ShapeKind.SLANT_SECOND, r2, r3)


def tube_volume(r, m: int = 1) -> float:
    s = tube_shape(r)
    return float((s.a * s.b) ** m)


def _block_norm(v: np.ndarray, m: int) -> np.ndarray:
    if m == 1:
        return np.abs(v[..., 0])
    return np.linalg.norm(v, axis=-1)


def tube_contains(t: TubeParams, p) -> np.ndarray | bool:
    """Membership of point(s) ``p`` in ``T(center, r)``."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(t.center, dtype=float)
    m = c.size // 2
    y = p - c
    y1, y2 = y[..., :m], y[..., m:]
    s = tube_shape(t.r)
    if s.kind is ShapeKind.RECTANGLE:
        out = (_block_norm(y1, m) < s.a) & (_block_norm(y2, m) < s.b)
    elif s.kind is ShapeKind.SLANT_FIRST:
        out = (_block_norm(y1 - y2, m) < s.a) & (_block_norm(y2, m) < s.b)
    else:
        out = (_block_norm(y2 - y1, m) < s.a) & (_block_norm(y1, m) < s.b)
    return bool(out) if np.ndim(out) == 0 else out


def project(points3) -> np.ndarray:
    """Quotient map ``(x1, x2, x3) -> (x1 + x3, x2 + x3)`` for planar fibers."""
    q = np.asarray(points3, dtype=float)
    return np.stack([q[..., 0] + q[..., 2], q[..., 1] + q[..., 2]], axis=-1)


def sample_product_ball(center, r, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of ``(x1, x2, 0) + (-r1, r1) x (-r2, r2) x (-r3, r3)``."""
    r = np.asarray(r, dtype=float)
    u = rng.uniform(-1.0, 1.0, (n, 3)) * r
    u[:, 0] += center[0]
    u[:, 1] += center[1]
    return u


def in_projected_ball(center, r, p) -> np.ndarray:
    """Exact membership in the image of the product ball under the quotient map.

    ``y`` is in the image iff some ``u3`` with ``|u3| < r3`` has
    ``|y1 - u3| < r1`` and ``|y2 - u3| < r2``: an intersection of three open
    intervals.
    """
    p = np.asarray(p, dtype=float)
    y1 = p[..., 0] - center[0]
    y2 = p[..., 1] - center[1]
    r1, r2, r3 = r
    lo = np.maximum(np.maximum(y1 - r1, y2 - r2), -r3)
    hi = np.minimum(np.minimum(y1 + r1, y2 + r2), r3)
    return lo < hi


def sample_tube(t: TubeParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of a planar tube via its factor-coordinate box."""
    s = tube_shape(t.r)
    u = rng.uniform(-1.0, 1.0, n) * s.a
    v = rng.uniform(-1.0, 1.0, n) * s.b
    if s.kind is ShapeKind.RECTANGLE:
        y1, y2 = u, v
    elif s.kind is ShapeKind.SLANT_FIRST:
        y1, y2 = u + v, v
    else:
        y1, y2 = v, u + v
    return np.stack([y1 + t.center[0], y2 + t.center[1]], axis=-1)


class DyadicKind(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"

    @property
    def family(self) -> str:
        return {"I": "rect", "II": "first", "III": "first", "IV": "second", "V": "second"}[self.value]


ALL_KINDS = tuple(DyadicKind)


def kind_allows(kind: DyadicKind, s1: int, s2: int) -> bool:
    if kind in (DyadicKind.II, DyadicKind.IV):
        return s1 <= s2
    if kind in (DyadicKind.III, DyadicKind.V):
        return s1 > s2
    return True


def kind_of_sides(family: str, s1: int, s2: int) -> DyadicKind:
    if family == "rect":
        return DyadicKind.I
    if family == "first":
        return DyadicKind.II if s1 <= s2 else DyadicKind.III
    return DyadicKind.IV if s1 <= s2 else DyadicKind.V


@dataclass(frozen=True, order=True)
class DyadicTube:
    """Dyadic tube with factor sides ``2**s1`` and ``2**s2``.

    ``k1, k2`` index the lattice in factor coordinates; the anchor is the
    image of ``(k1 2**s1, k2 2**s2)``. ``scale3`` records the scale triple a
    tent base came from (``None`` for tubes without a tent).
    """

    kind: DyadicKind
    s1: int
    s2: int
    k1: int
    k2: int
    scale3: tuple | None = None

    def __post_init__(self):
        if not kind_allows(self.kind, self.s1, self.s2):
            raise ValueError(f"type {self.kind.value} does not allow sides 2^{self.s1}, 2^{self.s2}")

    @property
    def side1(self) -> float:
        return 2.0**self.s1

    @property
    def side2(self) -> float:
        return 2.0**self.s2

    @property
    def volume(self) -> float:
        return self.side1 * self.side2

    @property
    def anchor(self) -> tuple[float, float]:
        n1, n2 = self.k1 * self.side1, self.k2 * self.side2
        return from_factor_coords(self.kind, n1, n2)

    @property
    def center(self) -> tuple[float, float]:
        c1 = (self.k1 + 0.5) * self.side1
        c2 = (self.k2 + 0.5) * self.side2
        return from_factor_coords(self.kind, c1, c2)

    def contains(self, p, period: float | None = None) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        u, v = factor_coords(self.kind, p[..., 0], p[..., 1])
        lo1, lo2 = self.k1 * self.side1, self.k2 * self.side2
        du, dv = u - lo1, v - lo2
        if period is not None:
            du, dv = np.mod(du, period), np.mod(dv, period)
        return (du >= 0) & (du < self.side1) & (dv >= 0) & (dv < self.side2)

    def key(self) -> tuple:
        return (self.kind.value, self.s1, self.s2, self.k1, self.k2)


def factor_coords(kind: DyadicKind, x1, x2):
    if kind.family == "rect":
        return x1, x2
    if kind.family == "first":
        return x1 - x2, x2
    return x1, x2 - x1


def from_factor_coords(kind: DyadicKind, u, v):
    if kind.family == "rect":
        return u, v
    if kind.family == "first":
        return u + v, v
    return u, u + v


def resolve_scale(j) -> tuple[DyadicKind, int, int]:
    """Type and factor side exponents for a scale triple.

    Rectangle when ``j1, j2 >= j3``; sheared along the first direction when
    ``j2`` is the smallest exponent; sheared along the second direction when
    ``j1`` is strictly smallest. For the second family the ``x1`` factor
    carries ``j3`` and the ``x2 - x1`` factor carries ``j2``.
    """
    j1, j2, j3 = (int(v) for v in j)
    if j1 >= j3 and j2 >= j3:
        return DyadicKind.I, j1, j2
    if j1 >= j2 and j3 >= j2:
        return kind_of_sides("first", j1, j3), j1, j3
    return kind_of_sides("second", j3, j2), j3, j2


def cell_of(j, p) -> DyadicTube:
    """The dyadic cell of scale triple ``j`` containing point ``p``."""
    kind, s1, s2 = resolve_scale(j)
    u, v = factor_coords(kind, float(p[0]), float(p[1]))
    return DyadicTube(kind, s1, s2, int(np.floor(u / 2.0**s1)), int(np.floor(v / 2.0**s2)), tuple(j))


def dyadic_cells(j, window: float) -> list[DyadicTube]:
    """Cells of scale ``j`` tiling the periodic square ``[0, window)^2``.

    ``window`` must be a power of two at least as large as both sides.
    """
    kind, s1, s2 = resolve_scale(j)
    c1, c2 = window / 2.0**s1, window / 2.0**s2
    if c1 < 1 or c2 < 1 or c1 != int(c1) or c2 != int(c2):
        raise ValueError(f"window {window} is not tiled by sides 2^{s1} x 2^{s2}")
    return [
        DyadicTube(kind, s1, s2, a, b, tuple(int(v) for v in j))
        for a in range(int(c1))
        for b in range(int(c2))
    ]


def enlarge(t: DyadicTube, sigma: int) -> TubeParams:
    """Concentric tube with both factor sides multiplied by ``2**sigma``.

    The third radius is chosen strictly inside the shape's case so the
    resolved shape matches the tube's family.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    h1 = 2.0 ** (t.s1 - 1 + sigma)
    h2 = 2.0 ** (t.s2 - 1 + sigma)
    if t.kind.family == "rect":
        r = (h1, h2, min(h1, h2))
    elif t.kind.family == "first":
        r = (h1, min(h1, h2) / 2, h2)
    else:
        r = (min(h1, h2) / 2, h2, h1)
    return TubeParams(t.center, r)


@dataclass(frozen=True)
class Tent:
    base: DyadicTube
    scale3: tuple

    @property
    def height_box(self) -> tuple:
        return tuple((2.0**j, 2.0 ** (j + 1)) for j in self.scale3)

    def contains(self, p, t, period: float | None = None) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = self.base.contains(p, period)
        for i, (lo, hi) in enumerate(self.height_box):
            inside = inside & (t[..., i] >= lo) & (t[..., i] < hi)
        return inside


def tent_of(t: DyadicTube) -> Tent:
    if t.scale3 is None:
        raise ValueError("tube carries no scale triple")
    kind, s1, s2 = resolve_scale(t.scale3)
    if (kind, s1, s2) != (t.kind, t.s1, t.s2):
        raise ValueError("scale triple inconsistent with the tube")
    return Tent(t, tuple(t.scale3))


def tent_partition_check(
    window: float,
    scale_range: tuple[int, int],
    n_points: int = 10_000,
    rng: np.random.Generator | None = None,
) -> float:
    """Fraction of random upper half-space points lying in exactly one tent.

    Points have ``x`` uniform on the periodic window and heights
    log-uniform over the dyadic range. Every tent of every scale triple in
    range is tested against every point.
    """
    rng = rng or np.random.default_rng(0)
    jlo, jhi = scale_range
    x = rng.uniform(0, window, (n_points, 2))
    t = 2.0 ** rng.uniform(jlo, jhi + 1, (n_points, 3))
    counts = np.zeros(n_points, dtype=np.int64)
    for j in itertools.product(range(jlo, jhi + 1), repeat=3):
        kind, s1, s2 = resolve_scale(j)
        if 2.0**s1 > window or 2.0**s2 > window:
            raise ValueError("scale range exceeds the window")
        cells = dyadic_cells(j, window)
        lo1 = np.array([c.k1 * c.side1 for c in cells])
        lo2 = np.array([c.k2 * c.side2 for c in cells])
        hbox = np.all((t >= 2.0 ** np.array(j)) & (t < 2.0 ** (np.array(j) + 1)), axis=1)
        idx = np.nonzero(hbox)[0]
        if idx.size == 0:
            continue
        u, v = factor_coords(kind, x[idx, 0], x[idx, 1])
        du = np.mod(u[:, None] - lo1[None, :], window)
        dv = np.mod(v[:, None] - lo2[None, :], window)
        hits = (du < 2.0**s1) & (dv < 2.0**s2)
        counts[idx] += hits.sum(axis=1)
    return float(np.mean(counts == 1))
