"""Twisted Laplacians, the tent-based atomic decomposition and moment-zero blocks.

The decomposition splits the reproducing identity
``f = sum_r w f * phi_r * psi_r`` along tents: every radius triple falls in
a dyadic band ``j`` (sub-pixel scales are clamped to pixel cells), every
pixel lies in one cell of that band, and every cell is given a level ``k``
from the area function on its enlargement. Cells of one level and type form
one atom; inside it each cell is attached to one maximal tube of the
enlarged open set, which gives the particles.

Potentials ``b`` are assembled without per-tube convolutions. The compact
potential ``Psi_r`` is a short sum of pixel taps, and because both the tap
weights and ``phi_r`` factor over the three axes, the band sums
``sum_r kappa_r(t) f * phi_r`` for each tap ``t`` are single inverse FFTs.
Each cell then contributes its restriction of those maps, shifted by ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constants
from .covering import OpenSetMask, dyadic_maximal, fully_maximal_flags, unsheared
from .littlewood_paley import PairPsiPhi, ScaleGrid, _square_sums, covered_mask, smooth_step
from .signal_grid import Grid2D, Signal2D, apply_symbol, signed_index
from .tubes import (
    ALL_KINDS,
    DyadicKind,
    DyadicTube,
    TubeParams,
    enlarge,
    factor_coords,
    from_factor_coords,
    resolve_scale,
    tube_contains,
)


@dataclass(frozen=True)
class LaplacianOrder:
    N1: int = 1
    N2: int = 1
    N3: int = 1

    def __post_init__(self):
        if min(self.N1, self.N2, self.N3) < 1:
            raise ValueError("Laplacian orders must be positive")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.N1, self.N2, self.N3)


def laplacian_symbols(grid: Grid2D) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symbols ``xi1^2``, ``xi2^2`` and ``(xi1 + xi2)^2`` (aliased sum) on the grid."""
    xi1, xi2 = grid.freqs()
    s1 = np.broadcast_to(xi1 * xi1, grid.shape)
    s2 = np.broadcast_to(xi2 * xi2, grid.shape)
    xs = grid.sum_freq()
    return s1, s2, xs * xs


def laplacian1(f: Signal2D) -> Signal2D:
    return apply_symbol(f, laplacian_symbols(f.grid)[0])


def laplacian2(f: Signal2D) -> Signal2D:
    return apply_symbol(f, laplacian_symbols(f.grid)[1])


def laplacian_twist(f: Signal2D) -> Signal2D:
    return apply_symbol(f, laplacian_symbols(f.grid)[2])


def laplacian_product_symbol(grid: Grid2D, powers) -> np.ndarray:
    s1, s2, s3 = laplacian_symbols(grid)
    p1, p2, p3 = powers
    return s1**p1 * s2**p2 * s3**p3


def apply_laplacians(values: np.ndarray, grid: Grid2D, powers) -> np.ndarray:
    """``Delta_1^p1 Delta_2^p2 Delta_twist^p3`` on an array (or a stack) of samples."""
    sym = laplacian_product_symbol(grid, powers)
    out = np.fft.ifft2(np.fft.fft2(values, axes=(-2, -1)) * sym, axes=(-2, -1))
    return out.real if np.isrealobj(values) else out


@dataclass
class AtomRecord:
    """One atom: a level, a type, an open set and its particles.

    ``particles[R]`` and ``potentials[R]`` are normalized by ``lam``, so the
    atom is ``sum_R particles[R]`` and its contribution to ``f`` is
    ``lam`` times that.
    """

    kind: DyadicKind
    omega: OpenSetMask
    particles: dict
    potentials: dict
    lam: float
    level: int
    orders: LaplacianOrder = field(default_factory=LaplacianOrder)
    sigma: int = 2
    patch_pixels: int = 0
    cells: int = 0

    @property
    def grid(self) -> Grid2D:
        return self.omega.grid

    def atom(self) -> Signal2D:
        total = np.zeros(self.grid.shape)
        for a in self.particles.values():
            total = total + a.values
        return Signal2D(self.grid, total)

    def summary(self) -> dict:
        return {
            "type": self.kind.value,
            "level": int(self.level),
            "lambda": float(self.lam),
            "omega_measure": float(self.omega.measure),
            "particles": len(self.particles),
            "cells": int(self.cells),
            "patch_pixels": int(self.patch_pixels),
        }


@dataclass
class Decomposition:
    records: list
    reconstruction: Signal2D
    area: Signal2D
    report: dict

    @property
    def sum_abs_lambda(self) -> float:
        return float(sum(abs(r.lam) for r in self.records))


def _band_labels(scale_grid: ScaleGrid, e_h: int) -> np.ndarray:
    """Dyadic band ``floor(log2 r)`` of each radius, clamped to the pixel scale."""
    k = np.arange(scale_grid.k_lo, scale_grid.k_hi + 1)
    return np.maximum(np.floor_divide(k, scale_grid.q), e_h)


def _tube_pixels(tube_params: TubeParams, grid: Grid2D) -> np.ndarray:
    """Flat indices of the pixels of a periodic tube."""
    n, h = grid.n1, grid.h
    a, b = max(tube_params.r), sorted(tube_params.r)[1]
    reach = int(np.ceil((a + b) / h)) + 2
    c = np.round(np.asarray(tube_params.center) / h).astype(int)
    i = np.arange(c[0] - reach, c[0] + reach + 1)
    j = np.arange(c[1] - reach, c[1] + reach + 1)
    I, J = np.meshgrid(i, j, indexing="ij")
    pts = np.stack([I * h, J * h], axis=-1)
    inside = tube_contains(tube_params, pts)
    flat = np.mod(I[inside], n) * n + np.mod(J[inside], n)
    return np.unique(flat)


def _cell_anchor_pixels(kind: DyadicKind, a: int, b: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel anchors of all cells with pixel exponents ``(a, b)``, in sheared index order."""
    k1 = np.arange(n >> a)[:, None] << a
    k2 = np.arange(n >> b)[None, :] << b
    x1, x2 = from_factor_coords(kind, k1, k2)
    x1, x2 = np.broadcast_arrays(x1, x2)
    return np.mod(x1, n), np.mod(x2, n)


def _enlarged_offsets(kind: DyadicKind, s1: int, s2: int, sigma: int, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Pixel offsets of the enlargement of the cell anchored at the origin."""
    n = grid.n1
    flat = _tube_pixels(enlarge(DyadicTube(kind, s1, s2, 0, 0), sigma), grid)
    return flat // n, flat % n


def _tap_tables(pair: PairPsiPhi, scale_grid: ScaleGrid, grid: Grid2D, labels: np.ndarray):
    """Per axis and band: ``{offset: sum_r w h Psi_r(offset) phi_hat_r}``."""
    n, h = grid.n1, grid.h
    w = scale_grid.weight
    radii = scale_grid.radii
    off = signed_index(n)
    tables = []
    for axis in range(3):
        cap = pair.caps[axis]
        per_band: dict = {}
        for r, j in zip(radii, labels):
            samples = cap.samples(r, n, h)
            phi_hat = pair.phi_family.axis_hat(axis, r, n, h)
            if not np.any(phi_hat):
                continue
            band = per_band.setdefault(int(j), {})
            for idx in np.nonzero(samples)[0]:
                t = int(off[idx])
                contrib = w * h * samples[idx] * phi_hat
                band[t] = band[t] + contrib if t in band else contrib
        tables.append(per_band)
    return tables


def _band_symbols(tables, band, grid: Grid2D) -> dict:
    """``{(t1, t2): symbol}`` for one band triple."""
    ks = grid.sum_freq_index()
    t1s, t2s, t3s = (tables[i].get(band[i], {}) for i in range(3))
    out: dict = {}
    for c, A3 in t3s.items():
        a3 = A3[ks]
        for a, A1 in t1s.items():
            for b, A2 in t2s.items():
                t = (a + c, b + c)
                sym = A1[:, None] * A2[None, :] * a3
                if t in out:
                    out[t] += sym
                else:
                    out[t] = sym
    return out


def _check_tent_range(scale_grid: ScaleGrid, grid: Grid2D, labels: np.ndarray) -> None:
    L = grid.n1 * grid.h
    top = int(labels.max())
    if 2.0 ** (top + 1) > L:
        raise ValueError(
            f"scale grid reaches radius {scale_grid.radii[-1]:.4g}: tent cells of side 2^{top} "
            f"do not fit twice in the period {L:g}; shrink the scale range"
        )


def atom_decompose(
    f: Signal2D,
    pair: PairPsiPhi,
    scale_grid: ScaleGrid,
    type_filter=ALL_KINDS,
    N: LaplacianOrder | None = None,
    sigma: int = 2,
    dynamic_range: int = 16,
) -> Decomposition:
    """Tent-based atomic decomposition of a real in-band signal.

    Levels run over ``[k_max - dynamic_range, k_max]``; tent energy of cells
    below that range, and of types outside ``type_filter``, is left in the
    residual. The report records the reconstruction error and the budget
    ratios ``sum |lambda| / ||S||_1`` and ``sum 2^k |Omega~_k| / ||S||_1``.
    """
    N = N or LaplacianOrder()
    if tuple(pair.orders) != N.as_tuple():
        raise ValueError(f"pair orders {pair.orders} do not match Laplacian orders {N.as_tuple()}")
    if np.iscomplexobj(f.values) and np.any(f.values.imag):
        raise ValueError("the decomposition handles real signals")
    grid = f.grid
    n, h = grid.n1, grid.h
    e_h = int(round(np.log2(h)))
    if grid.n1 != grid.n2 or abs(np.log2(h) - e_h) > 1e-12:
        raise ValueError("the decomposition needs a square grid with power-of-two spacing")
    labels = _band_labels(scale_grid, e_h)
    _check_tent_range(scale_grid, grid, labels)
    fv = np.asarray(f.values.real, dtype=float)
    fhat = np.fft.fft2(fv)[None]
    kinds = tuple(type_filter)
    empty_report = {
        "relative_error": 0.0,
        "error_vs_input": 0.0,
        "leakage": 0.0,
        "unassigned_fraction": 0.0,
        "window_loss": 0.0,
        "levels": [],
        "sum_abs_lambda": 0.0,
        "s_l1": 0.0,
        "lambda_ratio": 0.0,
        "layer_cake_ratio": 0.0,
    }
    if not np.any(fv):
        zero = Signal2D(grid, np.zeros(grid.shape))
        return Decomposition([], zero, zero, empty_report)

    sq, band_energy = _square_sums(
        fhat, pair.phi_family, scale_grid, grid, True, bands=(labels, labels, labels)
    )
    S = np.sqrt(sq[0])
    s_l1 = float(S.sum() * grid.cell_area)
    band_energy = {tuple(int(v) for v in k): v[0] for k, v in band_energy.items()}
    smax = float(S.max())
    k_top = int(np.ceil(np.log2(smax))) - 1
    k_min = k_top - dynamic_range
    tau = 2.0 ** -(sigma + 1)

    # levels of every cell of every band
    bands = {}
    for band in sorted(band_energy):
        kind, s1, s2 = resolve_scale(band)
        a, b = s1 - e_h, s2 - e_h
        oi, oj = _enlarged_offsets(kind, s1, s2, sigma, grid)
        ai, aj = _cell_anchor_pixels(kind, a, b, n)
        pix = (np.mod(ai[..., None] + oi, n) * n + np.mod(aj[..., None] + oj, n)).reshape(-1, oi.size)
        vals = S.reshape(-1)[pix]
        m = int(np.floor(tau * oi.size)) + 1
        s_m = -np.partition(-vals, m - 1, axis=1)[:, m - 1]
        with np.errstate(divide="ignore"):
            lev = np.where(s_m > 0, np.ceil(np.log2(np.where(s_m > 0, s_m, 1.0))) - 1, -np.inf)
        lev = np.where(lev >= k_min, lev, -np.inf)
        bands[band] = dict(kind=kind, s=(s1, s2), ab=(a, b), pix=pix, level=lev.reshape(ai.shape))

    # open sets, maximal tubes and particle labels per (level, type)
    groups = sorted(
        {
            (int(k), d["kind"])
            for d in bands.values()
            if d["kind"] in kinds
            for k in np.unique(d["level"][np.isfinite(d["level"])])
        },
        key=lambda g: (g[0], g[1].value),
    )
    for d in bands.values():
        d["label"] = np.full(d["level"].shape, -1, dtype=np.int64)
    particle_tubes: list = []
    particle_group: list = []
    group_info = {}
    s_max_exp = min(int(np.log2(n)) + e_h, int(labels.max()) + sigma)
    for gi, (k, kind) in enumerate(groups):
        omega_k = S > 2.0**k
        m_val = dyadic_maximal(omega_k.astype(float), grid, kind, (e_h, s_max_exp))
        base = m_val > 2.0 ** -(3 * sigma + 1)
        tilde = base.copy().reshape(-1)
        members = []
        for band, d in bands.items():
            if d["kind"] is not kind:
                continue
            sel = d["level"] == k
            if sel.any():
                members.append((band, sel))
                tilde[d["pix"][sel.reshape(-1)].reshape(-1)] = True
        tilde = tilde.reshape(grid.shape)
        omega = OpenSetMask(grid, tilde)
        flags = fully_maximal_flags(omega, kind)
        order = sorted(flags, key=lambda ab: (-(ab[0] + ab[1]), ab[0]))
        index: dict = {}
        ncells = 0
        for band, sel in members:
            d = bands[band]
            a, b = d["ab"]
            k1, k2 = np.nonzero(sel)
            chosen = np.full(k1.size, -1, dtype=np.int64)
            for a2, b2 in order:
                if a2 < a or b2 < b:
                    continue
                K1, K2 = k1 >> (a2 - a), k2 >> (b2 - b)
                hit = (chosen < 0) & flags[(a2, b2)][K1, K2]
                for q in np.nonzero(hit)[0]:
                    key = (a2, b2, int(K1[q]), int(K2[q]))
                    if key not in index:
                        index[key] = len(particle_tubes)
                        particle_tubes.append(DyadicTube(kind, a2 + e_h, b2 + e_h, key[2], key[3]))
                        particle_group.append(gi)
                    chosen[q] = index[key]
            if np.any(chosen < 0):
                raise RuntimeError("a tent cell lies in no maximal tube of the enlarged set")
            d["label"][k1, k2] = chosen
            ncells += k1.size
        group_info[gi] = dict(
            omega=omega, patch=int(np.count_nonzero(tilde & ~base)), cells=ncells, k=k, kind=kind
        )

    P = len(particle_tubes)
    pot = np.zeros((P, n, n))
    energy = np.zeros(P)
    unassigned = 0.0
    total_energy = 0.0
    tables = _tap_tables(pair, scale_grid, grid, labels)
    fh_half = np.fft.rfft2(fv)
    X, Y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    for band, d in bands.items():
        a, b = d["ab"]
        lab_sheared = np.repeat(np.repeat(d["label"], 1 << a, axis=0), 1 << b, axis=1)
        lab = unsheared(lab_sheared, d["kind"])
        E = band_energy[band] * grid.cell_area
        total_energy += E.sum()
        ok = lab >= 0
        unassigned += E[~ok].sum()
        if P:
            energy += np.bincount(lab[ok], weights=E[ok], minlength=P)
        if not ok.any():
            continue
        for t, sym in _band_symbols(tables, band, grid).items():
            W = np.fft.irfft2(fh_half * sym[:, : n // 2 + 1], s=(n, n))
            Ls = np.roll(lab, t, axis=(0, 1))
            Ws = np.roll(W, t, axis=(0, 1))
            v = Ls >= 0
            pot[Ls[v], X[v], Y[v]] += Ws[v]

    # window to the enlarged particle tube
    window_loss = 0.0
    for p, tube in enumerate(particle_tubes):
        inside = np.zeros(n * n, dtype=bool)
        inside[_tube_pixels(enlarge(tube, sigma), grid)] = True
        inside = inside.reshape(grid.shape)
        window_loss += float(np.sum(pot[p][~inside] ** 2))
        pot[p][~inside] = 0.0
    part = apply_laplacians(pot, grid, N.as_tuple()) if P else pot

    records = []
    recon = np.zeros(grid.shape)
    for gi, info in group_info.items():
        idx = [p for p in range(P) if particle_group[p] == gi]
        e_group = float(energy[idx].sum())
        contrib = part[idx].sum(axis=0) if idx else np.zeros(grid.shape)
        recon += contrib
        if e_group <= 0:
            continue
        lam = float(np.sqrt(info["omega"].measure * e_group))
        records.append(
            AtomRecord(
                kind=info["kind"],
                omega=info["omega"],
                particles={particle_tubes[p]: Signal2D(grid, part[p] / lam) for p in idx},
                potentials={particle_tubes[p]: Signal2D(grid, pot[p] / lam) for p in idx},
                lam=lam,
                level=info["k"],
                orders=N,
                sigma=sigma,
                patch_pixels=info["patch"],
                cells=info["cells"],
            )
        )
    # the pair reproduces f times its calibration, which is 1 on the covered
    # band and tapers outside; errors are measured against that image
    covered = covered_mask(scale_grid, grid)
    spec = np.abs(fhat[0]) ** 2
    leak = float(spec[~covered].sum() / spec.sum())
    target = np.fft.ifft2(fhat[0] * pair.calibration(scale_grid, grid)).real
    fnorm = float(np.sqrt(np.sum(target**2))) or 1.0
    raw = float(np.sqrt(np.sum((f.values - recon) ** 2) / np.sum(f.values**2)))
    sum_lam = float(sum(r.lam for r in records))
    layer = float(sum(2.0**r.level * r.omega.measure for r in records))
    report = {
        "relative_error": float(np.sqrt(np.sum((target - recon) ** 2)) / fnorm),
        "error_vs_input": raw,
        "leakage": leak,
        "unassigned_fraction": float(unassigned / total_energy) if total_energy else 0.0,
        "window_loss": float(np.sqrt(window_loss) / fnorm),
        "levels": [int(k_min), int(k_top)],
        "sum_abs_lambda": sum_lam,
        "s_l1": s_l1,
        "lambda_ratio": sum_lam / s_l1 if s_l1 else 0.0,
        "layer_cake_ratio": layer / s_l1 if s_l1 else 0.0,
        "atoms": len(records),
        "particles": P,
    }
    return Decomposition(records, Signal2D(grid, recon), Signal2D(grid, S), report)


def reconstruct_from_atoms(records, grid: Grid2D | None = None) -> Signal2D:
    """``sum lam * a`` over the records."""
    records = list(records)
    if not records:
        if grid is None:
            raise ValueError("an empty decomposition needs the grid")
        return Signal2D(grid, np.zeros(grid.shape))
    grid = records[0].grid
    total = np.zeros(grid.shape)
    for r in records:
        total = total + r.lam * r.atom().values
    return Signal2D(grid, total)


# pairing of Laplacians with the factor sides of the particle tube: the two
# paired operators scale with l(I1), l(I2); the third is the mixed one
_PAIRING = {
    "rect": (0, 1, 2),
    "first": (0, 2, 1),
    "second": (2, 1, 0),
}


@dataclass
class AtomValidation:
    support_ok: bool
    support_leak: float
    identity_error: float
    ratios: dict
    worst: dict
    passed: bool
    violations: list

    def as_dict(self) -> dict:
        return {
            "support_ok": self.support_ok,
            "support_leak": self.support_leak,
            "identity_error": self.identity_error,
            "worst": self.worst,
            "pass": self.passed,
            "violations": list(self.violations),
        }


def _norms_sq(F: np.ndarray, grid: Grid2D, powers) -> np.ndarray:
    # ||Delta-powers b||^2 per particle from the unweighted FFT stack F
    sym = laplacian_product_symbol(grid, powers)
    n1, n2 = grid.shape
    return grid.cell_area / (n1 * n2) * np.sum(np.abs(F * sym) ** 2, axis=(-2, -1))


def cancellation_sums(record: AtomRecord) -> dict:
    """Weighted cancellation sums times ``|Omega|``, keyed by ``(family, k_p, k_q, alpha)``.

    Family 1 keeps the mixed operator at full power and lowers the two
    paired ones by ``k_p``, ``k_q``; family 2 drops the mixed operator and
    sweeps ``alpha`` over ``0..4 N_mixed``.
    """
    grid = record.grid
    tubes = list(record.potentials)
    if not tubes:
        return {}
    F = np.fft.fft2(np.stack([record.potentials[t].values for t in tubes]), axes=(-2, -1))
    l1 = np.array([t.side1 for t in tubes])
    l2 = np.array([t.side2 for t in tubes])
    orders = record.orders.as_tuple()
    p, q, mix = _PAIRING[record.kind.family]
    area = record.omega.measure
    out = {}
    for kp in range(orders[p] + 1):
        for kq in range(orders[q] + 1):
            pw = [0, 0, 0]
            pw[p], pw[q], pw[mix] = orders[p] - kp, orders[q] - kq, orders[mix]
            w = l1 ** (-4.0 * kp) * l2 ** (-4.0 * kq)
            out[(1, kp, kq, 0)] = float(np.sum(w * _norms_sq(F, grid, pw)) * area)
            pw[mix] = 0
            base = _norms_sq(F, grid, pw)
            for alpha in range(4 * orders[mix] + 1):
                w2 = w * l1 ** (-float(alpha)) * l2 ** (-4.0 * orders[mix] + alpha)
                out[(2, kp, kq, alpha)] = float(np.sum(w2 * base) * area)
    return out


def validate_atom(
    record: AtomRecord,
    N: LaplacianOrder | None = None,
    sigma: int | None = None,
    limits: dict | None = None,
) -> AtomValidation:
    """Check (A1) support and identity, the two L^2 budgets and the cancellation sums.

    Budgets are reported as ratios against ``1 / |Omega|`` and compared with
    ``limits`` (the shipped empirical constants by default).
    """
    if not record.potentials or set(record.potentials) != set(record.particles):
        raise ValueError("record has missing potentials")
    N = N or record.orders
    sigma = record.sigma if sigma is None else sigma
    limits = limits or constants.ATOM_LIMITS
    grid = record.grid
    n = grid.n1
    violations = []
    leak = 0.0
    ident = 0.0
    for tube, b in record.potentials.items():
        inside = np.zeros(n * n, dtype=bool)
        inside[_tube_pixels(enlarge(tube, sigma), grid)] = True
        bv = np.abs(b.values).reshape(-1)
        scale = max(float(bv.max()), 1e-300)
        leak = max(leak, float(bv[~inside].max(initial=0.0)) / scale)
        a = record.particles[tube].values
        lap = apply_laplacians(b.values, grid, N.as_tuple())
        denom = max(float(np.linalg.norm(a)), 1e-300)
        ident = max(ident, float(np.linalg.norm(a - lap)) / denom)
    support_ok = leak <= 1e-12
    if not support_ok:
        violations.append("A1-support")
    if ident > 1e-9:
        violations.append("A1-identity")
    h2 = grid.cell_area
    area = record.omega.measure
    a2 = float(sum(np.sum(np.abs(p.values) ** 2) * h2 for p in record.particles.values()) * area)
    a3 = float(np.sum(np.abs(record.atom().values) ** 2) * h2 * area)
    sums = cancellation_sums(record)
    worst = {
        "A2": a2,
        "A3": a3,
        "cancel1": max((v for k, v in sums.items() if k[0] == 1), default=0.0),
        "cancel2": max((v for k, v in sums.items() if k[0] == 2), default=0.0),
    }
    for key, val in worst.items():
        if not np.isfinite(val) or val > limits[key]:
            violations.append(key)
    ratios = {"A2": a2, "A3": a3}
    ratios.update({f"cancel{k[0]}:{k[1]},{k[2]},{k[3]}": v for k, v in sums.items()})
    return AtomValidation(support_ok, leak, ident, ratios, worst, not violations, violations)


def dilate_record(record: AtomRecord, factor: float = 2.0) -> AtomRecord:
    """The same samples on a grid with spacing ``factor * h``, renormalized as an atom.

    ``a`` scales by ``factor**-2`` and ``b`` by ``factor**(2 sum N - 2)``, the
    dilation that keeps ``||a||_2 |Omega|^(1/2)`` fixed in two dimensions.
    """
    g = record.grid
    grid = Grid2D(g.n1, g.n2, g.h * factor)
    e = int(round(np.log2(factor)))
    if abs(np.log2(factor) - e) > 1e-12:
        raise ValueError("dilation factor must be a power of two")
    sN = sum(record.orders.as_tuple())
    ca, cb = factor**-2.0, factor ** (2.0 * sN - 2.0)

    def move(t):
        return DyadicTube(t.kind, t.s1 + e, t.s2 + e, t.k1, t.k2, t.scale3)

    return AtomRecord(
        kind=record.kind,
        omega=OpenSetMask(grid, record.omega.mask),
        particles={move(t): Signal2D(grid, v.values * ca) for t, v in record.particles.items()},
        potentials={move(t): Signal2D(grid, v.values * cb) for t, v in record.potentials.items()},
        lam=record.lam,
        level=record.level,
        orders=record.orders,
        sigma=record.sigma,
        patch_pixels=record.patch_pixels,
        cells=record.cells,
    )


def _smooth_bump(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    out = np.zeros_like(t)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def fixture_atom(
    grid: Grid2D,
    tube: DyadicTube,
    N: LaplacianOrder | None = None,
    sigma: int = 2,
    spread: float = 1.0,
) -> AtomRecord:
    """Single-particle atom on ``omega = tube`` with a smooth potential inside ``R*``.

    The potential is a product bump in the tube's factor coordinates whose
    half-widths are ``spread`` times the tube's half-sides (``spread`` at
    most ``2**sigma``). It is scaled so that ``||a||_2 = |omega|^(-1/2)``.
    """
    N = N or LaplacianOrder()
    if not 0 < spread <= 2**sigma:
        raise ValueError("spread must lie in (0, 2**sigma]")
    n, h = grid.n1, grid.h
    L = n * h
    x1, x2 = (np.arange(n) * h)[:, None], (np.arange(n) * h)[None, :]
    c = tube.center
    d1 = np.mod(x1 - c[0] + L / 2, L) - L / 2
    d2 = np.mod(x2 - c[1] + L / 2, L) - L / 2
    u, v = factor_coords(tube.kind, d1, d2)
    b = _smooth_bump(u / (spread * tube.side1 / 2)) * _smooth_bump(v / (spread * tube.side2 / 2))
    b = np.broadcast_to(b, grid.shape).copy()
    inside = np.zeros(n * n, dtype=bool)
    inside[_tube_pixels(enlarge(tube, sigma), grid)] = True
    b[~inside.reshape(grid.shape)] = 0.0
    pts = np.stack(np.broadcast_arrays(x1, x2), axis=-1)
    omega = OpenSetMask(grid, tube.contains(pts, period=L))
    a = apply_laplacians(b, grid, N.as_tuple())
    if not np.any(a):
        raise ValueError("the bump has no grid samples; increase spread or the tube size")
    scale = 1.0 / (np.sqrt(np.sum(a * a) * grid.cell_area) * np.sqrt(omega.measure))
    return AtomRecord(
        kind=tube.kind,
        omega=omega,
        particles={tube: Signal2D(grid, a * scale)},
        potentials={tube: Signal2D(grid, b * scale)},
        lam=1.0,
        level=0,
        orders=N,
        sigma=sigma,
        cells=1,
    )


def plane_wave_atom(grid: Grid2D, k, N: LaplacianOrder | None = None, sigma: int = 2) -> AtomRecord:
    """Type-I atom on the whole period built from one real Fourier mode ``k``.

    The window itself is the only tube; ``b`` is the mode divided by the
    Laplacian symbol, so ``a`` is a normalized cosine.
    """
    N = N or LaplacianOrder()
    n, h = grid.n1, grid.h
    e = int(round(np.log2(n * h)))
    k1, k2 = (int(v) for v in k)
    if 0 in (k1 % n, k2 % n, (k1 + k2) % n):
        raise ValueError("the mode must avoid the three nodal lines")
    x = np.arange(n) * h
    L = n * h
    wave = np.cos(2 * np.pi * (k1 * x[:, None] + k2 * x[None, :]) / L)
    xi1, xi2 = 2 * np.pi * k1 / L, 2 * np.pi * k2 / L
    sym = xi1 ** (2 * N.N1) * xi2 ** (2 * N.N2) * (xi1 + xi2) ** (2 * N.N3)
    omega = OpenSetMask(grid, np.ones(grid.shape, dtype=bool))
    scale = 1.0 / (np.sqrt(np.sum(wave**2) * grid.cell_area) * np.sqrt(omega.measure))
    tube = DyadicTube(DyadicKind.I, e, e, 0, 0)
    return AtomRecord(
        kind=DyadicKind.I,
        omega=omega,
        particles={tube: Signal2D(grid, wave * scale)},
        potentials={tube: Signal2D(grid, wave * scale / sym)},
        lam=1.0,
        level=0,
        orders=N,
        sigma=sigma,
        cells=1,
    )


# ---------------------------------------------------------------------------
# compactly supported moment-zero blocks


@dataclass(frozen=True)
class BlockFamily:
    """Blocks ``phi_l`` with ``phi_j = sum_l (C 2^l)^(-gamma) phi_l`` on a sampled line."""

    x: np.ndarray = field(repr=False)
    dx: float
    blocks: tuple = field(repr=False)
    radii: tuple
    weights: tuple
    moment_order: int
    size_constant: float
    target: np.ndarray = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        return sum(w * b for w, b in zip(self.weights, self.blocks))

    def moments(self) -> np.ndarray:
        """``moments[l, beta] = sum x^beta phi_l dx``."""
        powers = np.stack([self.x**beta for beta in range(self.moment_order + 1)])
        return np.array([[np.sum(p * b) * self.dx for p in powers] for b in self.blocks])

    def support_radii(self) -> np.ndarray:
        out = []
        for b in self.blocks:
            nz = np.nonzero(b)[0]
            out.append(float(np.max(np.abs(self.x[nz]))) if nz.size else 0.0)
        return np.array(out)

    def reconstruction_error(self) -> float:
        diff = self.reconstruct() - self.target
        return float(np.sqrt(np.sum(diff**2) * self.dx) / np.sqrt(np.sum(self.target**2) * self.dx))


def _cutoff(x, R):
    # 1 on |x| <= R/4, 0 from |x| >= R
    return smooth_step((R - np.abs(x)) / (0.75 * R))


def _biorthogonal(x, dx, R, M):
    """``theta[nu]`` supported in ``|x| < R`` with ``sum x^beta theta_nu dx = delta``."""
    t = x / R
    bump = _smooth_bump(t)
    basis = np.stack([t**p * bump for p in range(M + 1)])
    gram = np.array([[np.sum(t**beta * bp) * dx for bp in basis] for beta in range(M + 1)])
    coef = np.linalg.solve(gram, np.eye(M + 1))
    theta = coef.T @ basis
    # rescale from moments of x/R to moments of x
    return np.stack([theta[nu] * R ** (-float(nu)) for nu in range(M + 1)])


def _tail_radius(phi: Callable, j: int, dx: float, tail: float) -> float:
    probe = np.arange(-(2.0 ** (j + 14)), 2.0 ** (j + 14) + dx, max(dx, 2.0 ** (j - 6)))
    v = np.abs(phi(probe))
    peak = v.max()
    if peak == 0:
        return 0.0
    big = np.nonzero(v > tail * peak)[0]
    return float(np.max(np.abs(probe[big]))) + max(dx, 2.0 ** (j - 6))


def schwartz_blocks(
    phi_j: Callable,
    gamma: float,
    cbar: float,
    M: int,
    j: int = 0,
    dx: float | None = None,
    tail: float = 1e-13,
    d: int = 1,
) -> BlockFamily:
    """Split a moment-zero profile on the line into compactly supported blocks.

    Block ``l`` lives in ``B(0, 2 R_l)`` with ``R_l = cbar 2^l 2^j`` and has
    vanishing discrete moments through order ``M``. Annular cutoffs give the
    raw pieces; moments are moved outward with functions biorthogonal to the
    monomials, so every block is exactly moment-free. The family stops once
    ``R_L / 4`` reaches the radius beyond which ``phi_j`` is below ``tail``.
    """
    if d != 1:
        raise NotImplementedError("blocks are implemented on the line")
    if not gamma > d:
        raise ValueError("gamma must exceed the dimension")
    if not cbar > 1:
        raise ValueError("cbar must exceed 1")
    if M < 0:
        raise ValueError("M must be non-negative")
    dx = dx or 2.0**j / 64
    X = _tail_radius(phi_j, j, dx, tail)
    R = [cbar * 2.0**j]
    single = X <= R[0]
    while not single and R[-1] / 4 < X:
        R.append(2 * R[-1])
    L = len(R) - 1
    half = 2 * R[-1] if not single else R[0]
    x = np.arange(-np.ceil(half / dx), np.ceil(half / dx) + 1) * dx
    phi = np.asarray(phi_j(x), dtype=float)
    powers = np.stack([x**beta for beta in range(M + 1)])
    mom = powers @ phi * dx
    scale = np.abs(powers) @ np.abs(phi) * dx
    if np.any(np.abs(mom) > 1e-9 * np.maximum(scale, 1e-300)):
        raise ValueError(f"profile moments through order {M} do not vanish: {mom}")
    if single:
        w = cbar**-gamma
        block = phi / w
        size = float(np.max(np.abs(block)) * 2 * R[0])
        return BlockFamily(x, dx, (block,), (R[0],), (w,), M, size, phi)
    cut = [_cutoff(x, r) for r in R]
    pieces = [cut[0] * phi] + [(cut[ell] - cut[ell - 1]) * phi for ell in range(1, L + 1)]
    m = np.array([powers @ p * dx for p in pieces])
    S = np.cumsum(m, axis=0)
    theta = [_biorthogonal(x, dx, r, M) for r in R + [2 * R[-1]]]
    blocks, weights, sizes = [], [], []
    for ell in range(L + 1):
        lam = pieces[ell].copy()
        if ell > 0:
            lam += S[ell - 1] @ theta[ell]
        lam -= S[ell] @ theta[ell + 1]
        w = (cbar * 2.0**ell) ** -gamma
        blocks.append(lam / w)
        weights.append(w)
        sizes.append(float(np.max(np.abs(lam / w)) * 2 * R[ell]))
    return BlockFamily(x, dx, tuple(blocks), tuple(R), tuple(weights), M, max(sizes), phi)
