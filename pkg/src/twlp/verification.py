"""Verification suites, one per acceptance criterion, with a JSON-ready report.

Every suite takes a :class:`VerifyConfig` and returns a :class:`SuiteResult`
holding one headline metric, its threshold and a dictionary of details.
Suites are independent; a failure (or exception) in one never stops the rest.
"""
from __future__ import annotations

import itertools
import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import __version__, constants
from .atoms import LaplacianOrder, atom_decompose, reconstruct_from_atoms, schwartz_blocks, validate_atom
from .corpus import rng_for, signals
from .covering import OpenSetMask, covering_ratios, maximal_tubes
from .kernel import TwistedKernelModel, partial_fraction_terms, verify_size_bounds
from .littlewood_paley import (
    ScaleGrid,
    build_pair,
    build_phi_partition,
    covered_mask,
    g_square_batch,
    reconstruct,
)
from .maximal import chi_r, chi_r_hat, m_hl, m_iterated, m_strong, m_tube_brute, tube_average
from .multiplier import (
    RegionLabel,
    apply_multiplier,
    classify_region,
    flag_split,
    flag_weights,
    nodal_mask,
    tht_multiplier,
    tht_symbol,
)
from .signal_grid import Grid2D, Signal2D
from .tubes import (
    ALL_KINDS,
    DyadicTube,
    TubeParams,
    in_projected_ball,
    kind_allows,
    project,
    sample_product_ball,
    sample_tube,
    tent_partition_check,
    tube_contains,
    tube_volume,
)


@dataclass(frozen=True)
class VerifyConfig:
    n: int = 64
    q: int = 8
    seed: int = 42
    N: LaplacianOrder = field(default_factory=LaplacianOrder)
    sigma: int = 2
    kappas: tuple = (0.5, 1.0, 2.0)

    def echo(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "seed": self.seed,
            "N": list(self.N.as_tuple()),
            "sigma": self.sigma,
            "kappas": list(self.kappas),
        }


@dataclass
class SuiteResult:
    name: str
    metric: str
    value: float
    threshold: float
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str | None = None

    def as_dict(self, timings: bool = True) -> dict:
        out = {
            "name": self.name,
            "metric": self.metric,
            "value": _json_float(self.value),
            "threshold": _json_float(self.threshold),
            "pass": bool(self.passed),
            "details": _jsonable(self.details),
        }
        if self.error is not None:
            out["error"] = self.error
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _json_float(v):
    v = float(v)
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    return obj


def _result(name, metric, value, threshold, passed, **details) -> SuiteResult:
    return SuiteResult(name, metric, float(value), float(threshold), bool(passed), details)


# --- multiplier ---------------------------------------------------------------


def _tht_corpus(cfg: VerifyConfig) -> list[Signal2D]:
    return signals("nodal_free", Grid2D.square(cfg.n), 50, cfg.seed, 1)


def suite_tht_isometry(cfg: VerifyConfig) -> SuiteResult:
    t0 = time.perf_counter()
    fs = _tht_corpus(cfg)
    m = tht_multiplier(fs[0].grid)
    dev = max(abs(apply_multiplier(m, f).norm() / f.norm() - 1.0) for f in fs)
    elapsed = time.perf_counter() - t0
    ok = dev <= 1e-10 and elapsed < 5.0
    return _result("tht_isometry", "max |ratio - 1|", dev, 1e-10, ok, signals=len(fs), runtime_ok=elapsed < 5.0)


def suite_tht_involution(cfg: VerifyConfig) -> SuiteResult:
    fs = _tht_corpus(cfg)
    m = tht_multiplier(fs[0].grid)
    err = max(
        np.linalg.norm(apply_multiplier(m, apply_multiplier(m, f)).values + f.values) / np.linalg.norm(f.values)
        for f in fs
    )
    return _result("tht_involution", "max ||HHf + f|| / ||f||", err, 1e-10, err < 1e-10, signals=len(fs))


# three hand-picked frequencies per sector with the sector's expected phase
REGION_TABLE = [
    ((1.0, 2.0), RegionLabel.I, -1j),
    ((3.0, 0.5), RegionLabel.I, -1j),
    ((0.25, 7.0), RegionLabel.I, -1j),
    ((-1.0, 2.0), RegionLabel.II, 1j),
    ((-0.5, 3.0), RegionLabel.II, 1j),
    ((-4.0, 4.5), RegionLabel.II, 1j),
    ((-2.0, 1.0), RegionLabel.III, -1j),
    ((-5.0, 0.5), RegionLabel.III, -1j),
    ((-3.0, 2.75), RegionLabel.III, -1j),
    ((-1.0, -1.0), RegionLabel.IV, 1j),
    ((-0.5, -6.0), RegionLabel.IV, 1j),
    ((-7.0, -0.25), RegionLabel.IV, 1j),
    ((1.0, -2.0), RegionLabel.V, -1j),
    ((0.5, -5.0), RegionLabel.V, -1j),
    ((2.75, -3.0), RegionLabel.V, -1j),
    ((3.0, -1.0), RegionLabel.VI, 1j),
    ((5.0, -0.5), RegionLabel.VI, 1j),
    ((4.5, -4.0), RegionLabel.VI, 1j),
]


def suite_region_table(cfg: VerifyConfig) -> SuiteResult:
    label_miss = sum(classify_region(*xi) is not lab for xi, lab, _ in REGION_TABLE)
    value_miss = sum(complex(tht_symbol(*xi)) != val for xi, _, val in REGION_TABLE)
    grid = Grid2D.square(cfg.n)
    xi1, xi2 = np.broadcast_arrays(*grid.freqs())
    m = tht_multiplier(grid).values
    antipodal = int(np.count_nonzero(tht_symbol(-xi1, -xi2) != -m))
    misses = label_miss + value_miss + antipodal
    return _result(
        "region_table",
        "mismatches",
        misses,
        0,
        misses == 0,
        label_mismatches=label_miss,
        value_mismatches=value_miss,
        antipodal_violations=antipodal,
        frequencies=len(REGION_TABLE),
    )


def suite_flag_split(cfg: VerifyConfig) -> SuiteResult:
    grid = Grid2D.square(128)
    m = tht_multiplier(grid)
    m1, m2, m3 = flag_split(m)
    err = float(np.max(np.abs(m.values - (m1.values + m2.values + m3.values))))
    xi1, xi2 = np.broadcast_arrays(*grid.freqs())
    a, b = xi1 * xi1, xi2 * xi2
    # m1 lives where |xi1|^2 <= |xi2|^2 / 4, m2 symmetrically
    out1 = int(np.count_nonzero(m1.values[~(4 * a <= b)]))
    out2 = int(np.count_nonzero(m2.values[~(4 * b <= a)]))
    w1, w2, w3 = flag_weights(xi1, xi2)
    weight_err = float(np.max(np.abs(w1 + w2 + w3 - 1)))
    ok = err <= 1e-15 and out1 == 0 and out2 == 0
    return _result(
        "flag_split",
        "max |m - (m1 + m2 + m3)|",
        err,
        1e-15,
        ok,
        support_violations_m1=out1,
        support_violations_m2=out2,
        weight_sum_error=weight_err,
    )


def suite_partial_fractions(cfg: VerifyConfig) -> SuiteResult:
    rng = rng_for(cfg.seed, 5)
    worst = 0.0
    count = 0
    margin = 0.05
    while count < 10_000:
        x, y, z = rng.uniform(-10, 10, 3)
        s = max(abs(x), abs(y), abs(z))
        if min(abs(x), abs(y), abs(z), abs(x - y), abs(x - z), abs(y - z)) <= margin * s:
            continue
        direct = 1.0 / ((x - z) * (y - z) * z)
        worst = max(worst, abs(sum(partial_fraction_terms(x, y, z)) - direct) / abs(direct))
        count += 1
    return _result("partial_fractions", "max relative error", worst, 1e-12, worst < 1e-12, samples=count, margin=margin)


def suite_size_bounds(cfg: VerifyConfig) -> SuiteResult:
    t0 = time.perf_counter()
    reports = verify_size_bounds(TwistedKernelModel(), max_order=2)
    elapsed = time.perf_counter() - t0
    growth = max(r.refined_ratio / r.max_ratio - 1.0 for r in reports)
    ok = all(r.passed for r in reports) and elapsed < 30.0
    return _result(
        "size_bounds",
        "max relative growth under doubling",
        growth,
        0.05,
        ok,
        orders={f"{r.orders[0]},{r.orders[1]}": [r.max_ratio, r.refined_ratio] for r in reports},
        sample_set=reports[0].grid_spec,
        runtime_ok=elapsed < 30.0,
    )


# --- tubes --------------------------------------------------------------------


def suite_tube_volumes(cfg: VerifyConfig) -> SuiteResult:
    radii = 2.0 ** (np.arange(13) / 4.0)
    miss = 0
    total = 0
    for r in itertools.product(radii, repeat=3):
        top = sorted(r)
        for m in (1, 2):
            # the two largest radii carry the volume in every case
            miss += tube_volume(r, m) != (top[1] * top[2]) ** m
            total += 1
    return _result("tube_volumes", "mismatches", miss, 0, miss == 0, cases=total)


def suite_projection_sandwich(cfg: VerifyConfig) -> SuiteResult:
    rng = rng_for(cfg.seed, 8)
    outer = inner = 0
    for _ in range(1000):
        x = rng.uniform(-4, 4, 2)
        r = 2.0 ** rng.uniform(-2, 2, 3)
        pts = project(sample_product_ball(x, r, 1000, rng))
        outer += int(np.count_nonzero(~tube_contains(TubeParams(x, tuple(2 * r)), pts)))
        small = sample_tube(TubeParams(x, tuple(r / 2)), 1000, rng)
        inner += int(np.count_nonzero(~in_projected_ball(x, r, small)))
    v = outer + inner
    return _result("projection_sandwich", "membership violations", v, 0, v == 0, outer=outer, inner=inner, pairs=1000)


# --- maximal ------------------------------------------------------------------


def suite_chi_sandwich(cfg: VerifyConfig) -> SuiteResult:
    grid = Grid2D.square(cfg.n)
    h = grid.h
    rng = rng_for(cfg.seed, 9)
    mass_err = 0.0
    for _ in range(20):
        r = h * 2.0 ** rng.uniform(0, np.log2(cfg.n) - 2, 3)
        mass_err = max(mass_err, abs(chi_r(r, grid).values.sum() * grid.cell_area - 1.0))
    scales = [2 * h, 4 * h, 8 * h]
    lows, highs = [], []
    for c in range(5):
        lo, hi = np.inf, 0.0
        for f in signals("uniform", grid, 10, cfg.seed, 90 + c):
            F = np.fft.fft2(f.values)
            for r in itertools.product(scales, repeat=3):
                r = np.asarray(r)
                avg = tube_average(f, r).values
                small = np.fft.ifft2(F * chi_r_hat(r / 2, grid)).real
                big = np.fft.ifft2(F * chi_r_hat(2 * r, grid)).real
                lo = min(lo, float((avg / small).min()))
                hi = max(hi, float((avg / big).max()))
        lows.append(lo)
        highs.append(hi)
    spread = max(
        max(abs(v / np.median(vals) - 1) for v in vals) for vals in (lows, highs)
    )
    ok = mass_err < 1e-10 and spread <= 0.10
    return _result(
        "chi_sandwich",
        "max deviation of c, C from their median",
        spread,
        0.10,
        ok,
        mass_error=mass_err,
        c=lows,
        C=highs,
    )


def suite_maximal_domination(cfg: VerifyConfig) -> SuiteResult:
    grid = Grid2D.square(cfg.n)
    C = 0.0
    for kind, stream in (("noise", 100), ("smooth", 101)):
        for f in signals(kind, grid, 10, cfg.seed, stream):
            C = max(C, float((m_iterated(f).values / m_strong(m_hl(f)).values).max()))
    norms = {}
    for n in (32, 64):
        g = Grid2D.square(n, 1.0 / n)
        norms[n] = max(m_tube_brute(f).norm() / f.norm() for f in signals("smooth", g, 10, cfg.seed, 102))
    drift = abs(norms[64] / norms[32] - 1.0)
    ok = C <= constants.DOMINATION_BOUND and np.isfinite(norms[64]) and drift <= 0.10
    return _result(
        "maximal_domination",
        "sup m_iterated / m_strong(m_hl)",
        C,
        constants.DOMINATION_BOUND,
        ok,
        tube_l2_ratio_32=norms[32],
        tube_l2_ratio_64=norms[64],
        refinement_drift=drift,
    )


# --- Littlewood-Paley ---------------------------------------------------------

_LP_CACHE: dict = {}


def _lp_setup(cfg: VerifyConfig):
    grid = Grid2D.square(cfg.n)
    sg = ScaleGrid.covering(grid, cfg.q)
    return grid, sg


def _in_band_g(cfg: VerifyConfig):
    key = (cfg.n, cfg.q, cfg.seed)
    if key not in _LP_CACHE:
        grid, sg = _lp_setup(cfg)
        fs = signals("in_band", grid, 50, cfg.seed, 12)
        prof = build_phi_partition(cfg.q, quadratic=True)
        _LP_CACHE[key] = (fs, g_square_batch(fs, prof, sg), prof)
    return _LP_CACHE[key]


def suite_calderon_calibration(cfg: VerifyConfig) -> SuiteResult:
    t0 = time.perf_counter()
    grid, sg = _lp_setup(cfg)
    pair = build_pair(cfg.N.as_tuple(), q=cfg.q)
    cal = pair.calibration(sg, grid)
    live = covered_mask(sg, grid) & ~nodal_mask(grid)
    cal_err = float(np.max(np.abs(cal[live] - 1.0)))
    rec = max(
        np.linalg.norm(reconstruct(f, pair, sg).values - f.values) / np.linalg.norm(f.values)
        for f in signals("in_band", grid, 10, cfg.seed, 11)
    )
    elapsed = time.perf_counter() - t0
    ok = cal_err < 1e-3 and rec < 1e-3 and elapsed < 60.0
    return _result(
        "calderon_calibration",
        "max |calibration - 1|",
        cal_err,
        1e-3,
        ok,
        reconstruction_error=rec,
        radii=len(sg),
        runtime_ok=elapsed < 60.0,
    )


def suite_plancherel(cfg: VerifyConfig) -> SuiteResult:
    grid, sg = _lp_setup(cfg)
    fs, gs, prof = _in_band_g(cfg)
    ratios = [g.norm() / f.norm() for f, g in zip(fs, gs)]
    subset = 10
    S = g_square_batch(fs[:subset], prof, sg, area=True)
    gap = max(abs(s.norm() - g.norm()) / g.norm() for s, g in zip(S, gs[:subset]))
    dev = max(abs(r - 1.0) for r in ratios)
    ok = dev <= 0.05 and gap < 1e-8
    return _result(
        "plancherel",
        "max |(||g|| / ||f||) - 1|",
        dev,
        0.05,
        ok,
        area_gap=gap,
        ratio_min=min(ratios),
        ratio_max=max(ratios),
        area_signals=subset,
    )


def _lp_norm(v: np.ndarray, p: float, h: float) -> float:
    return float((np.sum(np.abs(v) ** p) * h * h) ** (1.0 / p))


def suite_lp_stability(cfg: VerifyConfig) -> SuiteResult:
    fs, gs, _ = _in_band_g(cfg)
    h = fs[0].grid.h
    spreads = {}
    for p in (1.5, 3.0):
        r = [_lp_norm(g.values, p, h) / _lp_norm(f.values, p, h) for f, g in zip(fs, gs)]
        spreads[str(p)] = {"min": min(r), "max": max(r), "spread": max(r) / min(r)}
    worst = max(v["spread"] for v in spreads.values())
    return _result("lp_stability", "max spread (max/min)", worst, 4.0, worst < 4.0, ratios=spreads)


# --- tents, maximal tubes, covering --------------------------------------------


def suite_tent_partition(cfg: VerifyConfig) -> SuiteResult:
    frac = tent_partition_check(8.0, (-2, 2), 10_000, rng_for(cfg.seed, 14))
    return _result("tent_partition", "exactly-one fraction", frac, 1.0, frac == 1.0, points=10_000)


def maximal_tubes_brute(omega: OpenSetMask, kind, direction: int) -> set:
    """Maximal tubes by enumerating every dyadic tube and comparing pixel sets."""
    grid = omega.grid
    n = grid.n1
    e = int(round(np.log2(grid.h)))
    top = int(np.log2(n))
    L = n * grid.h
    idx = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1).reshape(-1, 2)
    pts = idx * grid.h
    m = omega.mask.reshape(-1)
    inside = []
    for a in range(top + 1):
        for b in range(top + 1):
            if not kind_allows(kind, a, b):
                continue
            for k1 in range(n >> a):
                for k2 in range(n >> b):
                    t = DyadicTube(kind, a + e, b + e, k1, k2)
                    c = t.contains(pts, period=L)
                    if np.all(m[c]):
                        inside.append((t, frozenset(np.nonzero(c)[0].tolist())))
    out = set()
    for t, c in inside:
        for t2, c2 in inside:
            if direction == 1:
                same = t2.s2 == t.s2 and t2.k2 == t.k2 and t2.s1 > t.s1
            else:
                same = t2.s1 == t.s1 and t2.k1 == t.k1 and t2.s2 > t.s2
            if same and c < c2:
                break
        else:
            out.add(t)
    return out


def suite_maximal_tube_oracle(cfg: VerifyConfig) -> SuiteResult:
    rng = rng_for(cfg.seed, 15)
    mismatches = 0
    checked = 0
    for i in range(100):
        n = (4, 8, 16)[i % 3]
        omega = OpenSetMask(Grid2D.square(n), rng.random((n, n)) < rng.uniform(0.3, 0.9))
        for kind in ALL_KINDS:
            for d in (1, 2):
                fast = {en.tube for en in maximal_tubes(omega, kind, d)}
                mismatches += fast != maximal_tubes_brute(omega, kind, d)
                checked += 1
    return _result("maximal_tube_oracle", "set mismatches", mismatches, 0, mismatches == 0, comparisons=checked)


def suite_covering_sums(cfg: VerifyConfig) -> SuiteResult:
    from .corpus import open_sets

    maxima = {}
    for n in (32, 64):
        grid = Grid2D.square(n, 1.0 / n)
        mx: dict = {}
        for omega in open_sets(grid, 100, cfg.seed, 16):
            for key, v in covering_ratios(omega, cfg.kappas).items():
                mx[key] = max(mx.get(key, 0.0), v)
        maxima[n] = mx
    over = [k for k, v in maxima[32].items() if v > constants.COVERING_LIMITS.get(k, np.inf)]
    drift = {k: maxima[64][k] / maxima[32][k] - 1.0 for k in maxima[32] if maxima[32][k] > 0}
    worst = max(abs(v) for v in drift.values())
    ok = not over and worst <= 0.20
    table = {f"{k[0]}:{k[1]}": [maxima[32][k], maxima[64][k], constants.COVERING_LIMITS.get(k)] for k in sorted(maxima[32])}
    return _result(
        "covering_sums",
        "max refinement drift",
        worst,
        0.20,
        ok,
        over_limit=[f"{k[0]}:{k[1]}" for k in over],
        table=table,
    )


# --- atoms --------------------------------------------------------------------


def suite_atomic_round_trip(cfg: VerifyConfig) -> SuiteResult:
    t0 = time.perf_counter()
    grid, sg = _lp_setup(cfg)
    pair = build_pair(cfg.N.as_tuple(), q=cfg.q)
    errs, lam, layer, failed, atoms = [], [], [], 0, 0
    worst: dict = {}
    for f in signals("in_band", grid, 10, cfg.seed, 17):
        dec = atom_decompose(f, pair, sg, N=cfg.N, sigma=cfg.sigma)
        rec = reconstruct_from_atoms(dec.records, grid)
        errs.append(float(np.linalg.norm(f.values - rec.values) / np.linalg.norm(f.values)))
        lam.append(dec.report["lambda_ratio"])
        layer.append(dec.report["layer_cake_ratio"])
        for r in dec.records:
            v = validate_atom(r, cfg.N, cfg.sigma)
            failed += not v.passed
            atoms += 1
            for k, x in v.worst.items():
                worst[k] = max(worst.get(k, 0.0), x)
    elapsed = time.perf_counter() - t0
    ok = (
        max(errs) < 0.05
        and max(lam) <= constants.LAMBDA_RATIO_LIMIT
        and failed == 0
        and elapsed < 300.0
    )
    return _result(
        "atomic_round_trip",
        "max relative reconstruction error",
        max(errs),
        0.05,
        ok,
        lambda_ratio_max=max(lam),
        lambda_ratio_limit=constants.LAMBDA_RATIO_LIMIT,
        layer_cake_max=max(layer),
        atoms=atoms,
        invalid_atoms=failed,
        worst_budgets=worst,
        runtime_ok=elapsed < 300.0,
    )


def gaussian_derivative(order: int):
    """``d^order/dx^order exp(-x^2/2)`` up to sign, as a callable."""
    herm = np.polynomial.hermite_e.HermiteE.basis(order)
    return lambda x: herm(x) * np.exp(-0.5 * np.asarray(x) ** 2)


def suite_schwartz_blocks(cfg: VerifyConfig) -> SuiteResult:
    cases = {"M0": (gaussian_derivative(1), 0), "M1": (gaussian_derivative(2), 1)}
    details = {}
    rec = mom = 0.0
    support_ok = True
    for name, (phi, M) in cases.items():
        fam = schwartz_blocks(phi, gamma=2.0, cbar=2.0, M=M)
        e = fam.reconstruction_error()
        mo = float(np.max(np.abs(fam.moments())))
        sup = fam.support_radii()
        ok_s = bool(np.all(sup < 2 * np.asarray(fam.radii)))
        rec, mom, support_ok = max(rec, e), max(mom, mo), support_ok and ok_s
        details[name] = {
            "blocks": len(fam.blocks),
            "reconstruction_error": e,
            "max_moment": mo,
            "support_radii": sup.tolist(),
            "radii": list(fam.radii),
            "size_constant": fam.size_constant,
        }
    ok = rec < 1e-6 and mom <= 1e-9 and support_ok
    return _result("schwartz_blocks", "max reconstruction error", rec, 1e-6, ok, max_moment=mom, support_ok=support_ok, cases=details)


# --- CLI ----------------------------------------------------------------------

DETERMINISM_SUITES = ("tht_isometry", "region_table", "tube_volumes", "tent_partition")


def suite_cli_determinism(cfg: VerifyConfig) -> SuiteResult:
    import tempfile
    from pathlib import Path

    from .cli import main

    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in range(2):
            path = Path(tmp) / f"report{run}.json"
            argv = ["verify", "--deterministic", "--seed", str(cfg.seed), "--n", str(cfg.n), "--report", str(path)]
            for s in DETERMINISM_SUITES:
                argv += ["--suite", s]
            main(argv)
            blobs.append(path.read_bytes())
    same = blobs[0] == blobs[1]
    return _result("cli_determinism", "identical reports", float(same), 1.0, same, bytes=len(blobs[0]), suites=list(DETERMINISM_SUITES))


SUITES = {
    "tht_isometry": suite_tht_isometry,
    "tht_involution": suite_tht_involution,
    "region_table": suite_region_table,
    "flag_split": suite_flag_split,
    "partial_fractions": suite_partial_fractions,
    "size_bounds": suite_size_bounds,
    "tube_volumes": suite_tube_volumes,
    "projection_sandwich": suite_projection_sandwich,
    "chi_sandwich": suite_chi_sandwich,
    "maximal_domination": suite_maximal_domination,
    "calderon_calibration": suite_calderon_calibration,
    "plancherel": suite_plancherel,
    "lp_stability": suite_lp_stability,
    "tent_partition": suite_tent_partition,
    "maximal_tube_oracle": suite_maximal_tube_oracle,
    "covering_sums": suite_covering_sums,
    "atomic_round_trip": suite_atomic_round_trip,
    "schwartz_blocks": suite_schwartz_blocks,
    "cli_determinism": suite_cli_determinism,
}

# acceptance criterion number of every suite
CRITERIA = {name: i + 1 for i, name in enumerate(SUITES)}


def run_suite(name: str, cfg: VerifyConfig) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    try:
        res = SUITES[name](cfg)
    except Exception as exc:  # collected, never short-circuits the run
        res = SuiteResult(name, "error", float("nan"), float("nan"), False, {}, error=f"{type(exc).__name__}: {exc}")
        res.details = {"traceback": traceback.format_exc(limit=3)}
    res.seconds = time.perf_counter() - t0
    return res


def run_suites(names=None, cfg: VerifyConfig | None = None) -> list[SuiteResult]:
    cfg = cfg or VerifyConfig()
    return [run_suite(n, cfg) for n in (names or list(SUITES))]


def build_report(results, cfg: VerifyConfig, timings: bool = True) -> dict:
    report = {
        "toolkit_version": __version__,
        "config": cfg.echo(),
        "suites": [r.as_dict(timings) for r in results],
        "all_pass": all(r.passed for r in results),
    }
    if timings:
        report["total_seconds"] = round(sum(r.seconds for r in results), 3)
    return report
