"""``twlp``: filter images, render region maps, run verification, decompose into atoms."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .imageio import read_image, renormalize, write_image

MULTIPLIERS = ("tht", "riesz1", "riesz2", "flag1", "flag2", "flag3")
MAX_PIXELS = 4096 * 4096


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    output_path: Path | None = None
    report_path: Path | None = None
    n: int = 64
    h: float = 1.0
    multiplier: str = "tht"
    q: int = 8
    band: tuple | None = None
    orders: tuple = (1, 1, 1)
    sigma: int = 2
    kappa: float = 1.0
    seed: int = 42
    deterministic: bool = False
    suites: list = field(default_factory=list)
    center_crop: bool = False

    def echo(self) -> dict:
        return {
            "command": self.command,
            "input": str(self.input_path) if self.input_path else None,
            "output": str(self.output_path) if self.output_path else None,
            "n": self.n,
            "h": self.h,
            "mult": self.multiplier,
            "q": self.q,
            "band": list(self.band) if self.band else None,
            "N": list(self.orders),
            "sigma": self.sigma,
            "kappa": self.kappa,
            "seed": self.seed,
            "deterministic": self.deterministic,
            "suites": list(self.suites),
        }


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twlp", description=__doc__)
    p.add_argument("--version", action="version", version=f"twlp {__version__}")
    p.add_argument("command", choices=("filter", "regions", "verify", "decompose"))
    p.add_argument("--input", type=Path)
    p.add_argument("--output", type=Path)
    p.add_argument("--report", type=Path)
    p.add_argument("--n", type=int, default=64, help="grid size for synthetic commands")
    p.add_argument("--h", type=float, default=1.0, help="grid spacing")
    p.add_argument("--q", type=int, default=8, help="scale points per octave")
    p.add_argument("--band", type=int, nargs=2, metavar=("KMIN", "KMAX"), help="covered index band")
    p.add_argument("--mult", choices=MULTIPLIERS, default="tht")
    p.add_argument("--N1", type=int, default=1)
    p.add_argument("--N2", type=int, default=1)
    p.add_argument("--N3", type=int, default=1)
    p.add_argument("--sigma", type=int, default=2)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--deterministic", action="store_true", help="fixed-order evaluation, no wall-times in reports")
    p.add_argument("--suite", action="append", default=[], help="verification suite (repeatable)")
    p.add_argument("--center-crop", action="store_true", help="crop inputs to the largest power-of-two square")
    return p


def parse_config(argv) -> RunConfig:
    a = _parser().parse_args(argv)
    cfg = RunConfig(
        command=a.command,
        input_path=a.input,
        output_path=a.output,
        report_path=a.report,
        n=a.n,
        h=a.h,
        multiplier=a.mult,
        q=a.q,
        band=tuple(a.band) if a.band else None,
        orders=(a.N1, a.N2, a.N3),
        sigma=a.sigma,
        kappa=a.kappa,
        seed=a.seed,
        deterministic=a.deterministic,
        suites=list(a.suite),
        center_crop=a.center_crop,
    )
    _validate(cfg)
    return cfg


def _is_pow2(v: int) -> bool:
    return v > 0 and v & (v - 1) == 0


def _validate(cfg: RunConfig) -> None:
    if cfg.command in ("filter", "decompose"):
        if cfg.input_path is None:
            raise UsageError(f"{cfg.command} needs --input")
        if not cfg.input_path.is_file():
            raise UsageError(f"input {cfg.input_path} is not a readable file")
    if cfg.command in ("filter", "regions") and cfg.output_path is None:
        raise UsageError(f"{cfg.command} needs --output")
    for p in (cfg.output_path, cfg.report_path):
        if p is not None and p.parent and not p.parent.exists() and cfg.command != "decompose":
            raise UsageError(f"directory {p.parent} does not exist")
    if not _is_pow2(cfg.n):
        raise UsageError("--n must be a power of two")
    if not cfg.h > 0:
        raise UsageError("--h must be positive")
    if cfg.q < 4:
        raise UsageError("--q must be at least 4")
    if min(cfg.orders) < 1:
        raise UsageError("Laplacian orders must be positive")
    if cfg.sigma < 0:
        raise UsageError("--sigma must be non-negative")
    if cfg.command == "verify":
        from .verification import SUITES

        bad = [s for s in cfg.suites if s not in SUITES]
        if bad:
            raise UsageError(f"unknown suite(s) {', '.join(bad)}; choose from {', '.join(SUITES)}")


def _write_json(path: Path | None, obj: dict) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _load_square(cfg: RunConfig) -> tuple[np.ndarray, int]:
    pixels, maxval = read_image(cfg.input_path)
    if pixels.size > MAX_PIXELS:
        raise UsageError(f"input has {pixels.size} pixels; the limit is {MAX_PIXELS}")
    h, w = pixels.shape
    if not (_is_pow2(h) and _is_pow2(w)):
        if not cfg.center_crop:
            raise UsageError(f"image is {w}x{h}; dimensions must be powers of two (try --center-crop)")
        s = 1 << int(np.floor(np.log2(min(h, w))))
        t, l = (h - s) // 2, (w - s) // 2
        pixels = pixels[t : t + s, l : l + s]
    return pixels, maxval


def _multiplier(name: str, grid):
    from .multiplier import flag_split, riesz_multiplier, tht_multiplier

    if name == "tht":
        return tht_multiplier(grid)
    if name in ("riesz1", "riesz2"):
        return riesz_multiplier(int(name[-1]), grid)
    return flag_split(tht_multiplier(grid))[int(name[-1]) - 1]


def cmd_filter(cfg: RunConfig) -> int:
    from .multiplier import apply_multiplier
    from .signal_grid import Grid2D, Signal2D

    pixels, maxval = _load_square(cfg)
    grid = Grid2D(pixels.shape[0], pixels.shape[1], cfg.h)
    out = apply_multiplier(_multiplier(cfg.multiplier, grid), Signal2D(grid, pixels.astype(float)))
    values = np.real(out.values)
    img, norm = renormalize(values, maxval)
    write_image(cfg.output_path, img, maxval)
    side = {
        "toolkit_version": __version__,
        "config": cfg.echo(),
        "shape": list(pixels.shape),
        "renormalization": norm,
        "note": "value = scale * pixel + offset",
    }
    _write_json(cfg.output_path.with_name(cfg.output_path.name + ".json"), side)
    return 0


def cmd_regions(cfg: RunConfig) -> int:
    from .multiplier import REGION_CODES, region_codes
    from .signal_grid import Grid2D

    grid = Grid2D.square(cfg.n, cfg.h)
    codes = region_codes(grid)
    write_image(cfg.output_path, codes, 255)
    counts = {lab.value: int(np.count_nonzero(codes == c)) for lab, c in REGION_CODES.items()}
    legend = {
        "toolkit_version": __version__,
        "config": cfg.echo(),
        "codes": {lab.value: c for lab, c in REGION_CODES.items()},
        "counts": counts,
        "layout": "pixel (i, j) holds the frequency with signed FFT indices (k_i, k_j), k in (-n/2, n/2]",
    }
    _write_json(cfg.report_path or cfg.output_path.with_name(cfg.output_path.name + ".json"), legend)
    return 0


def _threads() -> int:
    env = os.environ.get("TWLP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError("TWLP_THREADS must be a positive integer") from None
    return os.cpu_count() or 1


def cmd_verify(cfg: RunConfig) -> int:
    from .atoms import LaplacianOrder
    from .verification import SUITES, VerifyConfig, build_report, run_suite

    vcfg = VerifyConfig(n=cfg.n, q=cfg.q, seed=cfg.seed, N=LaplacianOrder(*cfg.orders), sigma=cfg.sigma)
    names = cfg.suites or list(SUITES)
    workers = 1 if cfg.deterministic else min(_threads(), len(names))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda s: run_suite(s, vcfg), names))
    else:
        results = [run_suite(s, vcfg) for s in names]
    report = build_report(results, vcfg, timings=not cfg.deterministic)
    report["config"]["deterministic"] = cfg.deterministic
    _write_json(cfg.report_path, report)
    return 0 if report["all_pass"] else 1


def cmd_decompose(cfg: RunConfig) -> int:
    from .atoms import LaplacianOrder, atom_decompose
    from .littlewood_paley import ScaleGrid, build_pair
    from .signal_grid import Grid2D, Signal2D

    pixels, maxval = _load_square(cfg)
    if pixels.shape[0] != pixels.shape[1]:
        raise UsageError("decompose needs a square image")
    grid = Grid2D.square(pixels.shape[0], cfg.h)
    sg = ScaleGrid.covering(grid, cfg.q, cfg.band)
    N = LaplacianOrder(*cfg.orders)
    pair = build_pair(cfg.orders, q=cfg.q)
    f = Signal2D(grid, pixels.astype(float))
    dec = atom_decompose(f, pair, sg, N=N, sigma=cfg.sigma)
    table = [r.summary() for r in sorted(dec.records, key=lambda r: (r.level, r.kind.value))]
    report = {
        "toolkit_version": __version__,
        "config": cfg.echo(),
        "atoms": table,
        "residual": dec.report,
    }
    if cfg.output_path is not None:
        out_dir = cfg.output_path
        out_dir.mkdir(parents=True, exist_ok=True)
        images = {}
        for level in sorted({r.level for r in dec.records}):
            part = sum(r.lam * r.atom().values for r in dec.records if r.level == level)
            img, norm = renormalize(part, maxval)
            name = f"level_{level}.pgm"
            write_image(out_dir / name, img, maxval)
            images[name] = norm
        report["images"] = images
    _write_json(cfg.report_path, report)
    return 0


COMMANDS = {"filter": cmd_filter, "regions": cmd_regions, "verify": cmd_verify, "decompose": cmd_decompose}


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"twlp: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"twlp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
