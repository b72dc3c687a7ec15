"""Space-side model of the planar twisted Hilbert kernel and its size estimates.

The model kernel is

    K(x, y) = c1 / (x y) + c2 * log|x / y| / ((x - y) * zeta)

with a constant degree-0 factor ``zeta``. Mixed derivatives of both terms are
written in closed form (Leibniz rule on the logarithmic quotient), so the
size check never differences near the singular set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

import numpy as np


class SingularityError(ValueError):
    """Raised for points on the singular set ``x = 0``, ``y = 0`` or ``x = y``."""


def _ones(x, y):
    return np.ones(np.broadcast(x, y).shape)


@dataclass(frozen=True)
class TwistedKernelModel:
    c1: float = 1.0
    c2: float = 1.0
    zeta: Callable = field(default=_ones, repr=False)

    @property
    def zeta_is_constant(self) -> bool:
        return self.zeta is _ones

    def check_homogeneity(self, rng: np.random.Generator, n: int = 64) -> bool:
        x, y = rng.uniform(-5, 5, (2, n))
        lam = rng.uniform(0.1, 10, n)
        return bool(np.allclose(self.zeta(lam * x, lam * y), self.zeta(x, y), rtol=1e-12))


def _check_off_sigma(*vals):
    for v in vals:
        if np.any(np.asarray(v) == 0):
            raise SingularityError("point lies on the singular set")


def partial_fraction_terms(x: float, y: float, z: float) -> tuple[float, float, float]:
    """Three partial-fraction terms of ``1 / ((x - z)(y - z) z)``."""
    _check_off_sigma(x, y, z, x - y, x - z, y - z)
    t1 = 1.0 / (x * y) / z
    t2 = -1.0 / (x * (x - y)) / (x - z)
    t3 = 1.0 / (y * (x - y)) / (y - z)
    return t1, t2, t3


def kernel_eval(model: TwistedKernelModel, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_off_sigma(x, y, x - y)
    out = model.c1 / (x * y) + model.c2 * np.log(np.abs(x / y)) / ((x - y) * model.zeta(x, y))
    return out if out.ndim else float(out)


def size_bound_rhs(x, y, alpha: int, beta: int):
    """Summed size bound at order ``(alpha, beta)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_off_sigma(x, y, x - y)
    ax, ay, ad = np.abs(x), np.abs(y), np.abs(x - y)
    total = 1.0 / (ax ** (1 + alpha) * ay ** (1 + beta))
    for g in range(alpha + 1):
        total = total + 1.0 / (ad ** (1 + alpha + beta - g) * ax ** (1 + g))
    for g in range(beta + 1):
        total = total + 1.0 / (ad ** (1 + alpha + beta - g) * ay ** (1 + g))
    return total if total.ndim else float(total)


def product_derivative(x, y, alpha: int, beta: int):
    """``d^alpha_x d^beta_y [1 / (x y)]``."""
    sign = (-1) ** (alpha + beta)
    return sign * factorial(alpha) * factorial(beta) / (x ** (alpha + 1) * y ** (beta + 1))


def _log_part_derivative(x, y, a: int, b: int):
    # derivatives of log|x| - log|y|
    if a == 0 and b == 0:
        return np.log(np.abs(x / y))
    if a > 0 and b > 0:
        return np.zeros(np.broadcast(x, y).shape)
    if b == 0:
        return (-1) ** (a - 1) * factorial(a - 1) / x**a
    return -((-1) ** (b - 1)) * factorial(b - 1) / y**b


def log_quotient_derivative(x, y, alpha: int, beta: int):
    """``d^alpha_x d^beta_y [log|x/y| / (x - y)]`` by the Leibniz rule."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = x - y
    total = np.zeros(np.broadcast(x, y).shape)
    for a in range(alpha + 1):
        for b in range(beta + 1):
            n = (alpha - a) + (beta - b)
            # d^n/du^n of 1/u, with a sign (-1)^(beta - b) from u = x - y
            quot = (-1) ** (beta - b) * (-1) ** n * factorial(n) / u ** (n + 1)
            total = total + comb(alpha, a) * comb(beta, b) * _log_part_derivative(x, y, a, b) * quot
    return total


def kernel_derivative(model: TwistedKernelModel, x, y, alpha: int, beta: int):
    if not model.zeta_is_constant:
        raise NotImplementedError("closed-form derivatives are available for constant zeta only")
    return model.c1 * product_derivative(x, y, alpha, beta) + model.c2 * log_quotient_derivative(
        x, y, alpha, beta
    )


@dataclass(frozen=True)
class SampleSpec:
    """Signed log-spaced samples with ``lo <= |x|, |y| <= hi``.

    Points closer to the singular set than ``delta * max(|x|, |y|)`` are
    dropped; ``count`` is the number of magnitudes per half axis.
    """

    lo: float = 0.1
    hi: float = 10.0
    count: int = 64
    delta: float = 0.05

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        mags = np.geomspace(self.lo, self.hi, self.count)
        axis = np.concatenate([-mags[::-1], mags])
        x, y = np.meshgrid(axis, axis, indexing="ij")
        x, y = x.ravel(), y.ravel()
        scale = np.maximum(np.abs(x), np.abs(y))
        d = self.delta * scale
        keep = (np.abs(x - y) >= d) & (np.abs(x) >= d) & (np.abs(y) >= d)
        return x[keep], y[keep]

    def describe(self) -> str:
        return f"|x|,|y| in [{self.lo}, {self.hi}], {self.count} log points per half axis, margin {self.delta}"


@dataclass(frozen=True)
class SizeBoundReport:
    orders: tuple[int, int]
    max_ratio: float
    grid_spec: str
    passed: bool
    refined_ratio: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "orders": list(self.orders),
            "max_ratio": self.max_ratio,
            "refined_ratio": self.refined_ratio,
            "grid_spec": self.grid_spec,
            "pass": self.passed,
        }


def _margin_check(x, y, delta):
    scale = np.maximum(np.abs(x), np.abs(y))
    near = (np.abs(x) < delta * scale) | (np.abs(y) < delta * scale) | (np.abs(x - y) < delta * scale)
    if np.any(near) or np.any(scale == 0):
        raise SingularityError(f"sample within {delta} * scale of the singular set")


def sup_ratio(model: TwistedKernelModel, x, y, alpha: int, beta: int) -> float:
    d = kernel_derivative(model, x, y, alpha, beta)
    return float(np.max(np.abs(d) / size_bound_rhs(x, y, alpha, beta)))


def verify_size_bounds(
    model: TwistedKernelModel,
    max_order: int = 2,
    sample_spec: SampleSpec | None = None,
    points: tuple[np.ndarray, np.ndarray] | None = None,
    growth_tol: float = 0.05,
) -> list[SizeBoundReport]:
    """Sup of ``|d^alpha_x d^beta_y K| / RHS`` for every order up to ``max_order``.

    A report passes when the ratio is finite and grows by less than
    ``growth_tol`` when the sample count doubles. With explicit ``points`` no
    refinement is possible and only finiteness is checked.
    """
    spec = sample_spec or SampleSpec()
    if points is not None:
        x, y = (np.atleast_1d(np.asarray(p, dtype=float)) for p in points)
        desc = f"{x.size} explicit points"
        refined = None
    else:
        x, y = spec.points()
        refined = SampleSpec(spec.lo, spec.hi, 2 * spec.count, spec.delta).points()
        desc = spec.describe()
    _margin_check(x, y, spec.delta)
    reports = []
    for alpha in range(max_order + 1):
        for beta in range(max_order + 1):
            r = sup_ratio(model, x, y, alpha, beta)
            if refined is None:
                r2 = float("nan")
                ok = bool(np.isfinite(r))
            else:
                r2 = sup_ratio(model, *refined, alpha, beta)
                ok = bool(np.isfinite(r) and np.isfinite(r2) and r2 <= r * (1 + growth_tol))
            reports.append(SizeBoundReport((alpha, beta), r, desc, ok, r2))
    return reports
