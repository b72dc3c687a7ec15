import json

import numpy as np
import pytest

from twlp import verification as v
from twlp.corpus import open_sets, rng_for, signals
from twlp.signal_grid import Grid2D


def test_every_criterion_has_a_suite():
    assert sorted(v.CRITERIA.values()) == list(range(1, 20))


def test_run_suite_collects_exceptions(monkeypatch):
    def boom(cfg):
        raise RuntimeError("broken")

    monkeypatch.setitem(v.SUITES, "tht_isometry", boom)
    res = v.run_suite("tht_isometry", v.VerifyConfig())
    assert not res.passed and res.error == "RuntimeError: broken"
    assert v.run_suite("region_table", v.VerifyConfig()).passed


def test_unknown_suite():
    with pytest.raises(KeyError):
        v.run_suite("nope", v.VerifyConfig())


def test_report_is_json_and_timing_free_when_asked():
    res = v.run_suites(["tube_volumes", "tent_partition"])
    report = v.build_report(res, v.VerifyConfig(), timings=False)
    text = json.dumps(report, sort_keys=True)
    assert "seconds" not in text and report["all_pass"]
    nan = v.SuiteResult("x", "m", float("nan"), float("inf"), False)
    assert nan.as_dict()["value"] == "nan" and nan.as_dict()["threshold"] == "inf"


def test_brute_force_tube_oracle_on_tiny_grid():
    from twlp.covering import OpenSetMask, maximal_tubes
    from twlp.tubes import DyadicKind

    omega = OpenSetMask(Grid2D.square(4), np.ones((4, 4), bool))
    for kind in DyadicKind:
        assert {e.tube for e in maximal_tubes(omega, kind, 1)} == v.maximal_tubes_brute(omega, kind, 1)


def test_gaussian_derivative_moments():
    x = np.linspace(-12, 12, 4801)
    dx = x[1] - x[0]
    g1, g2 = v.gaussian_derivative(1)(x), v.gaussian_derivative(2)(x)
    assert abs(np.sum(g1) * dx) < 1e-12
    assert abs(np.sum(g2) * dx) < 1e-12 and abs(np.sum(x * g2) * dx) < 1e-12


def test_corpora_are_reproducible():
    g = Grid2D.square(32)
    for kind in ("noise", "uniform", "nodal_free", "in_band", "smooth"):
        a = signals(kind, g, 2, 7, 3)
        b = signals(kind, g, 2, 7, 3)
        assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))
        assert not np.array_equal(a[0].values, a[1].values)
    assert not np.array_equal(rng_for(1, 2).random(3), rng_for(1, 3).random(3))
    with pytest.raises(ValueError):
        signals("in_band", Grid2D.square(16), 1, 0)
    sets = open_sets(g, 3, 7, 0)
    assert all(s.count > 0 for s in sets)
