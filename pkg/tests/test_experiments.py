import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from risnr import analytics as an
from risnr.channel import ChannelKind, SystemConfig
from risnr.experiments import (
    ExperimentSpec,
    af_slope,
    fig1_af_sweep,
    fig2_cdf,
    ks_distance_to_cdf,
    ks_two_sample,
    validate_suite,
)
from risnr.rng import UniformFull, UniformScaled, Zero
from risnr.samplers import run_monte_carlo
from risnr.spectra import ALPHA0


def test_spec_validation():
    cfg = SystemConfig(16)
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, [32, 16])
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, [])
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, [16, 16])
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, [16], {"exact"}, n_samples=99)
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, [16], {"magic"})
    ExperimentSpec(cfg, [16], {"analytic"}, n_samples=1)


def test_ks_trivial_cases():
    a = np.arange(10.0)
    r = ks_two_sample(a, a)
    assert r.statistic == 0.0 and not r.reject_at_1pct and (r.n_a, r.n_b) == (10, 10)
    r = ks_two_sample(a, a + 100)
    assert r.statistic == 1.0 and r.reject_at_1pct
    with pytest.raises(ValueError):
        ks_two_sample([], a)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=60), st.lists(st.integers(0, 20), min_size=1, max_size=60))
@pytest.mark.filterwarnings("ignore:ks_2samp:RuntimeWarning")
def test_ks_matches_scipy(a, b):
    assert ks_two_sample(a, b).statistic == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_calibration():
    # size of the 1% test under the null: mean rate within 3 binomial sd of 0.01
    rng = np.random.default_rng(77)
    trials = 4000
    rejected = 0
    for _ in range(trials):
        a, b = rng.gamma(3.0, size=10_000), rng.gamma(3.0, size=10_000)
        r = ks_two_sample(a, b)
        assert r.reject_at_1pct == (stats.ks_2samp(a, b).pvalue < 0.01) or abs(stats.ks_2samp(a, b).pvalue - 0.01) < 2e-3
        rejected += r.reject_at_1pct
    assert rejected / trials <= 0.01 + 3 * math.sqrt(0.01 * 0.99 / trials)


def test_ks_exact_route_self_consistency():
    cfg = SystemConfig(16, noise=UniformScaled(0.3))
    for k in range(4):
        a = run_monte_carlo(cfg, "exact", 10_000, 100 + 2 * k)
        b = run_monte_carlo(cfg, "exact", 10_000, 101 + 2 * k)
        assert not ks_two_sample(a, b).reject_at_1pct


def test_ks_to_cdf():
    x = np.random.default_rng(3).exponential(size=5000)
    d = ks_distance_to_cdf(x, lambda t: 1 - np.exp(-t))
    assert d == pytest.approx(stats.kstest(x, "expon").statistic, abs=1e-12)


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_fig1_small_sweep(tmp_path):
    spec = ExperimentSpec(SystemConfig(16), [16, 32], {"exact", "analytic", "scaling"}, 200, 5,
                          tmp_path / "f1.csv", eps_values=(0.0, 0.2, 1.0), svg_path=tmp_path / "f1.svg")
    rows = fig1_af_sweep(spec)
    raw = (tmp_path / "f1.csv").read_bytes()
    assert raw.splitlines()[0] == b"N,channel,epsilon,af_mc,af_analytic,af_scaling"
    assert b"\r" not in raw
    assert len(rows) == 2 * 2 * 3 == len(_read(tmp_path / "f1.csv"))
    assert (tmp_path / "f1.svg").read_text().startswith("<svg")
    fig1_af_sweep(spec)
    assert (tmp_path / "f1.csv").read_bytes() == raw
    for r in rows:
        assert r["af_mc"] > 0 and r["af_analytic"] > 0


def test_fig1_requires_analytic():
    with pytest.raises(ValueError):
        fig1_af_sweep(ExperimentSpec(SystemConfig(16), [16], {"exact"}, 200))


def test_fig1_analytic_properties(tmp_path):
    spec = ExperimentSpec(SystemConfig(16), [256, 512, 1024, 4096], {"analytic", "scaling"}, 100, 1, tmp_path / "a.csv")
    rows = fig1_af_sweep(spec)
    assert all(r["af_mc"] != r["af_mc"] for r in rows)  # nan when not simulated
    assert _read(tmp_path / "a.csv")[0]["af_mc"] == ""
    by = {(r["N"], r["channel"], r["epsilon"]): r for r in rows}
    for kind in ("rr", "lr"):
        for eps in (0.0, 0.2, 0.5):
            assert by[(512, kind, eps)]["af_scaling"] / by[(256, kind, eps)]["af_scaling"] == pytest.approx(0.5, rel=1e-14)
            for N in (256, 512, 1024):
                r = by[(N, kind, eps)]
                assert abs(r["af_analytic"] - r["af_scaling"]) / r["af_analytic"] < 0.25
    gaps = [abs(by[(N, "rr", 1.0)]["af_analytic"] - 1.0) for N in (256, 1024, 4096)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.05


def test_fig2_small(tmp_path):
    cfg = SystemConfig(32, noise=UniformScaled(0.2))
    spec = ExperimentSpec(cfg, [32], {"exact", "large_n"}, 2000, 3, tmp_path / "f2.csv", svg_path=tmp_path / "f2.svg")
    res = fig2_cdf(spec, grid_points=220)
    rows = _read(tmp_path / "f2.csv")
    assert list(rows[0]) == ["x", "cdf_exact_ecdf", "cdf_largen", "cdf_gamma"]
    assert len(rows) == 220 and res.grid[0] == 0.0
    for col in (res.cdf_exact_ecdf, res.cdf_largen, res.cdf_gamma):
        assert np.all(np.diff(col) >= 0)
        assert col[-1] >= 0.995
    first = (tmp_path / "f2.csv").read_bytes()
    fig2_cdf(spec, grid_points=220)
    assert (tmp_path / "f2.csv").read_bytes() == first


def test_fig2_preconditions():
    spec = ExperimentSpec(SystemConfig(32), [32], {"exact"}, 200)
    with pytest.raises(ValueError):
        fig2_cdf(spec)
    spec = ExperimentSpec(SystemConfig(32), [32], {"exact", "large_n"}, 200)
    with pytest.raises(ValueError):
        fig2_cdf(spec, grid_points=100)


def test_fig2_gamma_agreement():
    cfg = SystemConfig(128, noise=UniformScaled(0.2))
    res = fig2_cdf(ExperimentSpec(cfg, [128], {"exact", "large_n"}, 10_000, 2020))
    assert np.max(np.abs(res.cdf_exact_ecdf - res.cdf_gamma)) < 0.05
    assert res.cdf_exact_ecdf[-1] == pytest.approx(0.999, abs=1e-3)
    assert res.cdf_gamma[-1] >= 0.995 and res.cdf_largen[-1] >= 0.995


def test_af_slope_values():
    assert af_slope(ChannelKind.RR, UniformScaled(0.2)) == pytest.approx(-1.0, abs=0.1)
    assert af_slope(ChannelKind.LR, UniformFull()) == pytest.approx(0.0, abs=0.05)


def test_validate_default_passes():
    report, ok = validate_suite()
    assert ok, report
    assert "FAIL" not in report
    assert "AF slope" in report and "band -1 +/- 0.1" in report
    assert "largest-eigenvalue" in report


def test_validate_detects_wrong_alpha0():
    report, ok = validate_suite(alpha0=1.1 * ALPHA0)
    assert not ok
    failed = [l for l in report.splitlines() if l.startswith("[FAIL]")]
    assert any("largest-eigenvalue mean" in l for l in failed)
