"""The eight acceptance criteria, one test each.

Every test records a single PASS/FAIL line, printed in the pytest terminal
summary under "acceptance criteria", before asserting.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from risnr import analytics as an
from risnr.channel import SystemConfig
from risnr.cli import main
from risnr.experiments import ks_distance_to_cdf, ks_two_sample
from risnr.rng import UniformFull, UniformScaled, VonMises, Zero, uniform_noise
from risnr.samplers import run_monte_carlo
from risnr.spectra import lambda_plus_gamma


def _record(k: int, ok: bool, text: str) -> None:
    ACCEPTANCE_LINES[k] = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {text}"
    print(ACCEPTANCE_LINES[k])
    assert ok, ACCEPTANCE_LINES[k]


def _af(cfg):
    return an.snr_mean_var(cfg)[0].af


def test_c1_af_linear_decay():
    Ns = np.array([64, 128, 256, 512, 1024])
    worst, where = 0.0, ""
    for kind in ("rr", "lr"):
        for eps in (0.0, 0.2, 0.5):
            afs = [_af(SystemConfig(int(N), channel_kind=kind, noise=uniform_noise(eps))) for N in Ns]
            slope = np.polyfit(np.log(Ns), np.log(afs), 1)[0]
            if abs(slope + 1) >= worst:
                worst, where = abs(slope + 1), f"{kind} eps={eps} slope={slope:.4f}"
    _record(1, worst < 0.1, f"AF log-log slope within -1 +/- 0.1 (worst {where})")


def test_c2_af_plateau():
    msgs, ok = [], True
    for kind in ("rr", "lr"):
        a256 = _af(SystemConfig(256, channel_kind=kind, noise=UniformFull()))
        a1024 = _af(SystemConfig(1024, channel_kind=kind, noise=UniformFull()))
        o = an.scaling_coefficients(SystemConfig(256, channel_kind=kind, noise=UniformFull()))
        level = o.o_v0 / o.o_e0**2
        change = abs(a1024 / a256 - 1)
        off = max(abs(a256 / level - 1), abs(a1024 / level - 1))
        ok &= change < 0.05 and off < 0.10 and level == pytest.approx(1.0)
        msgs.append(f"{kind}: AF(256)={a256:.4f} AF(1024)={a1024:.4f} change={change:.2%} level gap={off:.2%}")
    _record(2, ok, "; ".join(msgs))


def test_c3_mean_square_law():
    m = [run_monte_carlo(SystemConfig(N), "exact", 10_000, 3000 + N).values.mean() for N in (128, 256)]
    ratio = m[1] / m[0]
    _record(3, abs(ratio / 4 - 1) < 0.10, f"mean(256)/mean(128) = {ratio:.4f} (target 4 +/- 10%)")


def test_c4_fig1_agreement():
    cells, bad = [], []
    idx = 0
    for N in (64, 128, 256):
        for kind in ("rr", "lr"):
            for eps in (0.0, 0.2, 0.5, 1.0):
                cfg = SystemConfig(N, channel_kind=kind, noise=uniform_noise(eps))
                v = run_monte_carlo(cfg, "exact", 10_000, 4000 + idx).values
                idx += 1
                err = (v.var() / v.mean() ** 2) / _af(cfg) - 1
                cells.append(err)
                if abs(err) >= 0.10:
                    bad.append(f"{kind} N={N} eps={eps}: {err:+.1%}")
    worst = max(cells, key=abs)
    text = f"{len(cells) - len(bad)}/{len(cells)} cells within 10%, worst {worst:+.1%}"
    if bad:
        text += "; outside: " + ", ".join(bad)
    _record(4, not bad, text)


def test_c5_fig2_agreement():
    cfg = SystemConfig(128, noise=UniformScaled(0.2))
    exact = run_monte_carlo(cfg, "exact", 10_000, 5001)
    large = run_monte_carlo(cfg, "large_n", 10_000, 5002)
    ks_a = ks_two_sample(exact, large).statistic
    ks_b = ks_distance_to_cdf(exact, lambda x: an.gamma_fit_cdf(x, cfg))
    _record(5, ks_a < 0.05 and ks_b < 0.05, f"KS exact vs large-N {ks_a:.4f}, exact vs gamma fit {ks_b:.4f} (each < 0.05)")


def _cg(rng, *shape):
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2)


def _top_abs_eigvec(X):
    # |top eigenvector| of X^H X for a batch of wide matrices X (M x N)
    _, w = np.linalg.eigh(X @ np.conj(np.swapaxes(X, 1, 2)))
    v = np.conj(np.swapaxes(X, 1, 2)) @ w[:, :, -1:]
    v = np.abs(v[..., 0])
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_c6_building_block_checks():
    rng = np.random.default_rng(6006)
    parts, ok = [], True

    X = _cg(rng, 10_000, 4, 64)
    lam = np.linalg.eigvalsh(X @ np.conj(np.swapaxes(X, 1, 2)) / 64)[:, -1]
    ref = lambda_plus_gamma(4, 64)
    e_mean, e_var = abs(lam.mean() / ref.mean - 1), abs(lam.var(ddof=1) / ref.variance - 1)
    ok &= e_mean < 0.02 and e_var < 0.15
    parts.append(f"(a) mean err {e_mean:.2%} var err {e_var:.1%}")

    N = 64
    y = np.abs(_cg(rng, 200_000, N))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    for tag, vals, target in (("b", y[:, 0] ** 2, 1 / N), ("c", y[:, 0] * y[:, 1], math.pi / (4 * N))):
        z = abs(vals.mean() - target) / (vals.std(ddof=1) / math.sqrt(vals.size))
        ok &= z <= 3
        parts.append(f"({tag}) z={z:.2f}")

    zs = []
    for model in (Zero(), UniformFull(), UniformScaled(0.2), UniformScaled(0.5), VonMises(0.5), VonMises(2.0)):
        v = _top_abs_eigvec(_cg(rng, 10_000, 4, N))
        u = _top_abs_eigvec(_cg(rng, 10_000, 4, N))
        d = model.sample(10_000 * N, rng).reshape(10_000, N)
        ups = np.sum(v * u * np.exp(1j * d), axis=1)
        prod = (ups.real - ups.real.mean()) * (ups.imag - ups.imag.mean())
        se = prod.std(ddof=1) / math.sqrt(prod.size)
        z = abs(prod.mean()) / se if se > 0 else 0.0
        ok &= abs(prod.mean()) <= 3 * se
        zs.append(z)
    parts.append(f"(d) max z={max(zs):.2f} over 6 noise laws")
    _record(6, ok, "; ".join(parts))


def test_c7_chi2_mixture():
    p = an.GaussianPairParams(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    x = np.linspace(0, 20, 2001)
    err_a = float(np.max(np.abs(an.chi2_mix_cdf(x, p) - (1 - np.exp(-x / 2)))))

    vr, nr, vi, ni = 2.0, 3.0, 0.5, 1.0
    p = an.GaussianPairParams(math.sqrt(vr * nr), math.sqrt(vi * ni), vr * (1 + nr), vi * (1 + ni), vr, vi, nr, ni)
    rng = np.random.default_rng(7007)
    z = rng.standard_normal((2, 1_000_000))
    s = np.sort(vr * (z[0] + math.sqrt(nr)) ** 2 + vi * (z[1] + math.sqrt(ni)) ** 2)
    grid = np.quantile(s, np.linspace(0.0005, 0.9995, 400))
    emp = np.searchsorted(s, grid, side="right") / s.size
    err_b = float(np.max(np.abs(an.chi2_mix_cdf(grid, p) - emp)))
    _record(7, err_a <= 1e-6 and err_b < 0.005, f"chi2_2 max error {err_a:.2e} (<= 1e-6); noncentral vs 1e6 samples {err_b:.2e} (< 0.005)")


def test_c8_determinism(tmp_path):
    base = ["simulate", "--n", "64", "--noise", "uniform-scaled", "--eps", "0.2", "--samples", "2000", "--seed", "88"]
    outs = []
    for i, extra in enumerate(([], [], ["--workers", "4"], ["--route", "eid"], ["--route", "eid", "--workers", "3"])):
        path = tmp_path / f"{i}.csv"
        assert main(base + extra + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] == outs[2] and outs[3] == outs[4]
    _record(8, ok, "simulate CSV byte-identical across repeated runs and worker counts 1/3/4")
