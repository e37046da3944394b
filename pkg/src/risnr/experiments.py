"""Figure reproductions, goodness-of-fit helpers and the validation suite."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analytics as an
from .channel import ChannelKind, SystemConfig
from .plotting import svg_line_chart
from .rng import RngStream, UniformScaled, UniformFull, VonMises, Zero, trig_moments, uniform_noise
from .samplers import Route, SampleSet, run_monte_carlo
from .spectra import ALPHA0, BETA0, lambda_plus_gamma, top_eigen_batch

STAT_ROUTES = {"exact", "eid", "large_n"}
ALL_ROUTES = STAT_ROUTES | {"analytic", "scaling"}
KS_C_1PCT = math.sqrt(-0.5 * math.log(0.005))  # asymptotic two-sample critical constant


@dataclass
class ExperimentSpec:
    config: SystemConfig
    n_values: Sequence[int]
    routes: frozenset = frozenset({"exact", "analytic", "scaling"})
    n_samples: int = 10_000
    master_seed: int = 2020
    output_path: str | os.PathLike | None = None
    eps_values: Sequence[float] = (0.0, 0.2, 0.5, 1.0)
    channels: Sequence[ChannelKind] = (ChannelKind.RR, ChannelKind.LR)
    workers: int = 1
    svg_path: str | os.PathLike | None = None

    def __post_init__(self):
        self.routes = frozenset(self.routes)
        if not self.routes <= ALL_ROUTES:
            raise ValueError(f"unknown routes {sorted(self.routes - ALL_ROUTES)}")
        n = list(self.n_values)
        if not n or any(b <= a for a, b in zip(n, n[1:])):
            raise ValueError("n_values must be nonempty and strictly increasing")
        if self.routes & STAT_ROUTES and self.n_samples < 100:
            raise ValueError("statistical routes need n_samples >= 100")


def derived_seed(master_seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=key).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


@dataclass(frozen=True)
class KsReport:
    statistic: float
    n_a: int
    n_b: int
    reject_at_1pct: bool


def _values(a) -> np.ndarray:
    return np.asarray(a.values if isinstance(a, SampleSet) else a, dtype=float).ravel()


def ks_two_sample(a, b) -> KsReport:
    """Exact supremum gap between the two empirical CDFs."""
    xa, xb = np.sort(_values(a)), np.sort(_values(b))
    na, nb = xa.size, xb.size
    if na == 0 or nb == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, pooled, side="right") / na
    fb = np.searchsorted(xb, pooled, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    crit = KS_C_1PCT * math.sqrt((na + nb) / (na * nb))
    return KsReport(d, na, nb, d > crit)


def ks_distance_to_cdf(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |ECDF - F| over the sample, checking both sides of every jump."""
    x = np.sort(_values(samples))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ecdf(samples, grid) -> np.ndarray:
    x = np.sort(_values(samples))
    return np.searchsorted(x, grid, side="right") / x.size


# ---------------------------------------------------------------------------
# figures


def _fmt(v) -> str:
    return repr(float(v))


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c) for c in r))
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def af_of(samples) -> float:
    x = _values(samples)
    return float(x.var() / x.mean() ** 2)


def fig1_af_sweep(spec: ExperimentSpec) -> list[dict]:
    """AF versus N for each channel kind and phase-noise width epsilon.

    Columns ``N,channel,epsilon,af_mc,af_analytic,af_scaling``; af_mc is
    empty when the exact route is not requested.
    """
    if "analytic" not in spec.routes:
        raise ValueError("fig1 needs the analytic route")
    rows = []
    idx = 0
    for N in spec.n_values:
        for kind in spec.channels:
            for eps in spec.eps_values:
                cfg = replace(spec.config, N=N, channel_kind=ChannelKind(kind), noise=uniform_noise(eps))
                af_an = an.snr_mean_var(cfg)[0].af
                af_sc = an.asymptotic_moments(cfg).af
                af_mc = math.nan
                if "exact" in spec.routes:
                    s = run_monte_carlo(cfg, Route.EXACT, spec.n_samples, derived_seed(spec.master_seed, idx), spec.workers)
                    af_mc = af_of(s)
                rows.append(
                    dict(N=N, channel=cfg.channel_kind.value, epsilon=float(eps), af_mc=af_mc, af_analytic=af_an, af_scaling=af_sc)
                )
                idx += 1
    if spec.output_path is not None:
        _write_csv(
            spec.output_path,
            ["N", "channel", "epsilon", "af_mc", "af_analytic", "af_scaling"],
            ([str(r["N"]), r["channel"], r["epsilon"], "" if math.isnan(r["af_mc"]) else r["af_mc"], r["af_analytic"], r["af_scaling"]] for r in rows),
        )
    if spec.svg_path is not None:
        series = {}
        for r in rows:
            key = f"{r['channel'].upper()} eps={r['epsilon']:g}"
            for col, tag in (("af_analytic", ""), ("af_mc", " MC")):
                if not math.isnan(r[col]):
                    xs, ys = series.setdefault(key + tag, ([], []))
                    xs.append(r["N"])
                    ys.append(r[col])
        svg_line_chart(series, spec.svg_path, "Amount of fading", "N", "AF", logx=True, logy=True)
    return rows


@dataclass
class Fig2Result:
    grid: np.ndarray
    cdf_exact_ecdf: np.ndarray
    cdf_largen: np.ndarray
    cdf_gamma: np.ndarray
    samples: SampleSet = field(repr=False)


def fig2_cdf(spec: ExperimentSpec, grid_points: int = 256) -> Fig2Result:
    """Exact-route ECDF against the large-N product CDF and the gamma fit at one N.

    Columns ``x,cdf_exact_ecdf,cdf_largen,cdf_gamma`` on a uniform grid over
    [0, empirical 99.9th percentile].
    """
    if not {"exact", "large_n"} <= spec.routes:
        raise ValueError("fig2 needs the exact and large_n routes")
    if grid_points < 200:
        raise ValueError("fig2 needs at least 200 grid points")
    cfg = replace(spec.config, N=spec.n_values[0])
    s = run_monte_carlo(cfg, Route.EXACT, spec.n_samples, spec.master_seed, spec.workers)
    grid = np.linspace(0.0, float(np.quantile(s.values, 0.999)), grid_points)
    res = Fig2Result(
        grid,
        ecdf(s, grid),
        np.maximum.accumulate(an.snr_largen_cdf(grid, cfg)),
        an.gamma_fit_cdf(grid, cfg),
        s,
    )
    if spec.output_path is not None:
        _write_csv(spec.output_path, ["x", "cdf_exact_ecdf", "cdf_largen", "cdf_gamma"],
                   zip(res.grid, res.cdf_exact_ecdf, res.cdf_largen, res.cdf_gamma))
    if spec.svg_path is not None:
        g = list(res.grid)
        svg_line_chart(
            {"exact (MC)": (g, list(res.cdf_exact_ecdf)), "large-N": (g, list(res.cdf_largen)), "gamma fit": (g, list(res.cdf_gamma))},
            spec.svg_path, f"SNR CDF, {cfg.describe()}", "SNR", "CDF",
        )
    return res


# ---------------------------------------------------------------------------
# validation suite


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: measured {self.measured:.6g} (tolerance {self.tolerance:.3g}) {self.detail}".rstrip()


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def largest_eigenvalues(M: int, N: int, n: int, seed: int) -> np.ndarray:
    """Monte Carlo draws of the largest eigenvalue of an M x N complex Wishart / N."""
    rng = RngStream(seed, 0).generator()
    z = rng.standard_normal((n, M, N, 2))
    X = (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)
    return np.linalg.eigvalsh(X @ np.conj(np.swapaxes(X, 1, 2)) / N)[:, -1]


def normalized_magnitude_vectors(N: int, n: int, seed: int) -> np.ndarray:
    rng = RngStream(seed, 1).generator()
    z = rng.standard_normal((n, N, 2))
    y = np.hypot(z[..., 0], z[..., 1])
    return y / np.linalg.norm(y, axis=1, keepdims=True)


def upsilon_draws(N: int, model, n: int, seed: int, M: int = 4) -> np.ndarray:
    """Upsilon for the top eigen-pair of drawn RR channels, with fresh phase noise."""
    rng = RngStream(seed, 2).generator()

    def cg(*shape):
        z = rng.standard_normal(shape + (2,))
        return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)

    _, v = top_eigen_batch(cg(n, M, N), N)
    _, u = top_eigen_batch(cg(n, M, N), N)
    d = np.stack([model.sample(N, rng) for _ in range(n)])
    return np.sum(v[:, 0, :] * u[:, 0, :] * np.exp(1j * d), axis=1)


def mean_with_se(x: np.ndarray) -> tuple[float, float]:
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def af_slope(channel: ChannelKind, model, n_values=(64, 128, 256, 512, 1024)) -> float:
    afs = [an.snr_mean_var(SystemConfig(N, 4, 4, 1.0, channel, model))[0].af for N in n_values]
    return float(np.polyfit(np.log(n_values), np.log(afs), 1)[0])


def validate_suite(
    n_samples: int = 10_000,
    master_seed: int = 7,
    alpha0: float = ALPHA0,
    beta0: float = BETA0,
) -> tuple[str, bool]:
    """Run the Monte Carlo and closed-form consistency checks; returns the report and overall status."""
    checks: list[Check] = []

    # phase-noise trigonometric moments
    worst = max(abs(trig_moments(m).c2 + trig_moments(m).s2 - 1.0)
                for m in (Zero(), UniformFull(), UniformScaled(0.2), UniformScaled(0.5), VonMises(0.5), VonMises(2.0), VonMises(40.0)))
    checks.append(Check("phase-noise moments c2 + s2 = 1", worst == 0.0, worst, 0.0))
    vm = VonMises(2.0)
    draws = vm.sample(1_000_000, RngStream(master_seed, 3).generator())
    t = trig_moments(vm)
    z = max(abs(np.cos(draws).mean() - t.c1) / (np.cos(draws).std() / 1e3),
            abs((np.sin(draws) ** 2).mean() - t.s2) / ((np.sin(draws) ** 2).std() / 1e3))
    checks.append(Check("von Mises sampler vs closed-form moments (z-score)", z < 3.0, z, 3.0))

    # largest eigenvalue gamma law
    for M, N, check_var in ((4, 64, True), (4, 32, False)):
        lam = largest_eigenvalues(M, N, n_samples, derived_seed(master_seed, M, N))
        ref = lambda_plus_gamma(M, N, alpha0, beta0)
        e_mean = _rel(lam.mean(), ref.mean)
        checks.append(Check(f"largest-eigenvalue mean, M={M} N={N}", e_mean < 0.02, e_mean, 0.02, "relative"))
        if check_var:
            e_var = _rel(lam.var(ddof=1), ref.variance)
            checks.append(Check(f"largest-eigenvalue variance, M={M} N={N}", e_var < 0.15, e_var, 0.15, "relative"))

    # normalized Gaussian magnitudes
    N = 64
    y = normalized_magnitude_vectors(N, 100_000, derived_seed(master_seed, 4))
    m, se = mean_with_se(y[:, 0] ** 2)
    checks.append(Check("E{y(n)^2} = 1/N (z-score)", abs(m - 1 / N) <= 3 * se, abs(m - 1 / N) / se, 3.0))
    m, se = mean_with_se(y[:, 0] * y[:, 1])
    target = math.pi / (4 * N)
    checks.append(Check("E{y(n) y(m)} = pi/(4N) (z-score)", abs(m - target) <= 3 * se, abs(m - target) / se, 3.0))

    # Re/Im decorrelation of the eigenvector sum
    for model in (Zero(), UniformFull(), UniformScaled(0.2), VonMises(2.0)):
        ups = upsilon_draws(N, model, n_samples, derived_seed(master_seed, 5))
        prod = (ups.real - ups.real.mean()) * (ups.imag - ups.imag.mean())
        cov, se = mean_with_se(prod)
        zc = abs(cov) / se if se > 0 else 0.0
        checks.append(Check(f"cov(Re, Im) = 0 for {model.name} (z-score)", abs(cov) <= 3 * se, zc, 3.0))

    # algebraic identity and chi-square mixture inversion
    worst = 0.0
    for kind in ChannelKind:
        for model in (Zero(), UniformFull(), UniformScaled(0.3), VonMises(1.0)):
            p = an.pair_params(SystemConfig(128, 4, 4, 1.0, kind, model))
            worst = max(worst, _rel(p.mixture_mean(), p.m2_re + p.m2_im))
    checks.append(Check("mixture mean = m2_re + m2_im", worst < 1e-12, worst, 1e-12, "relative"))
    xs = np.linspace(0.0, 20.0, 201)
    err = float(np.max(np.abs(an.chi2_mix_cdf(xs, an.GaussianPairParams(0, 0, 1, 1, 1, 1, 0, 0)) - (1 - np.exp(-xs / 2)))))
    checks.append(Check("mixture CDF vs chi2_2 closed form", err < 1e-6, err, 1e-6, "absolute"))

    # scaling laws
    for kind in ChannelKind:
        s = af_slope(kind, UniformScaled(0.2))
        checks.append(Check(f"AF slope vs N, {kind.value.upper()} eps=0.2", abs(s + 1) < 0.1, s, 0.1, "band -1 +/- 0.1"))
        s = af_slope(kind, UniformFull())
        checks.append(Check(f"AF slope vs N, {kind.value.upper()} uniform", abs(s) < 0.05, s, 0.05, "band 0 +/- 0.05"))

    # Monte Carlo versus closed forms
    cfg = SystemConfig(64, 4, 4, 1.0, ChannelKind.RR, Zero())
    exact = run_monte_carlo(cfg, Route.EXACT, n_samples, derived_seed(master_seed, 6))
    e = _rel(exact.values.mean(), an.snr_mean_var(cfg, alpha0, beta0)[0].mean)
    checks.append(Check("exact-route mean vs closed form, RR N=64", e < 0.05, e, 0.05, "relative"))
    cfg = SystemConfig(256, 4, 4, 1.0, ChannelKind.RR, Zero())
    exact = run_monte_carlo(cfg, Route.EXACT, n_samples, derived_seed(master_seed, 7))
    eid = run_monte_carlo(cfg, Route.EID, n_samples, derived_seed(master_seed, 8))
    ks = ks_two_sample(exact, eid).statistic
    checks.append(Check("KS exact vs equivalent-in-distribution, RR N=256", ks < 0.05, ks, 0.05))
    cfg = SystemConfig(128, 4, 4, 1.0, ChannelKind.RR, UniformScaled(0.2))
    exact = run_monte_carlo(cfg, Route.EXACT, n_samples, derived_seed(master_seed, 9))
    large = run_monte_carlo(cfg, Route.LARGE_N, n_samples, derived_seed(master_seed, 10))
    ks = ks_two_sample(exact, large).statistic
    checks.append(Check("KS exact vs large-N, RR N=128 eps=0.2", ks < 0.05, ks, 0.05))
    ks = ks_distance_to_cdf(exact, lambda x: an.gamma_fit_cdf(x, cfg))
    checks.append(Check("KS exact vs gamma fit, RR N=128 eps=0.2", ks < 0.05, ks, 0.05))

    ok = all(c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return "\n".join(lines), ok
