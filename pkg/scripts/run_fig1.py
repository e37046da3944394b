"""Amount of fading versus N: Monte Carlo, closed form and leading-order law.

    python3 scripts/run_fig1.py --out results/fig1.csv --svg results/fig1.svg
"""

from __future__ import annotations

import argparse
import os

from risnr.channel import SystemConfig
from risnr.experiments import ExperimentSpec, fig1_af_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-values", default="16,32,64,128,256,512")
    ap.add_argument("--eps-values", default="0,0.2,0.5,1")
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=2020)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/fig1.csv")
    ap.add_argument("--svg", default="results/fig1.svg")
    args = ap.parse_args()

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    spec = ExperimentSpec(
        SystemConfig(4),
        [int(v) for v in args.n_values.split(",")],
        {"exact", "analytic", "scaling"},
        args.samples,
        args.seed,
        args.out,
        eps_values=tuple(float(v) for v in args.eps_values.split(",")),
        workers=args.workers,
        svg_path=args.svg,
    )
    rows = fig1_af_sweep(spec)
    print(f"{'N':>5} {'ch':>3} {'eps':>5} {'af_mc':>10} {'af_closed':>10} {'af_law':>10} {'mc/closed':>9}")
    for r in rows:
        print(f"{r['N']:>5} {r['channel']:>3} {r['epsilon']:>5g} {r['af_mc']:>10.5f} {r['af_analytic']:>10.5f} "
              f"{r['af_scaling']:>10.5f} {r['af_mc'] / r['af_analytic']:>9.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
