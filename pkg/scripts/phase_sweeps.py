#!/usr/bin/env python3
"""Beam noise temperature versus hybrid phase for four receiver variants.

Writes one CSV per variant: the matched baseline, a reflective
amplifier input, a mismatched noise optimum, and the fully warm
system.  Run: python scripts/phase_sweeps.py --out results/
"""

import argparse
from dataclasses import replace
from pathlib import Path

from common import maybe_plot, pol, reference_spec, F0, S_LNA

from nwave import SweepSpec, run_sweep

VARIANTS = {
    "baseline": dict(),
    "reflective_input": dict(s_l11=S_LNA[0, 0]),
    "mismatched_opt": dict(s_l11=S_LNA[0, 0], gamma_opt=pol(0.2, 100)),
    "warm": dict(
        s_l11=S_LNA[0, 0], gamma_opt=pol(0.2, 100), t_replica=290.0, t_hybrid=290.0
    ),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/phase_sweeps"))
    ap.add_argument("--step", type=float, default=0.1)
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sweeps = {}
    for name, kw in VARIANTS.items():
        spec = reference_spec(**kw)
        result = run_sweep(spec, SweepSpec("P_H", 0.0, 180.0, args.step, ("Trec",)), F0)
        with (args.out / f"{name}.csv").open("w") as fp:
            result.to_csv(fp)
        p, v = result.argmin("Trec_K")
        print(f"{name:18s} argmin P_H = {p:7.2f} deg   Trec = {v:8.3f} K")
        sweeps[name] = result

    def draw(plt):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for name, result in sweeps.items():
            ax.plot(result.values, result.columns["Trec_K"], label=name)
        ax.set_xlabel("hybrid phase (deg)")
        ax.set_ylabel("Trec (K)")
        ax.set_yscale("log")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out / "phase_sweeps.png", dpi=150)

    maybe_plot(args, draw)


if __name__ == "__main__":
    main()
