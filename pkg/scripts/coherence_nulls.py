#!/usr/bin/env python3
"""Output coherence |T12| versus hybrid phase, and its nulls.

Sweeps the amplifier-noise-only configurations and prints the refined
null locations (the quadrature decoupling null plus the extra null
that appears once the amplifier input reflects).
"""

import argparse
from pathlib import Path

from common import maybe_plot, pol, reference_spec, F0, S_LNA

from nwave import SweepSpec, find_coherence_nulls, run_sweep

VARIANTS = {
    "matched_lna": dict(t_antenna=0.0),
    "reflective_lna": dict(t_antenna=0.0, s_l11=S_LNA[0, 0]),
    "mismatched_opt": dict(t_antenna=0.0, s_l11=S_LNA[0, 0], gamma_opt=pol(0.2, 100)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/coherence"))
    ap.add_argument("--step", type=float, default=0.1)
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sweeps = {}
    for name, kw in VARIANTS.items():
        spec = reference_spec(**kw)
        result = run_sweep(spec, SweepSpec("P_H", 0.0, 180.0, args.step, ("T12",)), F0)
        with (args.out / f"{name}.csv").open("w") as fp:
            result.to_csv(fp)
        sweeps[name] = result
        nulls = find_coherence_nulls(spec, F0, axis="P_H")
        pretty = ", ".join(f"{p:.3f} deg ({v:.2e} K)" for p, v in nulls.nulls)
        print(f"{name:16s} nulls: {pretty}")

    def draw(plt):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for name, result in sweeps.items():
            ax.semilogy(result.values, result.columns["|T12|_K"], label=name)
        ax.set_xlabel("hybrid phase (deg)")
        ax.set_ylabel("|T12| (K)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out / "coherence.png", dpi=150)

    maybe_plot(args, draw)


if __name__ == "__main__":
    main()
