#!/usr/bin/env python3
"""Trec contours over the amplifier noise-match reflection coefficient.

At quadrature the optimum gamma_opt coincides with the hybrid's
common-port reflection; detuning the hybrid phase moves it away.
"""

import argparse
from pathlib import Path

from common import maybe_plot, pol, reference_spec, F0, S_LNA

from nwave import IdealHybrid, gamma_contour_grid, sweep_grid
from nwave.sweep import apply_parameter

CASES = {
    "matched_hybrid": dict(hybrid=IdealHybrid(90.0)),
    "reflective_hybrid": dict(hybrid=IdealHybrid(90.0, pol(0.2, 45))),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/contours"))
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    radii = sweep_grid(0.0, 0.98, 0.02)
    phases = sweep_grid(0.0, 355.0, 5.0)
    grids = {}
    for name, kw in CASES.items():
        spec = reference_spec(s_l11=S_LNA[0, 0], **kw)
        result = gamma_contour_grid(spec, F0, radii, phases, metric="trec")
        grids[name] = result
        r, ph, v = result.argmin
        print(f"{name:18s} argmin gamma_opt = {r:.2f} at {ph:.0f} deg, Trec = {v:.2f} K")
        _write(args.out / f"{name}.csv", result)

    detuned = apply_parameter(reference_spec(s_l11=S_LNA[0, 0]), "P_H", 4.4)
    result = gamma_contour_grid(detuned, F0, radii, phases, metric="trec")
    grids["detuned_phase"] = result
    r, ph, v = result.argmin
    print(f"{'detuned_phase':18s} argmin gamma_opt = {r:.2f} at {ph:.0f} deg, Trec = {v:.2f} K")
    _write(args.out / "detuned_phase.csv", result)

    def draw(plt):
        import numpy as np

        fig, axes = plt.subplots(1, len(grids), figsize=(5 * len(grids), 4.5),
                                 subplot_kw={"projection": "polar"})
        for ax, (name, res) in zip(np.atleast_1d(axes), grids.items()):
            th, rr = np.meshgrid(np.deg2rad(res.phases_deg), res.radii)
            cs = ax.contourf(th, rr, res.values, levels=25)
            ax.set_title(name, fontsize=9)
            fig.colorbar(cs, ax=ax, shrink=0.7)
        fig.tight_layout()
        fig.savefig(args.out / "contours.png", dpi=150)

    maybe_plot(args, draw)


def _write(path, result):
    with path.open("w") as fp:
        fp.write("gamma_opt_mag,gamma_opt_deg,Trec_K\n")
        for i, r in enumerate(result.radii):
            for j, p in enumerate(result.phases_deg):
                fp.write(f"{r:.17g},{p:.17g},{result.values[i, j]:.17g}\n")


if __name__ == "__main__":
    main()
