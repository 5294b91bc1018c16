#!/usr/bin/env python3
"""Per-frequency phase-shifter settings that null the coherence, 50 to 100 MHz.

Uses the synthetic wideband array, the synthetic quadrature hybrid, and
the low-frequency extrapolated amplifier noise model.  Writes the two
null trajectories per frequency.
"""

import argparse
from dataclasses import replace
from pathlib import Path

from common import (
    maybe_plot,
    reference_spec,
    synthetic_quadrature_hybrid,
    synthetic_wideband_array,
)

from nwave import (
    CancelerSystemSpec,
    FrequencyResponse,
    LnaSpec,
    MeasuredHybrid,
    extrapolated_lna_noise_params,
    find_coherence_nulls,
    sweep_grid,
)

ROLES = {"common": 0, "port90": 1, "port0": 2, "isolated": 3}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/wideband"))
    ap.add_argument("--step", type=float, default=2e6)
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    array_doc = synthetic_wideband_array()
    hybrid = MeasuredHybrid(
        FrequencyResponse.sampled(*(lambda d: (d.frequencies, d.matrices))(
            synthetic_quadrature_hybrid()
        )),
        ROLES,
    )
    base = reference_spec(hybrid=hybrid)
    base = replace(
        base,
        antenna=FrequencyResponse.sampled(array_doc.frequencies, array_doc.matrices),
        replica=FrequencyResponse.sampled(array_doc.frequencies, array_doc.matrices),
        t_antenna=290.0,
        t_replica=290.0,
        t_hybrid=290.0,
        t_lna=290.0,
    )
    # the hybrid samples only cover 90 to 110 MHz, so stretch them flat
    flat = hybrid.data.at(100e6)
    base = replace(
        base,
        hybrid1=MeasuredHybrid(FrequencyResponse.constant(flat), ROLES),
        hybrid2=MeasuredHybrid(FrequencyResponse.constant(flat), ROLES),
    )

    rows = []
    for f in sweep_grid(50e6, 100e6, args.step):
        params = extrapolated_lna_noise_params(f / 1e9)
        spec = replace(
            base,
            lna1=LnaSpec(base.lna1.response, params),
            lna2=LnaSpec(base.lna2.response, params),
        )
        result = find_coherence_nulls(
            spec, float(f), phase_start_deg=-60.0, phase_stop_deg=120.0
        )
        deepest = sorted(result.nulls, key=lambda nv: nv[1])[:2]
        deepest.sort()
        if len(deepest) == 2:
            rows.append((f, deepest[0][0], deepest[0][1], deepest[1][0], deepest[1][1]))

    path = args.out / "null_trajectories.csv"
    with path.open("w") as fp:
        fp.write("frequency_Hz,dP_null1_deg,|T12|_null1_K,dP_null2_deg,|T12|_null2_K\n")
        for r in rows:
            fp.write(",".join(f"{x:.17g}" for x in r) + "\n")
    print(f"wrote {path} ({len(rows)} frequencies with two nulls)")

    def draw(plt):
        import numpy as np

        data = np.array(rows)
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(data[:, 0] / 1e6, data[:, 1], "o-", ms=3, label="null 1")
        ax.plot(data[:, 0] / 1e6, data[:, 3], "s-", ms=3, label="null 2")
        ax.set_xlabel("frequency (MHz)")
        ax.set_ylabel("shifter phase at null (deg)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out / "wideband_nulls.png", dpi=150)

    maybe_plot(args, draw)


if __name__ == "__main__":
    main()
