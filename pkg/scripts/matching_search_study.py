#!/usr/bin/env python3
"""Stub-match grid search pulling the two coherence nulls together.

The full grid (11 line lengths x 100 capacitors) takes a minute or so;
the default here is a reduced grid, use --full for the whole thing.
"""

import argparse
from pathlib import Path

from common import pol, reference_spec, F0, S_LNA

from nwave import matching_search, sweep_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("results/matching"))
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--tolerance", type=float, default=4.0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    if args.full:
        lengths = sweep_grid(0.0, 1.0, 0.1)
        caps = sweep_grid(1e-12, 1e-9, 10e-12)
    else:
        lengths = sweep_grid(0.0, 1.0, 0.2)
        caps = sweep_grid(1e-12, 991e-12, 90e-12)

    spec = reference_spec(
        t_antenna=0.0, s_l11=S_LNA[0, 0], gamma_opt=pol(0.2, 100)
    )
    candidates = matching_search(
        spec,
        F0,
        line_lengths=lengths,
        capacitances=caps,
        coincidence_tolerance_deg=args.tolerance,
        phase_start_deg=-45.0,
        phase_stop_deg=135.0,
    )
    path = args.out / "candidates.csv"
    with path.open("w") as fp:
        fp.write(
            "line_length_wavelengths,shunt_capacitance_F,null1_deg,null2_deg,"
            "separation_deg,|T12|_null1_K,|T12|_null2_K\n"
        )
        for c in candidates:
            fp.write(
                f"{c.match.line_length_wavelengths:.17g},"
                f"{c.match.shunt_capacitance_farads:.17g},"
                f"{c.null_phases_deg[0]:.17g},{c.null_phases_deg[1]:.17g},"
                f"{c.separation_deg:.17g},"
                f"{c.null_values_k[0]:.17g},{c.null_values_k[1]:.17g}\n"
            )
    print(f"{len(candidates)} candidates below {args.tolerance} deg separation")
    for c in candidates[:8]:
        print(
            f"  L={c.match.line_length_wavelengths:.1f} wl, "
            f"C={c.match.shunt_capacitance_farads * 1e12:6.0f} pF: "
            f"nulls {c.null_phases_deg[0]:7.3f} / {c.null_phases_deg[1]:7.3f} deg "
            f"(sep {c.separation_deg:.3f})"
        )
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
