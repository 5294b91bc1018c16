#!/usr/bin/env python3
"""Generate the synthetic Touchstone fixtures used by configs and demos.

Writes a four-port imperfect quadrature hybrid and a wideband
two-element array into the target directory.
"""

import argparse
from pathlib import Path

from common import synthetic_quadrature_hybrid, synthetic_wideband_array

from nwave import write_touchstone


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("fixtures"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    hybrid = args.out / "quad_hybrid.s4p"
    hybrid.write_text(write_touchstone(synthetic_quadrature_hybrid()))
    array = args.out / "wideband_array.s2p"
    array.write_text(write_touchstone(synthetic_wideband_array()))
    print(f"wrote {hybrid}")
    print(f"wrote {array}")


if __name__ == "__main__":
    main()
