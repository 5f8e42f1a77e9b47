"""Autocorrelation over one revival period and q-marginals at small fractions of T."""
import argparse
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from toruspackets import harness as H
from toruspackets import io
from toruspackets.phasespace import HusimiGridSpec, husimi_grid
from toruspackets.profile import gaussian_profile
from toruspackets.state import PacketSpec, SemiclassicalParams, coherent_state, evolve_fraction


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/revivals")
    parser.add_argument("--hbar", type=float, default=0.05)
    parser.add_argument("--steps", type=int, default=513)
    args = parser.parse_args()
    out = Path(args.out)
    g = gaussian_profile(1)
    params = SemiclassicalParams.from_hbar(args.hbar)
    spec = PacketSpec((0.0,), (0.0,))
    scan = H.revival_scan(params, spec, g, args.steps)
    io.atomic_write(out / "scan.csv", io.csv_text(["t", "autocorrelation"], scan))
    print(f"peaks above 0.2 of t=0: {H.count_peaks(scan)}")
    psi = coherent_state(params, spec, g)
    rows = []
    for frac in (Fraction(0), Fraction(1, 5), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)):
        grid = husimi_grid(evolve_fraction(psi, frac), params, g, HusimiGridSpec(256, 64))
        marg = grid.q_marginal()
        peaks = [grid.q_axis[i] for i in range(marg.size) if marg[i] >= marg[i - 1] and marg[i] >= marg[(i + 1) % marg.size] and marg[i] > 0.2 * marg.max()]
        print(f"t = {str(frac):4s} T: {len(peaks)} copies at q = {', '.join(f'{q:.3f}' for q in peaks)}")
        rows.extend((float(frac), q, m) for q, m in zip(grid.q_axis, marg))
    io.atomic_write(out / "marginals.csv", io.csv_text(["fraction", "q", "husimi_q_marginal"], rows))


if __name__ == "__main__":
    main()
