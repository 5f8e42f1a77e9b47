"""Run the standard hbar sweeps and write one convergence CSV per experiment."""
import argparse
import math
from pathlib import Path

from toruspackets import harness as H
from toruspackets import io
from toruspackets import limits as L
from toruspackets.observable import cosine
from toruspackets.profile import gaussian_profile
from toruspackets.state import PacketSpec

EXPERIMENTS = {
    "half_revival": (L.RationalRevival(1, 2), PacketSpec((0.0,), (0.0,)), cosine(1, width=4.0)),
    "quarter_revival_cos2": (L.RationalRevival(1, 4), PacketSpec((0.0,), (0.0,)), cosine(2)),
    "third_revival_cos3": (L.RationalRevival(1, 3), PacketSpec((0.4,), (0.0,)), cosine(3)),
    "equidistribution_sqrt2": (L.sqrt2_schedule(), PacketSpec((0.0,), (0.0,)), cosine(1, width=4.0)),
    "width_law_B1": (L.RationalRevival(1, 1, 1.0), PacketSpec((0.5,), (0.0,)), cosine(1, width=4.0)),
    "growing_action": (L.GrowingAction(), PacketSpec((0.0,), (0.0,)), cosine(1, width=4.0)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/sweeps")
    parser.add_argument("--n-max", type=int, default=5)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    schedule = H.HbarSchedule(n_max=args.n_max)
    g = gaussian_profile(1)
    for name, (tsched, spec, obs) in EXPERIMENTS.items():
        rows = H.run_convergence(schedule, tsched, spec, g, obs, threads=args.threads)
        io.atomic_write(Path(args.out) / f"{name}.csv", io.csv_text(io.CONVERGENCE_HEADER, io.convergence_rows(rows)))
        trail = "  ".join(f"{r.abs_error:.2e}" for r in rows)
        print(f"{name:24s} {trail}")


if __name__ == "__main__":
    main()
