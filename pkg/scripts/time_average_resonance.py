"""Time-averaged Husimi pairings in d = 2 for a resonant and a non-resonant momentum."""
import argparse
import math
from pathlib import Path

import numpy as np

from toruspackets import harness as H
from toruspackets import io
from toruspackets import limits as L
from toruspackets.observable import constant, cosine
from toruspackets.profile import gaussian_profile
from toruspackets.state import PacketSpec


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/time_average.csv")
    parser.add_argument("--n-max", type=int, default=5)
    args = parser.parse_args()
    g2 = gaussian_profile(2)
    window = L.BoxWindow(0.0, 1.0)
    obs = constant(2, 1.0, 0.0, 6.0) + cosine((0, 1), width=6.0)
    cases = [
        ("non_resonant", PacketSpec((0.0, 0.0), (1.0, math.sqrt(2))), math.inf),
        ("resonant", PacketSpec((0.0, 0.0), (1.0, 0.0)), 0.0),
    ]
    rows = []
    for name, spec, target in cases:
        limit = L.time_average_limit(obs, spec.p0, target, window, q0=spec.q0)
        mean = float(np.real(obs.q_mean(np.array(spec.p0)))) * window.integral()
        for params in H.HbarSchedule(n_max=args.n_max).params(2):
            lam = H.lambda_rule(params, target)
            quad = H.time_averaged_pairing(params, lam, spec, g2, obs, window)
            exact = H.time_averaged_pairing(params, lam, spec, g2, obs, window, exact=True)
            rows.append((name, params.hbar, lam, quad, exact, limit, mean))
            print(f"{name:13s} hbar={params.hbar:<7g} lambda={lam:8.3f} avg={quad:.6f} limit={limit:.6f} <a>int b={mean:.6f}")
    header = ["case", "hbar", "lambda", "romberg", "exact", "limit", "mean_times_integral"]
    io.atomic_write(Path(args.out), io.csv_text(header, rows))


if __name__ == "__main__":
    main()
