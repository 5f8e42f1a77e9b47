"""Command-line entry: ``toruspackets <command> --config run.yaml --out results/``.

Every command computes all outputs before writing any file, so a failing run
leaves nothing behind. Exit codes: 0 ok, 2 config/validation, 3 numerical.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from . import limits as L
from .config import load_config
from .errors import NumericalError, ValidationError
from .harness import count_peaks, evolved_packet, revival_scan, run_convergence
from .phasespace import husimi_grid
from .state import coherent_state, evolve, position_density

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
NORM_TOL = 1e-10
HUSIMI_MASS_TOL = 1e-3


def _evolved(cfg):
    params, spec, profile = cfg.build_params(), cfg.build_spec(), cfg.build_profile()
    if cfg.time.kind == "absolute":
        psi0 = coherent_state(params, spec, profile)
        return params, profile, psi0, evolve(psi0, cfg.time.t)
    psi0 = coherent_state(params, spec, profile)
    return params, profile, psi0, evolved_packet(params, spec, profile, cfg.build_time_schedule())


def cmd_evolve(cfg, chash, threads):
    params, _, psi0, psi = _evolved(cfg)
    if abs(psi.norm2() - psi0.norm2()) > NORM_TOL:
        raise NumericalError("norm drifted during evolution")
    n = cfg.density_points
    if cfg.dimension != 1:
        axes = np.meshgrid(*([2 * math.pi * np.arange(n) / n] * cfg.dimension), indexing="ij")
        q = np.stack(axes, -1).reshape(-1, cfg.dimension)
    else:
        q = (2 * math.pi * np.arange(n) / n)[:, None]
    dens = position_density(psi, q)
    header = [f"q{a + 1}" for a in range(cfg.dimension)] + ["density"]
    return {
        "state.json": io.json_text(io.state_to_dict(psi), chash),
        "density.csv": io.csv_text(header, [(*x, v) for x, v in zip(q, dens)], chash),
    }


def cmd_husimi(cfg, chash, threads):
    params, profile, _, psi = _evolved(cfg)
    grid = husimi_grid(psi, params, profile, cfg.build_grid())
    if abs(grid.total() - psi.norm2()) > HUSIMI_MASS_TOL:
        raise NumericalError(f"Husimi grid mass {grid.total():.6f} off by more than {HUSIMI_MASS_TOL}")
    header, rows = io.husimi_rows(grid)
    return {"husimi.csv": io.csv_text(header, rows, chash)}


def cmd_converge(cfg, chash, threads):
    rows = run_convergence(cfg.build_schedule(), cfg.build_time_schedule(), cfg.build_spec(),
                           cfg.build_profile(), cfg.build_observable(), threads=threads)
    return {"convergence.csv": io.csv_text(io.CONVERGENCE_HEADER, io.convergence_rows(rows), chash)}


def cmd_limit_eval(cfg, chash, threads):
    spec, profile = cfg.build_spec(), cfg.build_profile()
    measure = L.limit_measure(cfg.build_time_schedule(), spec, cfg.limit.residual_time, profile)
    obs = cfg.build_observable()
    payload = {
        "measure": measure.to_dict(),
        "pairing": L.pair_limit_observable(measure, obs),
        "resonant": L.resonant(spec.p0, cfg.limit.resonance_bound),
    }
    if cfg.limit.theta_check:
        n = cfg.limit.theta_points
        qs = 2 * math.pi * np.arange(n) / n
        checks = []
        worst = 0.0
        for B in cfg.limit.theta_B:
            pairs = [L.theta_identity_check(B, q, 1) for q in qs]
            diff = max(abs(a - b) for a, b in pairs)
            worst = max(worst, diff)
            checks.append({"B": B, "fourier": [a for a, _ in pairs], "images": [b for _, b in pairs],
                           "max_abs_diff": diff})
        if worst > 1e-10:
            raise NumericalError(f"delta_B series forms disagree by {worst:.3g}")
        payload["theta_check"] = checks
    return {"limit.json": io.json_text(payload, chash)}


def cmd_revival_scan(cfg, chash, threads):
    scan = revival_scan(cfg.build_params(), cfg.build_spec(), cfg.build_profile(), cfg.scan.steps)
    if abs(scan[0][1] - scan[-1][1]) > 1e-10:
        raise NumericalError("scan endpoints differ")
    text = io.csv_text(["t", "autocorrelation"], scan, chash)
    peaks = count_peaks(scan, cfg.scan.peak_fraction)
    return {"scan.csv": text, "scan_summary.json": io.json_text({"peaks": peaks}, chash)}


COMMANDS = {
    "evolve": cmd_evolve,
    "husimi": cmd_husimi,
    "converge": cmd_converge,
    "limit-eval": cmd_limit_eval,
    "revival-scan": cmd_revival_scan,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="toruspackets", description="Free wave packets on the flat torus.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML experiment config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
        p.add_argument("--seed", type=int, default=None, help="reserved; core paths use no randomness")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg, text = load_config(args.config)
        outputs = COMMANDS[args.command](cfg, io.config_hash(text), args.threads)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = Path(args.out)
    for name, text in outputs.items():
        io.atomic_write(out / name, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
