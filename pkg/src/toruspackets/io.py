"""Artifact serialization: JSON and CSV with 17 significant digits, atomic writes."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .state import FourierState

VERSION = "0.1.0"


def fmt(x):
    return f"{float(x):.17g}"


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def metadata_line(chash):
    return f"# config_hash={chash} version={VERSION}\n"


def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows, chash=None):
    lines = [metadata_line(chash)] if chash is not None else []
    lines.append(",".join(header) + "\n")
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return "".join(lines)


def read_csv(path):
    """(header, rows of floats); `#` lines are skipped."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


# -- structured payloads --------------------------------------------------------------

def _json_float(x):
    # json writes the shortest repr that round-trips, at most 17 significant digits
    return float(x)


def state_to_dict(state):
    return {
        "d": state.dimension,
        "hbar": _json_float(state.hbar),
        "window": [[int(lo), int(hi)] for lo, hi in zip(state.kmin, state.kmax)],
        "coeffs": [[_json_float(c.real), _json_float(c.imag)] for c in state.coeffs.ravel()],
    }


def state_from_dict(data):
    try:
        window = data["window"]
        shape = tuple(hi - lo + 1 for lo, hi in window)
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]]).reshape(shape)
        return FourierState(tuple(lo for lo, _ in window), coeffs, float(data["hbar"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state document: {exc}") from exc


def wigner_to_dict(field):
    atoms = []
    for m in sorted(field.atoms):
        offsets, coeffs = field.atoms[m]
        atoms.append({
            "m": list(m),
            "offsets": offsets.tolist(),
            "coeffs": [[_json_float(c.real), _json_float(c.imag)] for c in coeffs],
        })
    return {"d": field.dimension, "hbar": _json_float(field.hbar), "atoms": atoms}


def json_text(payload, chash=None):
    if chash is not None:
        payload = {"meta": {"config_hash": chash, "version": VERSION}, **payload}
    return json.dumps(payload, indent=1, sort_keys=False) + "\n"


def husimi_rows(grid):
    d = grid.dimension
    qs = np.stack(np.meshgrid(*([grid.q_axis] * d), indexing="ij"), -1).reshape(-1, d)
    ps = np.stack(np.meshgrid(*grid.p_axes, indexing="ij"), -1).reshape(-1, d)
    vals = grid.values.reshape(qs.shape[0], ps.shape[0])
    header = [f"q{a + 1}" for a in range(d)] + [f"p{a + 1}" for a in range(d)] + ["H"]
    rows = []
    for i, q in enumerate(qs):
        for k, p in enumerate(ps):
            rows.append((*q, *p, vals[i, k]))
    return header, rows


CONVERGENCE_HEADER = ["n", "hbar", "alpha", "t", "empirical", "theoretical", "abs_error", "flags"]


def convergence_rows(rows):
    return [(str(r.n), r.hbar, r.alpha, r.t_value, r.empirical_pairing, r.theoretical_pairing,
             r.abs_error, ";".join(r.flags)) for r in rows]
