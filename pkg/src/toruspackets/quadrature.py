"""Step-halving (Romberg) quadrature for smooth integrands on a finite interval."""
import numpy as np

from .errors import QuadratureUnderResolved


def romberg(f, a, b, atol=1e-10, min_level=4, max_level=18):
    """Integrate the vectorized ``f`` over [a, b].

    Returns (value, error estimate); the estimate is the change between the
    last two diagonal Romberg entries. Raises QuadratureUnderResolved when
    2**max_level + 1 nodes do not reach ``atol``.
    """
    if b == a:
        return 0.0, 0.0
    h = b - a
    rows = [[0.5 * h * (f(np.array([a]))[0] + f(np.array([b]))[0])]]
    err = np.inf
    for level in range(1, max_level + 1):
        h /= 2
        mids = a + h * (2 * np.arange(2 ** (level - 1)) + 1)
        row = [0.5 * rows[-1][0] + h * np.sum(f(mids))]
        for m in range(1, level + 1):
            row.append(row[m - 1] + (row[m - 1] - rows[-1][m - 1]) / (4 ** m - 1))
        err = abs(row[-1] - rows[-1][-1])
        rows.append(row)
        if level >= min_level and err <= atol:
            return row[-1], err
    raise QuadratureUnderResolved(f"Romberg did not reach {atol:.1e} on [{a}, {b}] (last change {err:.3g})")
