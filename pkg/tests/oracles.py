"""Reference computations kept independent of the package code."""

import numpy as np
from scipy import stats as sps


def normal_equations(X, y):
    """beta, se, p from (X'X) b = X'y solved by LU, with the textbook variance."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n, k = X.shape
    xtx = X.T @ X
    beta = np.linalg.solve(xtx, X.T @ y)
    resid = y - X @ beta
    s2 = resid @ resid / (n - k)
    se = np.sqrt(np.diag(s2 * np.linalg.inv(xtx)))
    p = 2 * sps.t.sf(np.abs(beta / se), n - k)
    return beta, se, p


def binomial_interval(n, p, level=0.99):
    """Central interval of Binomial(n, p) holding at least ``level`` mass."""
    lo, hi = sps.binom.interval(level, n, p)
    return int(lo), int(hi)


def engel_mean_rate(w0, w_half, w1, give_share=0.5):
    """Expected giving rate of the engel_mixture mock over a Give/Take design.

    The leftover mass is uniform on [0, 1] under Give and on [-1, 1] under Take.
    """
    rest = 1 - w0 - w_half - w1
    uniform_mean = give_share * 0.5 + (1 - give_share) * 0.0
    return 0.5 * w_half + 1.0 * w1 + rest * uniform_mean


def coefficients_for_marks(marks, factors):
    """``{term: (estimate, p)}`` whose classification reproduces ``marks``.

    ``marks`` is a whitespace-separated row of one model's marks, aligned with
    ``factors`` (pairs of term name and expected direction).
    """
    out = {}
    for mark, (term, direction) in zip(marks, factors):
        expected_sign = -1.0 if direction == "negative" else 1.0
        out[term] = {
            "✓": (expected_sign * 0.8, 0.001),
            "✗": (-expected_sign * 0.8, 0.002),
            "n.s.": (0.3, 0.41),
            "pos.": (0.5, 0.01),
            "neg.": (-0.5, 0.01),
        }[mark]
    return out


def grid_results(grid, models, factors):
    """Per-model coefficient fixtures for a grid of mark rows (factors x models)."""
    cells = [row.split() for row in grid]
    return {m: coefficients_for_marks([row[j] for row in cells], factors) for j, m in enumerate(models)}
