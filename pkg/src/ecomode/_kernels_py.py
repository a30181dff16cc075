"""Numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the extension is benchmarked and tested against.
"""

import numpy as np

IMPLEMENTATION = "python"


def solve_rows(P, Q, offered, qprime, clicked, alpha, beta):
    """Per-row argmin of ``alpha*P + beta*Q`` over offered plans with ``Q <= qprime``.

    Ties go to the lower P, then the clicked column, then the lower column.
    """
    m, n = P.shape
    if m == 0:
        return np.zeros(0, dtype=np.intp)
    feasible = offered & (Q <= qprime[:, None])
    with np.errstate(invalid="ignore"):
        obj = np.where(feasible, alpha * P + beta * Q, np.inf)
    cand = feasible & (obj == obj.min(axis=1)[:, None])
    p = np.where(cand, P, np.inf)
    cand &= p == p.min(axis=1)[:, None]
    rows = np.arange(m)
    clicked_wins = cand[rows, clicked]
    # argmax on a bool matrix returns the first True, i.e. the lowest column
    chosen = np.where(clicked_wins, clicked, cand.argmax(axis=1))
    return chosen.astype(np.intp)


def enumerate_min(values):
    """Exhaustively search all joint picks of one entry per row.

    ``values`` is a list of 1-D arrays, one per row, each already sorted by
    the row's tie-break order. Returns ``(total, ranks)`` for the pick with the
    smallest left-to-right sum, preferring the lexicographically first pick
    (row 0 most significant) among equal sums.
    """
    if not values:
        return 0.0, np.zeros(0, dtype=np.intp)
    totals = np.asarray(values[0], dtype=np.float64)
    for v in values[1:]:
        totals = np.add.outer(totals, np.asarray(v, dtype=np.float64))
    flat = int(np.argmin(totals.reshape(-1)))
    ranks = np.unravel_index(flat, totals.shape)
    return float(totals.reshape(-1)[flat]), np.array(ranks, dtype=np.intp).reshape(-1)
