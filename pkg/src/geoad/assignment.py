"""Maximum-value rectangular assignment via the Hungarian method.

Rows are ads, columns are nodes.  Every column is matched to a distinct
row, so the matrix needs at least as many rows as columns (or padding).

The solver adds one column at a time (shortest augmenting path with dual
potentials), so an optimal assignment for some columns can be extended by
one more column with a single augmentation; ``AssignmentState`` exposes
that for the subset enumeration in ``single_path``.
"""
from __future__ import annotations

import numpy as np

from .exceptions import InfeasibleAssignmentError


class AssignmentState:
    """Optimal assignment of the columns added so far.

    Immutable: ``add`` returns a new state.  Costs are stored as
    ``column max - value``, which keeps reduced costs nonnegative.  ``v``
    holds the row potentials; rows that were never matched keep ``v = 0``,
    so ``-v`` is a valid set of nonnegative row prices for the maximization.
    """

    __slots__ = ("n_rows", "costs", "offset", "cost", "u", "v", "owner")

    def __init__(self, n_rows: int):
        self.n_rows = n_rows
        self.costs: tuple[np.ndarray, ...] = ()
        self.offset = 0.0
        self.cost = 0.0
        self.u = np.zeros(0)
        self.v = np.zeros(n_rows)
        self.owner = np.full(n_rows, -1, dtype=np.int64)  # column matched to each row

    @property
    def n_cols(self) -> int:
        return len(self.costs)

    @property
    def value(self) -> float:
        return self.offset - self.cost

    def add(self, column) -> "AssignmentState":
        col = np.asarray(column, dtype=float)
        m = self.n_rows
        i_new = self.n_cols
        if i_new >= m:
            raise InfeasibleAssignmentError(f"cannot match {i_new + 1} columns to {m} rows")
        top = float(col.max())
        costs = self.costs + (top - col,)
        u = np.append(self.u, 0.0)
        v = self.v
        owner = self.owner.copy()
        # Dijkstra over rows from the new column, in reduced costs
        dist = costs[i_new] - v
        open_d = dist.copy()
        way = np.full(m, -1, dtype=np.int64)  # previous row on the path, -1 = new column
        scanned = []
        done = np.zeros(m, dtype=bool)
        while True:
            j = int(np.argmin(open_d))  # lowest row index on ties
            d = open_d[j]
            if owner[j] < 0:
                break
            open_d[j] = np.inf
            done[j] = True
            scanned.append(j)
            i = owner[j]
            nd = d + costs[i] - u[i] - v
            better = (nd < open_d) & ~done
            open_d[better] = nd[better]
            dist[better] = nd[better]
            way[better] = j
        end, total = j, d
        v = v.copy()
        if scanned:
            sc = np.array(scanned)
            shift = total - dist[sc]
            u[owner[sc]] += shift
            v[sc] -= shift
        u[i_new] += total
        j = end
        while way[j] >= 0:
            prev = way[j]
            owner[j] = owner[prev]
            j = prev
        owner[j] = i_new
        new = AssignmentState.__new__(AssignmentState)
        new.n_rows, new.costs, new.offset = m, costs, self.offset + top
        new.cost = self.cost + float(total)
        new.u, new.v, new.owner = u, v, owner
        return new

    def matching(self) -> list[tuple[int, int]]:
        """``(row, col)`` pairs sorted by column."""
        rows = np.flatnonzero(self.owner >= 0)
        return sorted(((int(r), int(self.owner[r])) for r in rows), key=lambda rc: rc[1])


def solve_max_assignment(values, pad: bool = False) -> tuple[list[tuple[int, int]], float]:
    """Match every column of ``values`` to a distinct row, maximizing the sum.

    Returns the matching as ``(row, col)`` pairs sorted by column, and its
    value.  With ``pad=True`` a matrix with more columns than rows gets
    zero-valued dummy rows; columns matched to a dummy row are left out of
    the returned matching.
    """
    w = np.asarray(values, dtype=float)
    if w.ndim != 2:
        raise ValueError("values must be a 2-d matrix")
    rows, cols = w.shape
    if cols == 0:
        return [], 0.0
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("values must be finite and nonnegative")
    real_rows = rows
    if cols > rows:
        if not pad:
            raise InfeasibleAssignmentError(f"{cols} columns cannot be matched to {rows} rows")
        w = np.vstack([w, np.zeros((cols - rows, cols))])
        rows = cols
    state = AssignmentState(rows)
    for c in range(cols):
        state = state.add(w[:, c])
    matching = [(r, c) for r, c in state.matching() if r < real_rows]
    value = float(sum(w[r, c] for r, c in matching))
    return matching, value


def cardinality_matchings(values, max_size: int | None = None) -> np.ndarray:
    """``out[s]`` = maximum total value of a matching with exactly ``s``
    edges (rows and columns each used at most once), for ``s = 0..max_size``.

    Grows the matching one augmenting path at a time, each time along the
    most valuable path in the residual graph (Bellman-Ford, since backward
    edges carry negative gains).
    """
    w = np.asarray(values, dtype=float)
    rows, cols = w.shape
    limit = min(rows, cols) if max_size is None else min(max_size, rows, cols)
    out = np.zeros(limit + 1)
    # repeated columns create zero-gain cycles; rounding must not make them look profitable
    eps = 1e-12 * max(1.0, float(w.max(initial=0.0)))
    row_of_col = np.full(cols, -1)
    col_of_row = np.full(rows, -1)
    for s in range(1, limit + 1):
        # best gain to reach each row/column from a free column
        gain_c = np.where(row_of_col < 0, 0.0, -np.inf)
        gain_r = np.full(rows, -np.inf)
        pred_r = np.full(rows, -1)
        for _ in range(2 * s + 2):
            # column -> row along unmatched edges
            cand = gain_c[None, :] + w
            cand[np.arange(rows)[col_of_row >= 0], col_of_row[col_of_row >= 0]] = -np.inf
            best_c = cand.argmax(axis=1)
            best_g = cand[np.arange(rows), best_c]
            upd = best_g > gain_r + eps
            if not upd.any():
                break
            gain_r[upd] = best_g[upd]
            pred_r[upd] = best_c[upd]
            # matched row -> its column along the backward edge
            m = col_of_row >= 0
            back = gain_r[m] - w[m, col_of_row[m]]
            tgt = col_of_row[m]
            better = back > gain_c[tgt] + eps
            gain_c[tgt[better]] = back[better]
        free = col_of_row < 0
        if not free.any():
            break
        r = int(np.flatnonzero(free)[np.argmax(gain_r[free])])
        out[s] = out[s - 1] + gain_r[r]
        for _ in range(s):
            c = int(pred_r[r])
            prev = row_of_col[c]
            row_of_col[c] = r
            col_of_row[r] = c
            r = prev
            if r < 0:
                break
        else:
            raise RuntimeError("augmenting path did not terminate")
    return out
