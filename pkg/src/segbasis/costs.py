"""Additive segment cost tables.

The central object is the upper-triangular table ``Q(j..l)``: the cost of
covering grid indices ``j..l`` (1-based, inclusive) with a single segment,
summed over all functions.  Three kinds are supported:

* ``SSE`` -- within-segment sum of squared deviations from the segment mean,
  built by a forward running-mean update along the first row and a
  left-endpoint downdate for the remaining rows, in O(n m^2) total.
* ``LOO`` -- the leave-one-out transform of an SSE table: each point of a
  segment is predicted by the mean of the remaining points, which scales the
  SSE by (len/(len-1))^2 and makes singleton segments infinitely expensive.
* ``LINEAR`` -- residual sum of squares of the per-segment least-squares line
  against the grid, computed in O(1) per pair from prefix sums.

``prefix_oracle_cost`` is an independent check on the SSE recursion: the same
quantity from plain prefix sums of values and squared values.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass

import numpy as np

from .core import CostKind, FunctionalDataset, Segmentation, _readonly


@dataclass(frozen=True)
class CostTable:
    """Aggregated segment costs for one dataset.

    ``values[j-1, l-1]`` holds Q(j..l) for j <= l; entries below the diagonal
    are unused and set to +inf so the solver can index the array directly.
    """

    m: int
    kind: CostKind
    values: np.ndarray  # (m, m), upper triangle meaningful

    def cost(self, j: int, l: int) -> float:
        return segment_cost(self, j, l)


def segment_cost(table: CostTable, j: int, l: int) -> float:
    """Look up Q(j..l).  Pure O(1); raises for indices outside 1 <= j <= l <= m."""
    if not (1 <= j <= l <= table.m):
        raise ValueError(f"segment ({j},{l}) out of range for m={table.m}")
    return float(table.values[j - 1, l - 1])


def partition_cost(table: CostTable, seg: Segmentation) -> float:
    """Total cost of a segmentation, accumulated from the last segment to the
    first.

    The right-to-left association mirrors how the dynamic program sums costs,
    so a partition's reported total is bitwise comparable with solver output.
    """
    if seg.m != table.m:
        raise ValueError(f"segmentation covers {seg.m} points, table {table.m}")
    total = 0.0
    for s, e in reversed(seg.intervals()):
        total = float(table.values[s - 1, e - 1]) + total
    return total


def _sse_rows_for_function(s: np.ndarray, agg: np.ndarray) -> None:
    """Accumulate one function's per-interval SSE into ``agg``.

    Row 1 is grown forward one point at a time with the running-mean update

        M(1,l) = ((l-1) M(1,l-1) + s_l) / l
        Q(1,l) = Q(1,l-1) + l/(l-1) (s_l - M(1,l))^2

    and each later row j is derived from row j-1 by removing the left
    endpoint:

        M(j,l) = ((l-j+2) M(j-1,l) - s_{j-1}) / (l-j+1)
        Q(j,l) = Q(j-1,l) - (l-j+1)/(l-j+2) (s_{j-1} - M(j,l))^2

    Rows are visited in increasing j so every downdate reads finished values.
    Only two rolling rows are kept per function.  Diagonals are pinned to
    M(j,j) = s_j, Q(j,j) = 0 exactly, and cancellation noise is clamped at 0.
    """
    m = s.size
    M = np.empty(m, dtype=np.float64)
    Q = np.empty(m, dtype=np.float64)
    M[0] = s[0]
    Q[0] = 0.0
    for l in range(1, m):
        M[l] = ((l * M[l - 1]) + s[l]) / (l + 1)
        Q[l] = Q[l - 1] + ((l + 1) / l) * (s[l] - M[l]) ** 2
    agg[0, :] += Q

    for r in range(1, m):  # 0-based row; covers intervals starting at point r+1
        nl = np.arange(1.0, m - r + 1.0)  # new lengths l-j+1, old are nl+1
        Mj = ((nl + 1.0) * M[r:] - s[r - 1]) / nl
        Qj = Q[r:] - (nl / (nl + 1.0)) * (s[r - 1] - Mj) ** 2
        np.maximum(Qj, 0.0, out=Qj)
        Mj[0] = s[r]
        Qj[0] = 0.0
        M[r:] = Mj
        Q[r:] = Qj
        agg[r, r:] += Qj


def _blank_table(m: int) -> np.ndarray:
    t = np.full((m, m), np.inf, dtype=np.float64)
    iu = np.triu_indices(m)
    t[iu] = 0.0
    return t


def build_sse_table(dataset: FunctionalDataset, threads: int | None = None) -> CostTable:
    """Build the aggregated SSE table for all functions of ``dataset``.

    Each function contributes an independent addend, so with ``threads`` > 1
    the function rows are split into contiguous chunks built concurrently and
    merged in chunk order (deterministic for a fixed thread count).  Defaults
    to the THREADS environment variable, else single-threaded.
    """
    if threads is None:
        threads = int(os.environ.get("THREADS", "1") or "1")
    threads = max(1, min(threads, dataset.n))

    def build_chunk(rows: np.ndarray) -> np.ndarray:
        agg = _blank_table(dataset.m)
        for i in range(rows.shape[0]):
            _sse_rows_for_function(rows[i], agg)
        return agg

    if threads == 1:
        table = build_chunk(dataset.values)
    else:
        chunks = np.array_split(dataset.values, threads, axis=0)
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(build_chunk, chunks))
        table = parts[0]
        for part in parts[1:]:
            iu = np.triu_indices(dataset.m)
            table[iu] += part[iu]
    return CostTable(m=dataset.m, kind=CostKind.SSE, values=_readonly(table))


def loo_table(sse: CostTable) -> CostTable:
    """Leave-one-out transform of an SSE table.

    Q_loo(j..l) = (len/(len-1))^2 Q_sse(j..l) with len = l-j+1; singletons
    get +inf (there is nothing left to predict a lone point from).
    """
    if sse.kind is not CostKind.SSE:
        raise ValueError(f"expected an SSE table, got {sse.kind.value}")
    m = sse.m
    lens = np.abs(np.arange(m)[None, :] - np.arange(m)[:, None]) + 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = (lens / (lens - 1.0)) ** 2
        out = factor * sse.values  # diagonal becomes inf*0; overwritten below
    np.fill_diagonal(out, np.inf)
    out[np.tril_indices(m, -1)] = np.inf
    return CostTable(m=m, kind=CostKind.LOO, values=_readonly(out))


def prefix_oracle_cost(dataset: FunctionalDataset, j: int, l: int) -> float:
    """SSE of interval j..l from prefix sums alone; the independent oracle.

    Uses sum(y^2) - sum(y)^2/len per function, which equals the
    deviation-from-mean form algebraically but shares no code with the
    recursive builder.
    """
    if not (1 <= j <= l <= dataset.m):
        raise ValueError(f"segment ({j},{l}) out of range for m={dataset.m}")
    total = 0.0
    length = l - j + 1
    for i in range(dataset.n):
        row = dataset.values[i]
        py = np.concatenate(([0.0], np.cumsum(row)))
        pyy = np.concatenate(([0.0], np.cumsum(row * row)))
        sy = py[l] - py[j - 1]
        syy = pyy[l] - pyy[j - 1]
        total += max(syy - sy * sy / length, 0.0)
    return total


def build_linear_table(dataset: FunctionalDataset) -> CostTable:
    """Residual SSE of the best per-segment line fit of each function against
    the grid, for every interval.

    Built from prefix sums of (t, t^2, y, y^2, t*y) in O(1) per pair.  The
    grid and each function are centred first, which changes no residual but
    avoids cancellation on offset-heavy grids.  Intervals of length 1 or 2
    are exactly interpolated, so their cost is pinned to 0.
    """
    m = dataset.m
    t = dataset.grid - dataset.grid.mean()
    pt = np.concatenate(([0.0], np.cumsum(t)))
    ptt = np.concatenate(([0.0], np.cumsum(t * t)))
    table = np.full((m, m), np.inf, dtype=np.float64)
    idx = np.arange(m)

    acc = np.zeros((m, m), dtype=np.float64)
    for i in range(dataset.n):
        y = dataset.values[i] - dataset.values[i].mean()
        py = np.concatenate(([0.0], np.cumsum(y)))
        pyy = np.concatenate(([0.0], np.cumsum(y * y)))
        pty = np.concatenate(([0.0], np.cumsum(t * y)))
        for j in range(m):
            ln = (idx[j:] - j + 1).astype(np.float64)
            st = pt[j + 1:] - pt[j]
            stt = ptt[j + 1:] - ptt[j]
            sy = py[j + 1:] - py[j]
            syy = pyy[j + 1:] - pyy[j]
            sty = pty[j + 1:] - pty[j]
            ctt = stt - st * st / ln
            cty = sty - st * sy / ln
            cyy = syy - sy * sy / ln
            slope_part = np.where(ctt > 0.0, cty * cty, 0.0) / np.where(ctt > 0.0, ctt, 1.0)
            acc[j, j:] += np.maximum(cyy - slope_part, 0.0)

    iu = np.triu_indices(m)
    table[iu] = acc[iu]
    np.fill_diagonal(table, 0.0)
    table[idx[:-1], idx[:-1] + 1] = 0.0
    return CostTable(m=m, kind=CostKind.LINEAR, values=_readonly(table))
