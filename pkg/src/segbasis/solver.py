"""Order-constrained optimal partitioning by dynamic programming.

``F(p, j)`` is the best cost of splitting indices ``{j..m}`` into p contiguous
segments:

    F(1, j) = Q(j..m)
    F(p, j) = min_{j <= l <= m-p+1}  Q(j..l) + F(p-1, l+1)

The minimizing split is recorded for every (p, j) so any segment count up to
the solved maximum can be reconstructed by backtracking from j = 1.  Ties are
broken toward the smallest split, which makes results deterministic and equal
to lexicographic-first among optimal partitions.

+inf is an admissible cost (leave-one-out tables assign it to singletons); a
partition is feasible iff its total is finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, isfinite

import numpy as np

from .core import Segmentation, _readonly, segmentation_from_ends
from .costs import CostTable, partition_cost


class InfeasiblePartitionError(ValueError):
    """Raised when every partition with the requested segment count has
    infinite cost."""


@dataclass(frozen=True)
class DPTable:
    """Filled dynamic-programming arrays.

    ``costs[p-1, j-1]`` is F(p, j); ``splits[p-1, j-1]`` is the 1-based end of
    the first segment in an optimal p-partition of {j..m} (0 where no
    p-partition of {j..m} exists).
    """

    k_max: int
    m: int
    costs: np.ndarray  # (k_max, m) float
    splits: np.ndarray  # (k_max, m) int


@dataclass(frozen=True)
class SolveResult:
    """One entry of an all-k sweep; ``segmentation`` is None when no
    finite-cost partition with this k exists."""

    k: int
    segmentation: Segmentation | None
    cost: float

    @property
    def feasible(self) -> bool:
        return isfinite(self.cost)


def fill_dp(table: CostTable, k_max: int) -> DPTable:
    """Fill F and the split records for all segment counts up to ``k_max``."""
    m = table.m
    if not (1 <= k_max <= m):
        raise ValueError(f"k out of range: {k_max} not in 1..{m}")
    C = table.values  # +inf below the diagonal by construction
    F = np.full((k_max, m), np.inf, dtype=np.float64)
    L = np.zeros((k_max, m), dtype=np.int64)
    F[0, :] = C[:, m - 1]
    L[0, :] = m
    # candidate[j, l] = Q(j..l) + F(p-1, l+1), evaluated in row blocks small
    # enough that the add and the argmin run against cache-resident data
    chunk = 128
    buf = np.empty((min(chunk, m), m), dtype=np.float64) if k_max > 1 else None
    for p in range(2, k_max + 1):
        tail = np.full(m, np.inf, dtype=np.float64)
        tail[: m - 1] = F[p - 2, 1:]
        valid = m - p + 1  # rows j <= m-p+1 (1-based) admit a p-partition
        for s in range(0, valid, chunk):
            e = min(s + chunk, valid)
            block = buf[: e - s]
            np.add(C[s:e], tail[None, :], out=block)
            block[:, valid:] = np.inf  # keep p-1 nonempty segments on the right
            arg = np.argmin(block, axis=1)  # first minimum: leftmost split
            F[p - 1, s:e] = block[np.arange(e - s), arg]
            L[p - 1, s:e] = arg + 1
        # all-inf rows: argmin is meaningless, pin split to the leftmost slot
        dead = ~np.isfinite(F[p - 1, :valid])
        if dead.any():
            L[p - 1, :valid][dead] = np.arange(1, valid + 1)[dead]
    return DPTable(k_max=k_max, m=m, costs=_readonly(F), splits=_readonly(L))


def backtrack(dp: DPTable, k: int, m: int) -> Segmentation:
    """Reconstruct the optimal k-segmentation from the recorded splits.

    The first segment is {1..split(k, 1)}; the walk then restarts at the next
    index with one segment fewer.
    """
    if not (1 <= k <= dp.k_max):
        raise ValueError(f"k={k} exceeds solved k_max={dp.k_max}")
    if m != dp.m:
        raise ValueError(f"m={m} does not match solved table m={dp.m}")
    ends = []
    j = 1
    for p in range(k, 0, -1):
        l = int(dp.splits[p - 1, j - 1])
        if l == 0:
            raise ValueError(f"no {p}-partition recorded at index {j}")
        ends.append(l)
        j = l + 1
    return segmentation_from_ends(ends, m)


def solve(table: CostTable, k: int) -> tuple[Segmentation, float, DPTable]:
    """Optimal partition of the table's index range into exactly k segments.

    Raises :class:`InfeasiblePartitionError` when every k-partition has
    infinite cost (leave-one-out tables with k > m/2).
    """
    dp = fill_dp(table, k)
    total = float(dp.costs[k - 1, 0])
    if not isfinite(total):
        raise InfeasiblePartitionError(
            f"no finite-cost partition into {k} segments"
        )
    return backtrack(dp, k, table.m), total, dp


def solve_all(table: CostTable, k_max: int) -> list[SolveResult]:
    """Optima for every segment count 1..k_max from a single DP fill.

    Infinite-cost counts are flagged (segmentation None), not omitted.
    """
    dp = fill_dp(table, k_max)
    out = []
    for k in range(1, k_max + 1):
        total = float(dp.costs[k - 1, 0])
        if isfinite(total):
            out.append(SolveResult(k, backtrack(dp, k, table.m), total))
        else:
            out.append(SolveResult(k, None, np.inf))
    return out


def brute_force(table: CostTable, k: int) -> tuple[Segmentation | None, float]:
    """Enumerate every contiguous k-partition and return the cheapest.

    Testing oracle with the same tie-break as :func:`solve`: partitions are
    visited in lexicographic end order and replaced only on strict
    improvement.  Guarded to at most 10^6 partitions.
    """
    m = table.m
    if not (1 <= k <= m):
        raise ValueError(f"k out of range: {k} not in 1..{m}")
    n_parts = comb(m - 1, k - 1)
    if n_parts > 10**6:
        raise ValueError(f"{n_parts} partitions exceed the enumeration guard")
    best_cost = np.inf
    best: Segmentation | None = None
    for cuts in combinations(range(1, m), k - 1):
        seg = Segmentation(ends=cuts + (m,), m=m)
        total = partition_cost(table, seg)
        if total < best_cost:
            best_cost = total
            best = seg
    return best, float(best_cost)
