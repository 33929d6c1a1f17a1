"""Choosing the number of segments by the leave-one-out error estimate.

Two strategies:

* ``STANDARD_THEN_LOO`` -- solve for the SSE-optimal partition at every k,
  then score each one with the leave-one-out estimate and keep the k with the
  smallest score.  Nothing stops these partitions from containing singleton
  segments, whose score is infinite, so this variant tends to settle on few
  segments when the data is noisy.
* ``FULL_LOO`` -- run the dynamic program directly on the leave-one-out cost
  table (it is additive too).  Singletons are then never selected, and the
  per-k scores are the best achievable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import isfinite

import numpy as np

from .core import FunctionalDataset, Segmentation
from .costs import build_sse_table, loo_table, partition_cost
from .solver import solve_all


class SelectionStrategy(Enum):
    STANDARD_THEN_LOO = "standard"
    FULL_LOO = "full-loo"


@dataclass(frozen=True)
class SelectionRecord:
    """Scores for one segment count.  ``segmentation`` is None when no
    finite-cost partition exists at this k (full-l.o.o. with k > m/2)."""

    k: int
    segmentation: Segmentation | None
    sse_total: float
    loo_total: float


@dataclass(frozen=True)
class SelectionReport:
    strategy: SelectionStrategy
    records: tuple[SelectionRecord, ...]
    selected_k: int
    degenerate: bool = False

    @property
    def selected(self) -> SelectionRecord:
        return self.records[self.selected_k - 1]


def default_k_max(m: int) -> int:
    """Largest segment count tried when none is given: capped at 64 and at
    m/2 so the full-l.o.o. variant stays feasible."""
    return min(64, max(1, m // 2))


def _pick(records: list[SelectionRecord]) -> tuple[int, bool]:
    best_k, best = 0, np.inf
    for rec in records:
        if isfinite(rec.loo_total) and rec.loo_total < best:
            best_k, best = rec.k, rec.loo_total
    if best_k == 0:
        return 1, True  # every score infinite; fall back to one segment
    return best_k, False


def select_k_standard(
    dataset: FunctionalDataset, k_max: int | None = None
) -> SelectionReport:
    """Score the SSE-optimal partitions with the leave-one-out estimate."""
    if k_max is None:
        k_max = default_k_max(dataset.m)
    sse = build_sse_table(dataset)
    loo = loo_table(sse)
    records = []
    for res in solve_all(sse, k_max):
        records.append(
            SelectionRecord(
                k=res.k,
                segmentation=res.segmentation,
                sse_total=res.cost,
                loo_total=partition_cost(loo, res.segmentation),
            )
        )
    selected, degenerate = _pick(records)
    return SelectionReport(
        strategy=SelectionStrategy.STANDARD_THEN_LOO,
        records=tuple(records),
        selected_k=selected,
        degenerate=degenerate,
    )


def select_k_full_loo(
    dataset: FunctionalDataset, k_max: int | None = None
) -> SelectionReport:
    """Optimize the leave-one-out estimate inside the dynamic program."""
    if k_max is None:
        k_max = default_k_max(dataset.m)
    sse = build_sse_table(dataset)
    loo = loo_table(sse)
    records = []
    for res in solve_all(loo, k_max):
        if res.segmentation is None:
            sse_total = np.inf
        else:
            sse_total = partition_cost(sse, res.segmentation)
        records.append(
            SelectionRecord(
                k=res.k,
                segmentation=res.segmentation,
                sse_total=sse_total,
                loo_total=res.cost,
            )
        )
    selected, degenerate = _pick(records)
    return SelectionReport(
        strategy=SelectionStrategy.FULL_LOO,
        records=tuple(records),
        selected_k=selected,
        degenerate=degenerate,
    )
