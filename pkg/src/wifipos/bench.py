"""Pre-computed table vs raw-sample matching: evaluation counts and wall clock."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .locator import RawFingerprintIndex, locate
from .radiomap import RadioMap
from .stats import StatTable, Technique


@dataclass(frozen=True)
class SpeedupResult:
    queries: int
    table_evaluations: int
    raw_evaluations: int
    table_seconds: float
    raw_seconds: float

    @property
    def evaluation_ratio(self) -> float:
        return self.raw_evaluations / self.table_evaluations

    @property
    def speedup(self) -> float:
        return self.raw_seconds / self.table_seconds


def measure_speedup(rm: RadioMap, table: StatTable, queries, technique: Technique = Technique.AVERAGE) -> SpeedupResult:
    """Time both online paths over the same queries.

    Index construction and table pre-computation happen before timing; only
    per-query matching is measured.
    """
    index = RawFingerprintIndex(rm)
    queries = list(queries)
    t0 = time.perf_counter()
    table_evals = sum(locate(q, table, technique).evaluations for q in queries)
    t1 = time.perf_counter()
    raw_evals = sum(index.locate(q).evaluations for q in queries)
    t2 = time.perf_counter()
    return SpeedupResult(len(queries), table_evals, raw_evals, t1 - t0, t2 - t1)
