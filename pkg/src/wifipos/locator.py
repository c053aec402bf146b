"""Online positioning by minimum Euclidean distance in RSSI space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import NoUsableAPsError, WifiPosError
from .radiomap import DEFAULT_FLOOR_DBM, GridPoint, RadioMap, visible_aps
from .stats import StatTable, Technique

# One scan: AP id -> RSSI dBm.
QueryVector = Mapping[str, float]


@dataclass(frozen=True)
class ApFilter:
    """Restricts which APs take part in matching.

    ``rssi_min`` drops APs heard too weakly (too far), ``rssi_max`` drops
    APs heard too strongly (too close).  Bounds apply to the query reading.
    """

    include: Optional[frozenset] = None
    rssi_min: Optional[float] = None
    rssi_max: Optional[float] = None

    def __post_init__(self):
        if self.include is not None:
            object.__setattr__(self, "include", frozenset(self.include))
        if self.rssi_min is not None and self.rssi_max is not None and self.rssi_min > self.rssi_max:
            raise WifiPosError(f"rssi_min {self.rssi_min} exceeds rssi_max {self.rssi_max}")


@dataclass(frozen=True)
class PositionEstimate:
    point: GridPoint
    distance: float
    technique: Optional[Technique]
    evaluations: int = 0


def validate_query(query: QueryVector, floor_dbm: float = DEFAULT_FLOOR_DBM) -> None:
    if not query:
        raise WifiPosError("empty query vector")
    for ap, v in query.items():
        if not floor_dbm <= v <= 0:
            raise WifiPosError(f"query rssi {v} for ap {ap} outside [{floor_dbm}, 0]")


def euclidean_distance(
    query: QueryVector,
    fingerprint: Mapping[str, float],
    axis: Sequence[str],
    floor: float = DEFAULT_FLOOR_DBM,
) -> float:
    """Distance over ``axis``; an AP missing on either side reads as ``floor``."""
    if not axis:
        raise WifiPosError("empty AP axis")
    total = 0.0
    for ap in axis:
        d = query.get(ap, floor) - fingerprint.get(ap, floor)
        total += d * d
    return math.sqrt(total)


def apply_ap_filter(
    axis: Sequence[str],
    query: QueryVector,
    f: Optional[ApFilter],
    floor: float = DEFAULT_FLOOR_DBM,
) -> list[str]:
    """Subset of ``axis`` passing ``f``, order preserved.

    An AP absent from the query is judged by the floor value it will be
    matched with.
    """
    if f is None:
        kept = list(axis)
    else:
        kept = []
        for ap in axis:
            if f.include is not None and ap not in f.include:
                continue
            v = query.get(ap, floor)
            if f.rssi_min is not None and v < f.rssi_min:
                continue
            if f.rssi_max is not None and v > f.rssi_max:
                continue
            kept.append(ap)
    if not kept:
        raise NoUsableAPsError()
    return kept


def _nearest(qvec, candidates):
    # Squared distances compared; strict < keeps the first (lexicographically
    # smallest) point on ties since candidates arrive in row-major order.
    best_p, best_d2 = None, math.inf
    n = 0
    for p, vec in candidates:
        d2 = 0.0
        for a, b in zip(qvec, vec):
            d2 += (a - b) * (a - b)
        n += 1
        if d2 < best_d2:
            best_p, best_d2 = p, d2
    return best_p, math.sqrt(best_d2), n


def locate(
    query: QueryVector,
    table: StatTable,
    t: Technique,
    f: Optional[ApFilter] = None,
) -> PositionEstimate:
    """Nearest grid cell to ``query`` among technique ``t`` fingerprints.

    Performs exactly one distance evaluation per grid cell, regardless of
    how many raw samples the survey held.
    """
    if not query:
        raise WifiPosError("empty query vector")
    if not table.has_values(t):
        raise WifiPosError(f"table has no {t.value} values")
    floor = table.floor_dbm
    axis = apply_ap_filter(table.aps, query, f, floor)
    qvec = tuple(query.get(ap, floor) for ap in axis)
    dense = table.dense(t)
    if len(axis) != len(table.aps):
        idx = [table.aps.index(ap) for ap in axis]
        dense = [(p, tuple(vec[i] for i in idx)) for p, vec in dense]
    point, dist, n = _nearest(qvec, dense)
    return PositionEstimate(point, dist, t, n)


def locate_all(
    query: QueryVector, table: StatTable, f: Optional[ApFilter] = None
) -> dict[Technique, PositionEstimate]:
    return {t: locate(query, table, t, f) for t in Technique}


class RawFingerprintIndex:
    """Every raw scan vector of a radio map, for the sample-by-sample baseline.

    The i-th scan at a point is the i-th sample of each AP stream there;
    shorter streams read as floor.  Locating against this index costs one
    distance evaluation per raw scan instead of one per grid cell.
    """

    def __init__(self, rm: RadioMap):
        self.grid = rm.grid
        self.aps = visible_aps(rm)
        self.floor_dbm = rm.floor_dbm
        vectors = []
        for p in rm.grid.points():
            cell = rm.cell(p)
            depth = max((len(s) for s in cell.values()), default=0)
            for i in range(depth):
                vec = tuple(
                    cell[ap][i].rssi_dbm if ap in cell and i < len(cell[ap]) else self.floor_dbm
                    for ap in self.aps
                )
                vectors.append((p, vec))
        self.vectors = vectors

    def __len__(self):
        return len(self.vectors)

    def locate(self, query: QueryVector, f: Optional[ApFilter] = None) -> PositionEstimate:
        if not query:
            raise WifiPosError("empty query vector")
        axis = apply_ap_filter(self.aps, query, f, self.floor_dbm)
        qvec = tuple(query.get(ap, self.floor_dbm) for ap in axis)
        vectors = self.vectors
        if len(axis) != len(self.aps):
            idx = [self.aps.index(ap) for ap in axis]
            vectors = [(p, tuple(vec[i] for i in idx)) for p, vec in vectors]
        point, dist, n = _nearest(qvec, vectors)
        return PositionEstimate(point, dist, None, n)
