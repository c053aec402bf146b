"""Fingerprint summary statistics and the pre-computed StatTable."""

from __future__ import annotations

import enum
import math
from collections import Counter
from typing import Sequence

from .errors import WifiPosError
from .radiomap import GridPoint, GridSpec, RadioMap, visible_aps


class Technique(enum.Enum):
    """The eight summaries, lettered A-H."""

    MAXIMUM = "maximum"
    MINIMUM = "minimum"
    MODE = "mode"
    QUARTILES_MODE = "quartiles-mode"
    AVERAGE = "average"
    QUARTILES_AVERAGE = "quartiles-average"
    MEAN_VALUE = "mean-value"
    QUARTILES_MEAN_VALUE = "quartiles-mean-value"

    @property
    def letter(self) -> str:
        return "ABCDEFGH"[list(Technique).index(self)]

    @property
    def title(self) -> str:
        return self.value.replace("-", " ").title()

    @property
    def base(self) -> "Technique":
        """The plain statistic a Quartiles* technique applies to the filtered list."""
        if self.value.startswith("quartiles-"):
            return Technique(self.value[len("quartiles-"):])
        return self

    @property
    def uses_quartiles(self) -> bool:
        return self.base is not self

    @classmethod
    def parse(cls, text: str) -> "Technique":
        key = text.strip().lower().replace("_", "-").replace(" ", "-")
        for t in cls:
            if key in (t.value, t.name.lower().replace("_", "-"), t.letter.lower()):
                return t
        raise WifiPosError(
            f"unknown technique {text!r}; expected one of {', '.join(t.value for t in cls)}"
        )


def _require(samples):
    if len(samples) == 0:
        raise WifiPosError("empty sample list")


def mode(samples: Sequence[float]) -> float:
    """Most frequent value; ties go to the strongest (largest) value."""
    _require(samples)
    counts = Counter(samples)
    best = max(counts.values())
    return max(v for v, n in counts.items() if n == best)


def percentile(samples: Sequence[float], p: float) -> float:
    """Linear interpolation at fractional rank ``p * (n - 1)`` of the sorted data."""
    _require(samples)
    if not 0.0 <= p <= 1.0:
        raise WifiPosError(f"percentile fraction {p} outside [0, 1]")
    xs = sorted(samples)
    rank = p * (len(xs) - 1)
    lo = math.floor(rank)
    frac = rank - lo
    if frac == 0:
        return float(xs[lo])
    return xs[lo] + (xs[lo + 1] - xs[lo]) * frac


def quartile_bounds(samples: Sequence[float]) -> tuple[float, float]:
    return percentile(samples, 0.25), percentile(samples, 0.75)


def inner_quartile_filter(samples: Sequence[float]) -> list:
    """Samples within [Q1, Q3], ascending.

    Falls back to the whole (sorted) list when no sample lands inside the
    bounds, which happens for two-valued lists like ``[-40, -80]``.
    """
    _require(samples)
    q1, q3 = quartile_bounds(samples)
    xs = sorted(samples)
    inner = [v for v in xs if q1 <= v <= q3]
    return inner or xs


def _plain(samples, t):
    if t is Technique.MAXIMUM:
        return max(samples)
    if t is Technique.MINIMUM:
        return min(samples)
    if t is Technique.MODE:
        return mode(samples)
    if t is Technique.AVERAGE:
        return math.fsum(samples) / len(samples)
    if t is Technique.MEAN_VALUE:
        return (max(samples) + min(samples)) / 2
    raise AssertionError(t)


def summarize(samples: Sequence[float], t: Technique) -> float:
    """Reduce one (point, AP) sample list to a single fingerprint value.

    Average is the arithmetic mean, Mean Value the midrange; each Quartiles*
    technique applies its base statistic to :func:`inner_quartile_filter`.
    """
    _require(samples)
    if t.uses_quartiles:
        samples = inner_quartile_filter(samples)
    return _plain(samples, t.base)


class StatTable:
    """Per-technique fingerprints for every grid cell.

    ``values[t][row - 1][col - 1]`` is a tuple aligned with ``aps``; ``None``
    marks a (point, AP) pair with no samples.
    """

    def __init__(self, grid: GridSpec, aps: list[str], values: dict, floor_dbm: int):
        self.grid = grid
        self.aps = list(aps)
        self.values = values
        self.floor_dbm = floor_dbm
        self._dense: dict = {}

    def fingerprint(self, p: GridPoint, t: Technique) -> dict:
        """Non-missing summary values at ``p`` keyed by AP."""
        row = self.values[t][p.row - 1][p.col - 1]
        return {ap: v for ap, v in zip(self.aps, row) if v is not None}

    def has_values(self, t: Technique) -> bool:
        rows = self.values.get(t)
        return bool(rows) and any(v is not None for row in rows for cell in row for v in cell)

    def dense(self, t: Technique) -> list[tuple[GridPoint, tuple]]:
        """(point, vector) pairs in row-major order with missing -> floor."""
        cached = self._dense.get(t)
        if cached is None:
            floor = self.floor_dbm
            cached = [
                (p, tuple(floor if v is None else v for v in self.values[t][p.row - 1][p.col - 1]))
                for p in self.grid.points()
            ]
            self._dense[t] = cached
        return cached

    def __eq__(self, other):
        if not isinstance(other, StatTable):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.aps == other.aps
            and self.floor_dbm == other.floor_dbm
            and self.values == other.values
        )

    def to_dict(self) -> dict:
        return {
            "grid": {"rows": self.grid.rows, "cols": self.grid.cols, "cell_size_m": self.grid.cell_size_m},
            "floor_dbm": self.floor_dbm,
            "aps": self.aps,
            "values": {
                t.value: [[list(cell) for cell in row] for row in self.values[t]] for t in Technique
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StatTable":
        g = doc["grid"]
        grid = GridSpec(int(g["rows"]), int(g["cols"]), float(g["cell_size_m"]))
        aps = list(doc["aps"])
        values = {}
        for t in Technique:
            rows = doc["values"][t.value]
            if len(rows) != grid.rows or any(len(r) != grid.cols for r in rows):
                raise WifiPosError(f"{t.value} matrix does not match the {grid.rows}x{grid.cols} grid")
            for row in rows:
                for cell in row:
                    if len(cell) != len(aps):
                        raise WifiPosError(f"{t.value} cell has {len(cell)} values for {len(aps)} APs")
            values[t] = tuple(tuple(tuple(cell) for cell in row) for row in rows)
        return cls(grid, aps, values, int(doc["floor_dbm"]))


def precompute(rm: RadioMap) -> StatTable:
    """Summarize every (point, AP) sample list under all eight techniques.

    Walks the by-AP view, which is what that layout exists for.
    """
    aps = visible_aps(rm)
    grid = rm.grid
    col_of = {ap: i for i, ap in enumerate(aps)}
    cells = {t: [[[None] * len(aps) for _ in range(grid.cols)] for _ in range(grid.rows)] for t in Technique}
    for ap, points in rm.by_ap.items():
        i = col_of[ap]
        for p, samples in points.items():
            if not samples:
                continue
            rssi = [s.rssi_dbm for s in samples]
            for t in Technique:
                cells[t][p.row - 1][p.col - 1][i] = summarize(rssi, t)
    values = {t: tuple(tuple(tuple(c) for c in row) for row in cells[t]) for t in Technique}
    return StatTable(grid, aps, values, rm.floor_dbm)
