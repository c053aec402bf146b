"""Survey data model and the dual-indexed radio map.

The radio map keeps every survey sample twice: once grouped by access point
(``by_ap``, used when pre-computing summaries) and once laid out as a
rows x cols matrix of grid cells (``by_point``, used when positioning).
Both views are materialized on build and must always agree.
"""

from __future__ import annotations

import csv
import io
import os
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import GridError, SurveyParseError, WifiPosError

DEFAULT_FLOOR_DBM = -100
SURVEY_HEADER = ("row", "col", "ap_id", "rssi_dbm", "lq")


class GridPoint(NamedTuple):
    """1-based (row, col) cell; tuple ordering is the lexicographic tie-break."""

    row: int
    col: int

    @property
    def label(self) -> str:
        return f"{self.row}.{self.col}"

    @classmethod
    def parse(cls, text: str) -> "GridPoint":
        """Parse ``"4.6"`` or ``"4,6"`` into ``GridPoint(4, 6)``."""
        for sep in (".", ",", "x"):
            if sep in text:
                r, c = text.split(sep, 1)
                return cls(int(r), int(c))
        raise ValueError(f"bad grid point {text!r}")


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int
    cell_size_m: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise WifiPosError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        if not self.cell_size_m > 0:
            raise WifiPosError(f"cell size must be positive, got {self.cell_size_m}")

    @classmethod
    def parse(cls, text: str, cell_size_m: float = 1.0) -> "GridSpec":
        """Parse ``"6x6"`` style dimensions."""
        try:
            r, c = text.lower().split("x")
            return cls(int(r), int(c), cell_size_m)
        except ValueError:
            raise WifiPosError(f"bad grid spec {text!r}, expected RxC") from None

    def contains(self, p: GridPoint) -> bool:
        return 1 <= p.row <= self.rows and 1 <= p.col <= self.cols

    def is_edge(self, p: GridPoint) -> bool:
        return p.row in (1, self.rows) or p.col in (1, self.cols)

    def points(self) -> list[GridPoint]:
        """All cells in row-major order."""
        return [GridPoint(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)]

    def __len__(self) -> int:
        return self.rows * self.cols


class RawSample(NamedTuple):
    rssi_dbm: int
    lq: int


@dataclass(frozen=True)
class SurveyRecord:
    point: GridPoint
    ap: str
    sample: RawSample
    seq: int = 0


def _parse_survey_row(fields, floor_dbm):
    if len(fields) != 5:
        raise ValueError(f"expected 5 fields, got {len(fields)}")
    row_s, col_s, ap, rssi_s, lq_s = (f.strip() for f in fields)
    try:
        row, col = int(row_s), int(col_s)
    except ValueError:
        raise ValueError(f"non-integer grid coordinates {row_s!r},{col_s!r}") from None
    if row < 1 or col < 1:
        raise ValueError(f"grid coordinates must be >= 1, got {row},{col}")
    if not ap:
        raise ValueError("empty ap_id")
    try:
        rssi = int(rssi_s)
    except ValueError:
        raise ValueError(f"non-numeric rssi_dbm {rssi_s!r}") from None
    try:
        lq = int(lq_s)
    except ValueError:
        raise ValueError(f"non-numeric lq {lq_s!r}") from None
    if not floor_dbm <= rssi <= 0:
        raise ValueError(f"rssi_dbm {rssi} outside [{floor_dbm}, 0]")
    if not 0 <= lq <= 100:
        raise ValueError(f"lq {lq} outside [0, 100]")
    return GridPoint(row, col), ap, RawSample(rssi, lq)


def _open_lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return str(source), fh.read().splitlines()
    if isinstance(source, io.TextIOBase):
        return getattr(source, "name", "<stream>"), source.read().splitlines()
    return "<input>", [line.rstrip("\r\n") for line in source]


def ingest_scans(source, *, floor_dbm: int = DEFAULT_FLOOR_DBM) -> list[SurveyRecord]:
    """Parse survey CSV rows ``row,col,ap_id,rssi_dbm,lq`` into records.

    ``source`` is a path, an open text stream or an iterable of lines.  A
    header row is optional.  Every malformed row is collected and reported
    in a single :class:`SurveyParseError`.  ``seq`` is assigned per
    (point, ap) stream in file order.
    """
    name, lines = _open_lines(source)
    records: list[SurveyRecord] = []
    problems = []
    seq: Counter = Counter()
    for lineno, fields in enumerate(csv.reader(lines), start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if lineno == 1 and tuple(f.strip().lower() for f in fields) == SURVEY_HEADER:
            continue
        try:
            point, ap, sample = _parse_survey_row(fields, floor_dbm)
        except ValueError as exc:
            problems.append((lineno, str(exc)))
            continue
        key = (point, ap)
        records.append(SurveyRecord(point, ap, sample, seq[key]))
        seq[key] += 1
    if problems:
        raise SurveyParseError(name, problems)
    if not records:
        raise WifiPosError(f"{name}: no survey data")
    return records


def write_survey_csv(records: Iterable[SurveyRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SURVEY_HEADER)
    for r in records:
        w.writerow((r.point.row, r.point.col, r.ap, r.sample.rssi_dbm, r.sample.lq))


class RadioMap:
    """Survey samples stored in two mirrored layouts.

    ``by_ap[ap][point]`` and ``by_point[row - 1][col - 1][ap]`` both hold the
    same tuple of :class:`RawSample` in seq order.  Instances are treated as
    immutable once built.
    """

    def __init__(self, grid: GridSpec, by_ap, by_point, floor_dbm: int = DEFAULT_FLOOR_DBM):
        self.grid = grid
        self.by_ap = by_ap
        self.by_point = by_point
        self.floor_dbm = floor_dbm

    def cell(self, p: GridPoint) -> dict:
        return self.by_point[p.row - 1][p.col - 1]

    def rssi(self, p: GridPoint, ap: str) -> list[int]:
        """RSSI values at ``p`` for ``ap`` read from the by-point view."""
        return [s.rssi_dbm for s in self.cell(p).get(ap, ())]

    def total_samples(self) -> int:
        return sum(len(s) for pts in self.by_ap.values() for s in pts.values())

    def total_samples_by_point(self) -> int:
        return sum(len(s) for row in self.by_point for cell in row for s in cell.values())

    def __eq__(self, other):
        if not isinstance(other, RadioMap):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.floor_dbm == other.floor_dbm
            and self.by_ap == other.by_ap
            and self.by_point == other.by_point
        )

    def __repr__(self):
        return (
            f"RadioMap({self.grid.rows}x{self.grid.cols}, aps={len(self.by_ap)}, "
            f"samples={self.total_samples()})"
        )

    def to_dict(self) -> dict:
        points = []
        for p in self.grid.points():
            cell = self.cell(p)
            if not cell:
                continue
            points.append(
                {
                    "row": p.row,
                    "col": p.col,
                    "aps": {
                        ap: {
                            "rssi": [s.rssi_dbm for s in cell[ap]],
                            "lq": [s.lq for s in cell[ap]],
                        }
                        for ap in sorted(cell)
                    },
                }
            )
        return {
            "grid": {"rows": self.grid.rows, "cols": self.grid.cols, "cell_size_m": self.grid.cell_size_m},
            "floor_dbm": self.floor_dbm,
            "aps": visible_aps(self),
            "points": points,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RadioMap":
        g = doc["grid"]
        grid = GridSpec(int(g["rows"]), int(g["cols"]), float(g["cell_size_m"]))
        records = []
        for entry in doc["points"]:
            p = GridPoint(int(entry["row"]), int(entry["col"]))
            for ap, arrays in entry["aps"].items():
                if len(arrays["rssi"]) != len(arrays["lq"]):
                    raise WifiPosError(f"rssi/lq length mismatch at {p.label} {ap}")
                for i, (rssi, lq) in enumerate(zip(arrays["rssi"], arrays["lq"])):
                    records.append(SurveyRecord(p, ap, RawSample(int(rssi), int(lq)), i))
        rm = build_radio_map(records, grid, floor_dbm=int(doc["floor_dbm"]))
        if visible_aps(rm) != list(doc["aps"]):
            raise WifiPosError("AP list does not match stored samples")
        return rm


def build_radio_map(
    records: list[SurveyRecord], grid: GridSpec, *, floor_dbm: int = DEFAULT_FLOOR_DBM
) -> RadioMap:
    """Build both radio-map views from survey records.

    Raises if ``records`` is empty, if a record lies outside ``grid`` or if
    a (point, ap) stream repeats a ``seq`` value.
    """
    if not records:
        raise WifiPosError("no survey data")
    streams: dict = defaultdict(list)
    for rec in records:
        if not grid.contains(rec.point):
            raise GridError(
                f"record at {rec.point.label} (ap {rec.ap}, seq {rec.seq}) "
                f"is outside the {grid.rows}x{grid.cols} grid"
            )
        streams[(rec.point, rec.ap)].append(rec)

    by_ap: dict[str, dict[GridPoint, tuple[RawSample, ...]]] = {}
    by_point = tuple(tuple({} for _ in range(grid.cols)) for _ in range(grid.rows))
    # Sorting the keys makes the layout independent of record order.
    for point, ap in sorted(streams):
        recs = sorted(streams[(point, ap)], key=lambda r: r.seq)
        for a, b in zip(recs, recs[1:]):
            if a.seq >= b.seq:
                raise WifiPosError(f"duplicate seq {b.seq} for ap {ap} at {point.label}")
        # Two separate tuples: the views share values but not containers.
        by_ap.setdefault(ap, {})[point] = tuple(r.sample for r in recs)
        by_point[point.row - 1][point.col - 1][ap] = tuple(r.sample for r in recs)
    return RadioMap(grid, by_ap, by_point, floor_dbm)


@dataclass(frozen=True)
class Mismatch:
    ap: str
    point: GridPoint
    by_ap: tuple
    by_point: tuple


def check_consistency(rm: RadioMap) -> list[Mismatch]:
    """List every (ap, point) whose sample multiset differs between the views.

    An empty list means the two layouts mirror each other exactly.
    """
    keys = {(ap, p) for ap, pts in rm.by_ap.items() for p in pts}
    for r, row in enumerate(rm.by_point, start=1):
        for c, cell in enumerate(row, start=1):
            keys.update((ap, GridPoint(r, c)) for ap in cell)
    report = []
    for ap, p in sorted(keys, key=lambda k: (k[1], k[0])):
        a = tuple(rm.by_ap.get(ap, {}).get(p, ()))
        inside = rm.grid.contains(p) and 1 <= p.row <= len(rm.by_point)
        b = tuple(rm.by_point[p.row - 1][p.col - 1].get(ap, ())) if inside else ()
        if Counter(a) != Counter(b):
            report.append(Mismatch(ap, p, a, b))
    return report


def visible_aps(rm: RadioMap) -> list[str]:
    """All APs in the map, sorted; the canonical vector axis order."""
    aps = set(rm.by_ap)
    for row in rm.by_point:
        for cell in row:
            aps.update(cell)
    return sorted(aps)
