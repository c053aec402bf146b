"""Query and labeled-query file formats."""

from __future__ import annotations

import csv
from typing import Iterable, Iterator

from .analysis import LabeledQuery
from .errors import SurveyParseError, WifiPosError
from .radiomap import DEFAULT_FLOOR_DBM, GridPoint

LABELED_HEADER = ("truth_row", "truth_col", "seq", "ap_id", "rssi_dbm")
COLUMNAR_HEADER = ("seq", "ap_id", "rssi_dbm")


def _rssi(text, floor_dbm):
    try:
        v = int(text.strip())
    except ValueError:
        raise ValueError(f"non-numeric rssi {text.strip()!r}") from None
    if not floor_dbm <= v <= 0:
        raise ValueError(f"rssi {v} outside [{floor_dbm}, 0]")
    return v


def _add(query, ap, v):
    if not ap:
        raise ValueError("empty ap_id")
    if ap in query:
        raise ValueError(f"ap {ap} repeated within one scan")
    query[ap] = v


def parse_pair_line(line: str, floor_dbm: int = DEFAULT_FLOOR_DBM) -> dict:
    """``"AP1:-52;AP2:-60"`` -> ``{"AP1": -52, "AP2": -60}``.

    The last colon separates the value, so BSSID-style ids keep theirs.
    """
    query: dict = {}
    for part in line.strip().split(";"):
        if not part.strip():
            continue
        ap, sep, val = part.strip().rpartition(":")
        if not sep:
            raise ValueError(f"expected ap_id:rssi, got {part.strip()!r}")
        _add(query, ap.strip(), _rssi(val, floor_dbm))
    if not query:
        raise ValueError("empty scan")
    return query


def iter_queries(lines: Iterable[str], floor_dbm: int = DEFAULT_FLOOR_DBM, source: str = "<query>") -> Iterator[dict]:
    """Yield one query vector per scan, lazily.

    Two layouts are accepted: one ``ap_id:rssi[;...]`` scan per line, or
    columnar ``seq,ap_id,rssi_dbm`` rows where consecutive rows sharing a
    ``seq`` form one scan.  The layout is fixed by the first data line.
    """
    layout = None
    current_seq, current = None, {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if layout is None:
            if tuple(f.strip().lower() for f in line.split(",")) == COLUMNAR_HEADER:
                layout = "columnar"
                continue
            layout = "columnar" if line.count(",") == 2 and ":" not in line.split(",")[0] else "pairs"
        try:
            if layout == "pairs":
                yield parse_pair_line(line, floor_dbm)
                continue
            fields = next(csv.reader([line]))
            if len(fields) != 3:
                raise ValueError(f"expected 3 fields, got {len(fields)}")
            seq = fields[0].strip()
            if seq != current_seq and current:
                yield current
                current = {}
            current_seq = seq
            _add(current, fields[1].strip(), _rssi(fields[2], floor_dbm))
        except ValueError as exc:
            raise SurveyParseError(source, [(lineno, str(exc))]) from None
    if current:
        yield current


def parse_labeled_queries(source, floor_dbm: int = DEFAULT_FLOOR_DBM) -> list[LabeledQuery]:
    """Read ``truth_row,truth_col,seq,ap_id,rssi_dbm`` rows.

    Rows sharing (truth_row, truth_col, seq) form one scan; scans keep the
    order of their first row.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        name = str(source)
        with open(source, newline="", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        name, lines = "<labeled>", list(source)
    groups: dict = {}
    problems = []
    for lineno, fields in enumerate(csv.reader(lines), start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if lineno == 1 and tuple(f.strip().lower() for f in fields) == LABELED_HEADER:
            continue
        try:
            if len(fields) != 5:
                raise ValueError(f"expected 5 fields, got {len(fields)}")
            try:
                truth = GridPoint(int(fields[0]), int(fields[1]))
            except ValueError:
                raise ValueError("non-integer truth coordinates") from None
            key = (truth, fields[2].strip())
            _add(groups.setdefault(key, {}), fields[3].strip(), _rssi(fields[4], floor_dbm))
        except ValueError as exc:
            problems.append((lineno, str(exc)))
    if problems:
        raise SurveyParseError(name, problems)
    if not groups:
        raise WifiPosError(f"{name}: no labeled queries")
    return [LabeledQuery(truth, q) for (truth, _), q in groups.items()]


def write_labeled_queries(queries: Iterable[LabeledQuery], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(LABELED_HEADER)
    seq: dict = {}
    for lq in queries:
        n = seq.get(lq.truth, 0)
        seq[lq.truth] = n + 1
        for ap in sorted(lq.query):
            w.writerow((lq.truth.row, lq.truth.col, n, ap, lq.query[ap]))


def format_pair_line(query: dict) -> str:
    return ";".join(f"{ap}:{query[ap]}" for ap in sorted(query))
