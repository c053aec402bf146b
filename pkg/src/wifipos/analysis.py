"""Offline batch evaluation: hit rates, position histograms, error in meters."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

from .errors import FormatError, QueryError, WifiPosError
from .locator import ApFilter, PositionEstimate, locate
from .radiomap import GridPoint, GridSpec
from .stats import StatTable, Technique, percentile

REGIONS = ("all", "inner", "edge")
REPORT_HEADER = ("technique", "metric", "region", "value")


@dataclass(frozen=True)
class LabeledQuery:
    truth: GridPoint
    query: dict


@dataclass
class BatchResult:
    """Estimates for every query under every technique, in query order."""

    grid: GridSpec
    truths: list[GridPoint]
    estimates: dict[Technique, list[PositionEstimate]]

    def truth_points(self) -> list[GridPoint]:
        return sorted(set(self.truths))

    def for_truth(self, truth: GridPoint, t: Technique) -> list[PositionEstimate]:
        return [e for tp, e in zip(self.truths, self.estimates[t]) if tp == truth]


def batch_locate(
    queries: list[LabeledQuery], table: StatTable, f: Optional[ApFilter] = None
) -> BatchResult:
    if not queries:
        raise WifiPosError("no labeled queries")
    estimates: dict[Technique, list[PositionEstimate]] = {t: [] for t in Technique}
    for i, lq in enumerate(queries):
        if not table.grid.contains(lq.truth):
            raise QueryError(i, f"truth point {lq.truth.label} is outside the grid")
        try:
            for t in Technique:
                estimates[t].append(locate(lq.query, table, t, f))
        except WifiPosError as exc:
            raise QueryError(i, exc) from exc
    return BatchResult(table.grid, [q.truth for q in queries], estimates)


def round_pct(x: float) -> float:
    """Round half-up to one decimal (97.75 -> 97.8)."""
    return float(Decimal(repr(x)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def hit_rate(result: BatchResult, t: Technique, truth: Optional[GridPoint] = None) -> float:
    """Percentage of estimates landing exactly on their true cell."""
    pairs = list(zip(result.truths, result.estimates.get(t, ())))
    if truth is not None:
        pairs = [(tp, e) for tp, e in pairs if tp == truth]
    if not pairs:
        raise WifiPosError(f"no estimates for {t.value}")
    hits = sum(1 for tp, e in pairs if e.point == tp)
    return round_pct(100.0 * hits / len(pairs))


def position_histogram(result: BatchResult, truth: GridPoint, t: Technique) -> dict[GridPoint, int]:
    est = result.for_truth(truth, t)
    if not est:
        raise WifiPosError(f"no estimates for {t.value} at {truth.label}")
    return dict(sorted(Counter(e.point for e in est).items()))


def error_meters(truth: GridPoint, estimate: GridPoint, grid: GridSpec) -> float:
    return grid.cell_size_m * math.hypot(truth.row - estimate.row, truth.col - estimate.col)


def _in_region(grid, p, region):
    if region == "all":
        return True
    if region == "edge":
        return grid.is_edge(p)
    if region == "inner":
        return not grid.is_edge(p)
    raise WifiPosError(f"unknown region {region!r}")


def errors_in_region(result: BatchResult, t: Technique, region: str = "all") -> list[float]:
    return [
        error_meters(tp, e.point, result.grid)
        for tp, e in zip(result.truths, result.estimates[t])
        if _in_region(result.grid, tp, region)
    ]


def p95_error(result: BatchResult, t: Technique, region: str = "all") -> float:
    """95th-percentile positioning error in meters over truth points in ``region``.

    ``inner`` keeps truth points off the grid boundary, ``edge`` those on it.
    """
    errs = errors_in_region(result, t, region)
    if not errs:
        raise WifiPosError(f"no truth points in region {region!r}")
    return percentile(errs, 0.95)


def max_error(result: BatchResult, t: Technique, region: str = "all") -> float:
    errs = errors_in_region(result, t, region)
    if not errs:
        raise WifiPosError(f"no truth points in region {region!r}")
    return max(errs)


@dataclass
class AnalysisReport:
    grid: GridSpec
    hit_rates: dict = field(default_factory=dict)
    hits: dict = field(default_factory=dict)
    totals: dict = field(default_factory=dict)
    truth_hit_rates: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    mean_error: dict = field(default_factory=dict)
    p95: dict = field(default_factory=dict)
    max_error: dict = field(default_factory=dict)

    def ranking(self) -> list[Technique]:
        """Techniques by hit rate, then lower p95 error, then A-H order."""
        return sorted(
            self.hit_rates,
            key=lambda t: (-self.hit_rates[t], self.p95.get((t, "all"), math.inf), t.letter),
        )


def analyze(result: BatchResult) -> AnalysisReport:
    rep = AnalysisReport(result.grid)
    truths = result.truth_points()
    for t in Technique:
        est = result.estimates[t]
        rep.hits[t] = sum(1 for tp, e in zip(result.truths, est) if e.point == tp)
        rep.totals[t] = len(est)
        rep.hit_rates[t] = hit_rate(result, t)
        for tp in truths:
            rep.truth_hit_rates[(tp, t)] = hit_rate(result, t, tp)
            rep.histograms[(tp, t)] = position_histogram(result, tp, t)
        errs = errors_in_region(result, t)
        rep.errors[t] = errs
        rep.mean_error[t] = math.fsum(errs) / len(errs)
        for region in REGIONS:
            if errors_in_region(result, t, region):
                rep.p95[(t, region)] = p95_error(result, t, region)
                rep.max_error[(t, region)] = max_error(result, t, region)
    return rep


def _num(v) -> str:
    if isinstance(v, int):
        return str(v)
    return repr(round(float(v), 6))


def report_rows(rep: AnalysisReport) -> list[tuple[str, str, str, str]]:
    rows = []
    truths = sorted({tp for tp, _ in rep.histograms})
    for t in Technique:
        if t not in rep.hit_rates:
            continue
        rows.append((t.value, "hit_rate", "all", _num(rep.hit_rates[t])))
        rows.append((t.value, "hits", "all", _num(rep.hits[t])))
        rows.append((t.value, "total", "all", _num(rep.totals[t])))
        rows.append((t.value, "mean_error_m", "all", _num(rep.mean_error[t])))
        for metric, table in (("p95_error_m", rep.p95), ("max_error_m", rep.max_error)):
            for region in REGIONS:
                if (t, region) in table:
                    rows.append((t.value, metric, region, _num(table[(t, region)])))
        for tp in truths:
            rows.append((t.value, "hit_rate", tp.label, _num(rep.truth_hit_rates[(tp, t)])))
            for ep, n in rep.histograms[(tp, t)].items():
                rows.append((t.value, f"count:{ep.label}", tp.label, _num(n)))
    return rows


def render_csv(rep: AnalysisReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    w.writerows(report_rows(rep))
    return buf.getvalue()


def render_jsonl(rep: AnalysisReport) -> str:
    lines = []
    truths = sorted({tp for tp, _ in rep.histograms})
    for t in Technique:
        if t not in rep.hit_rates:
            continue
        obj = {
            "technique": t.value,
            "letter": t.letter,
            "hit_rate": rep.hit_rates[t],
            "hits": rep.hits[t],
            "total": rep.totals[t],
            "mean_error_m": round(rep.mean_error[t], 6),
            "p95_error_m": {r: round(rep.p95[(t, r)], 6) for r in REGIONS if (t, r) in rep.p95},
            "max_error_m": {r: round(rep.max_error[(t, r)], 6) for r in REGIONS if (t, r) in rep.max_error},
            "per_truth": {
                tp.label: {
                    "hit_rate": rep.truth_hit_rates[(tp, t)],
                    "histogram": {ep.label: n for ep, n in rep.histograms[(tp, t)].items()},
                }
                for tp in truths
            },
        }
        lines.append(json.dumps(obj, separators=(",", ":")) + "\n")
    return "".join(lines)


def export_report(rep: AnalysisReport, path, fmt: str = "csv") -> None:
    from .storage import atomic_write_text

    if fmt == "csv":
        text = render_csv(rep)
    elif fmt == "jsonl":
        text = render_jsonl(rep)
    else:
        raise WifiPosError(f"unknown report format {fmt!r}")
    atomic_write_text(path, text)


def load_report_summary(path) -> list[dict]:
    """Per-technique ``hit_rate`` and ``p95_error_m`` read back from an exported report.

    Accepts both the CSV and JSONL layouts.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    out: dict[str, dict] = {}
    if text.lstrip().startswith("{"):
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[obj["technique"]] = {
                    "hit_rate": float(obj["hit_rate"]),
                    "p95_error_m": obj.get("p95_error_m", {}).get("all"),
                }
            except (ValueError, KeyError, AttributeError) as exc:
                raise FormatError(f"{path} line {n}: {exc}") from None
    else:
        reader = csv.reader(text.splitlines())
        header = next(reader, None)
        if header is None or tuple(header) != REPORT_HEADER:
            raise FormatError(f"{path}: not a wifipos report (header {header})")
        for row in reader:
            if len(row) != 4:
                raise FormatError(f"{path}: bad row {row}")
            tech, metric, region, value = row
            entry = out.setdefault(tech, {"hit_rate": None, "p95_error_m": None})
            if region == "all" and metric == "hit_rate":
                entry["hit_rate"] = float(value)
            elif region == "all" and metric == "p95_error_m":
                entry["p95_error_m"] = float(value)
    summary = []
    for tech, entry in out.items():
        if entry["hit_rate"] is None:
            raise FormatError(f"{path}: no overall hit_rate for {tech}")
        summary.append({"technique": tech, **entry})
    return summary


def rank_techniques(summary: list[dict], top: Optional[int] = None) -> list[dict]:
    order = {t.value: i for i, t in enumerate(Technique)}

    def key(row):
        p95 = row["p95_error_m"]
        return (-row["hit_rate"], math.inf if p95 is None else p95, order.get(row["technique"], len(order)), row["technique"])

    ranked = sorted(summary, key=key)
    return ranked if top is None else ranked[:top]
