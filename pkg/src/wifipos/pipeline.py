"""simulate -> build -> analyze, chained through files on disk."""

from __future__ import annotations

import io
import os
from pathlib import Path

from .analysis import analyze, batch_locate, export_report
from .queryio import parse_labeled_queries, write_labeled_queries
from .radiomap import build_radio_map, ingest_scans, write_survey_csv
from .stats import precompute
from .storage import atomic_write_text, load_map, save_map
from .synth import SynthEnv, generate_queries, generate_survey, load_env


def simulate(env: SynthEnv, samples_per_point: int, survey_out, queries_out=None, queries_per_point=None) -> None:
    buf = io.StringIO()
    write_survey_csv(generate_survey(env, samples_per_point), buf)
    atomic_write_text(survey_out, buf.getvalue())
    if queries_out is not None:
        buf = io.StringIO()
        write_labeled_queries(generate_queries(env, per_point=queries_per_point), buf)
        atomic_write_text(queries_out, buf.getvalue())


def build(scans, grid, out, floor_dbm: int = -100) -> None:
    rm = build_radio_map(ingest_scans(scans, floor_dbm=floor_dbm), grid, floor_dbm=floor_dbm)
    save_map(out, rm, precompute(rm))


def analyze_files(map_path, labeled, out, fmt: str = "csv", ap_filter=None):
    _, table = load_map(map_path)
    queries = parse_labeled_queries(labeled, floor_dbm=table.floor_dbm)
    report = analyze(batch_locate(queries, table, ap_filter))
    export_report(report, out, fmt)
    return report


def run_pipeline(env_path, workdir, samples_per_point: int = 100, queries_per_point=None, fmt: str = "csv") -> dict:
    """Run every stage with intermediate files in ``workdir``; returns their paths."""
    env = load_env(env_path)
    work = Path(workdir)
    os.makedirs(work, exist_ok=True)
    paths = {
        "survey": work / "survey.csv",
        "labeled": work / "labeled.csv",
        "map": work / "map.wfp",
        "report": work / ("report.jsonl" if fmt == "jsonl" else "report.csv"),
    }
    simulate(env, samples_per_point, paths["survey"], paths["labeled"], queries_per_point)
    build(paths["survey"], env.grid, paths["map"], env.floor_dbm)
    analyze_files(paths["map"], paths["labeled"], paths["report"], fmt)
    return paths
