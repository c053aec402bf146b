"""Log-distance path-loss environment with Gaussian shadowing.

Stands in for a physical site survey: every (point, AP) pair gets its own
seeded random stream, so output depends only on the environment and counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import LabeledQuery
from .errors import WifiPosError
from .radiomap import DEFAULT_FLOOR_DBM, GridPoint, GridSpec, RawSample, SurveyRecord

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

_SURVEY_STREAM = 0
_QUERY_STREAM = 1


@dataclass(frozen=True)
class SynthAp:
    id: str
    x: float
    y: float
    p0_dbm: float = -40.0
    n: float = 2.5

    def __post_init__(self):
        if not self.id:
            raise WifiPosError("AP id must be non-empty")
        if not self.n > 0:
            raise WifiPosError(f"path-loss exponent must be positive for {self.id}")
        if self.p0_dbm > 0:
            raise WifiPosError(f"p0_dbm must be <= 0 for {self.id}")


@dataclass(frozen=True)
class SynthEnv:
    grid: GridSpec
    aps: tuple
    sigma_db: float = 0.0
    floor_dbm: int = DEFAULT_FLOOR_DBM
    seed: int = 0
    queries_per_point: int = 20
    truth_points: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "aps", tuple(self.aps))
        object.__setattr__(self, "truth_points", tuple(GridPoint(*p) for p in self.truth_points))
        if self.sigma_db < 0:
            raise WifiPosError("sigma_db must be >= 0")
        if not self.aps:
            raise WifiPosError("environment needs at least one AP")
        if len({a.id for a in self.aps}) != len(self.aps):
            raise WifiPosError("duplicate AP ids in environment")
        for a in self.aps:
            if self.floor_dbm > a.p0_dbm:
                raise WifiPosError(f"floor_dbm {self.floor_dbm} above p0_dbm of {a.id}")

    def with_(self, **changes) -> "SynthEnv":
        return replace(self, **changes)


def cell_center(grid: GridSpec, p: GridPoint) -> tuple[float, float]:
    """(x, y) meters of the center of ``p``; x runs along columns."""
    return (p.col - 0.5) * grid.cell_size_m, (p.row - 0.5) * grid.cell_size_m


def expected_rssi(env: SynthEnv, ap: SynthAp, p: GridPoint) -> float:
    if not env.grid.contains(p):
        raise WifiPosError(f"{p.label} is outside the grid")
    x, y = cell_center(env.grid, p)
    d = math.hypot(x - ap.x, y - ap.y)
    return max(ap.p0_dbm - 10.0 * ap.n * math.log10(max(d, 1.0)), env.floor_dbm)


def _stream(env, tag, p, ap_index):
    return np.random.default_rng(np.random.SeedSequence([env.seed, tag, p.row, p.col, ap_index]))


def _draw(env, tag, p, ap_index, ap, count):
    mu = expected_rssi(env, ap, p)
    noise = _stream(env, tag, p, ap_index).normal(0.0, 1.0, count) * env.sigma_db
    vals = np.clip(np.rint(mu + noise), env.floor_dbm, 0)
    return [int(v) for v in vals]


def link_quality(rssi: int, floor_dbm: int) -> int:
    """Linear map of [floor, 0] dBm onto [0, 100] percent."""
    lq = round(100 * (rssi - floor_dbm) / (0 - floor_dbm))
    return min(max(lq, 0), 100)


def generate_survey(env: SynthEnv, samples_per_point: int) -> list[SurveyRecord]:
    """Survey records for every cell, scan-major within a cell."""
    if samples_per_point < 1:
        raise WifiPosError("samples_per_point must be >= 1")
    records = []
    for p in env.grid.points():
        streams = [_draw(env, _SURVEY_STREAM, p, i, ap, samples_per_point) for i, ap in enumerate(env.aps)]
        for seq in range(samples_per_point):
            for ap, vals in zip(env.aps, streams):
                rssi = vals[seq]
                records.append(SurveyRecord(p, ap.id, RawSample(rssi, link_quality(rssi, env.floor_dbm)), seq))
    return records


def generate_queries(env: SynthEnv, truth_points=None, per_point: int | None = None) -> list[LabeledQuery]:
    """Independent single-scan query vectors at each truth point.

    Defaults come from the environment: its ``truth_points`` (all cells if
    empty) and ``queries_per_point``.
    """
    if truth_points is None:
        truth_points = env.truth_points or env.grid.points()
    if per_point is None:
        per_point = env.queries_per_point
    if per_point < 1:
        raise WifiPosError("per_point must be >= 1")
    out = []
    for p in truth_points:
        p = GridPoint(*p)
        if not env.grid.contains(p):
            raise WifiPosError(f"truth point {p.label} is outside the grid")
        streams = [_draw(env, _QUERY_STREAM, p, i, ap, per_point) for i, ap in enumerate(env.aps)]
        for k in range(per_point):
            out.append(LabeledQuery(p, {ap.id: vals[k] for ap, vals in zip(env.aps, streams)}))
    return out


def env_from_dict(doc: dict) -> SynthEnv:
    """Build an environment from a parsed TOML document.

    Expected layout::

        seed = 7
        sigma_db = 3.0
        floor_dbm = -100

        [grid]
        rows = 6
        cols = 6
        cell_size_m = 1.0

        [[ap]]
        id = "AP1"
        x = 0.0
        y = 0.0
        p0_dbm = -40.0
        n = 2.5

        [queries]            # optional
        per_point = 20
        points = [[4, 6]]    # default: every cell
    """
    try:
        g = doc["grid"]
        grid = GridSpec(int(g["rows"]), int(g["cols"]), float(g.get("cell_size_m", 1.0)))
        aps = [
            SynthAp(str(a["id"]), float(a["x"]), float(a["y"]), float(a.get("p0_dbm", -40.0)), float(a.get("n", 2.5)))
            for a in doc.get("ap", doc.get("aps", []))
        ]
        q = doc.get("queries", {})
        return SynthEnv(
            grid=grid,
            aps=tuple(aps),
            sigma_db=float(doc.get("sigma_db", 0.0)),
            floor_dbm=int(doc.get("floor_dbm", DEFAULT_FLOOR_DBM)),
            seed=int(doc.get("seed", 0)),
            queries_per_point=int(q.get("per_point", 20)),
            truth_points=tuple(tuple(p) for p in q.get("points", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, WifiPosError):
            raise
        raise WifiPosError(f"invalid environment spec: {exc!r}") from None


def load_env(path) -> SynthEnv:
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise WifiPosError(f"{path}: {exc}") from None
    return env_from_dict(doc)


def corner_env(sigma_db: float = 0.0, seed: int = 0, rows: int = 6, cols: int = 6, cell_size_m: float = 1.0) -> SynthEnv:
    """Three APs on corners of the surveyed area, p0 -40 dBm, exponent 2.5."""
    w, h = cols * cell_size_m, rows * cell_size_m
    aps = (SynthAp("AP1", 0.0, 0.0), SynthAp("AP2", w, 0.0), SynthAp("AP3", 0.0, h))
    return SynthEnv(GridSpec(rows, cols, cell_size_m), aps, sigma_db=sigma_db, seed=seed)
