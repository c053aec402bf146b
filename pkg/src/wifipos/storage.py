"""On-disk formats: the versioned ``.wfp`` map file and atomic writes."""

from __future__ import annotations

import json
import os
import tempfile

from .errors import FormatError, WifiPosError
from .radiomap import RadioMap, visible_aps
from .stats import StatTable, precompute

MAP_FORMAT = "wifipos-map"
MAP_VERSION = 1


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".wifipos-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dumps_map(rm: RadioMap, table: StatTable | None = None) -> str:
    if table is None:
        table = precompute(rm)
    doc = {
        "format": MAP_FORMAT,
        "version": MAP_VERSION,
        "radio_map": rm.to_dict(),
        "stat_table": table.to_dict(),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_map(path, rm: RadioMap, table: StatTable | None = None) -> None:
    atomic_write_text(path, dumps_map(rm, table))


def loads_map(text: str, source: str = "<map>") -> tuple[RadioMap, StatTable]:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise FormatError(f"{source}: not a wifipos map file ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != MAP_FORMAT:
        raise FormatError(f"{source}: not a wifipos map file")
    if doc.get("version") != MAP_VERSION:
        raise FormatError(f"{source}: unsupported map version {doc.get('version')!r}")
    try:
        rm = RadioMap.from_dict(doc["radio_map"])
        table = StatTable.from_dict(doc["stat_table"]) if "stat_table" in doc else precompute(rm)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, WifiPosError):
            raise FormatError(f"{source}: {exc}") from None
        raise FormatError(f"{source}: malformed map file ({exc!r})") from None
    if table.grid != rm.grid or table.aps != visible_aps(rm):
        raise FormatError(f"{source}: stat table does not match radio map")
    return rm, table


def load_map(path) -> tuple[RadioMap, StatTable]:
    with open(path, encoding="utf-8") as fh:
        return loads_map(fh.read(), os.fspath(path))
