"""Wi-Fi RSSI fingerprint positioning engine."""

from .analysis import (
    AnalysisReport,
    BatchResult,
    LabeledQuery,
    analyze,
    batch_locate,
    error_meters,
    export_report,
    hit_rate,
    p95_error,
    position_histogram,
)
from .errors import GridError, NoUsableAPsError, SurveyParseError, WifiPosError
from .locator import ApFilter, PositionEstimate, apply_ap_filter, euclidean_distance, locate, locate_all
from .radiomap import (
    GridPoint,
    GridSpec,
    RadioMap,
    RawSample,
    SurveyRecord,
    build_radio_map,
    check_consistency,
    ingest_scans,
    visible_aps,
)
from .stats import StatTable, Technique, inner_quartile_filter, mode, precompute, quartile_bounds, summarize
from .storage import load_map, save_map

__version__ = "0.1.0"
