import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wifipos import (
    GridError,
    GridPoint,
    GridSpec,
    RawSample,
    SurveyParseError,
    SurveyRecord,
    WifiPosError,
    build_radio_map,
    check_consistency,
    ingest_scans,
    visible_aps,
)
from wifipos.storage import dumps_map, loads_map


def rec(r, c, ap, rssi, seq=0, lq=50):
    return SurveyRecord(GridPoint(r, c), ap, RawSample(rssi, lq), seq)


def random_records(rng, grid, n, aps=("A", "B", "C")):
    seq = {}
    out = []
    for _ in range(n):
        p = GridPoint(rng.randint(1, grid.rows), rng.randint(1, grid.cols))
        ap = rng.choice(aps)
        k = seq.get((p, ap), 0)
        seq[(p, ap)] = k + 1
        out.append(rec(p.row, p.col, ap, rng.randint(-100, 0), k, rng.randint(0, 100)))
    return out


class TestIngest:
    def test_single_row_maps_fields(self):
        (r,) = ingest_scans(["4,6,AP1,-52,80"])
        assert r.point == GridPoint(4, 6)
        assert r.ap == "AP1"
        assert r.sample == RawSample(-52, 80)
        assert r.seq == 0

    def test_header_is_optional(self):
        assert len(ingest_scans(["row,col,ap_id,rssi_dbm,lq", "1,1,A,-50,50"])) == 1

    def test_non_numeric_rssi_names_line(self):
        with pytest.raises(SurveyParseError) as exc:
            ingest_scans(["1,1,A,-50,50", "4,6,AP1,abc,80"])
        assert exc.value.errors[0][0] == 2
        assert "line 2" in str(exc.value)

    @pytest.mark.parametrize(
        "row",
        ["1,1,A,-50", "1,1,A,-50,50,9", "1,1,A,-50,101", "1,1,A,-50,x", "1,1,A,5,50", "0,1,A,-50,50", "1,1,,-50,50"],
    )
    def test_malformed_rows(self, row):
        with pytest.raises(SurveyParseError):
            ingest_scans([row])

    def test_all_bad_rows_reported(self):
        with pytest.raises(SurveyParseError) as exc:
            ingest_scans(["1,1,A,x,1", "1,1,A,-5,1", "1,1,A,-5,500"])
        assert [line for line, _ in exc.value.errors] == [1, 3]

    def test_empty_file(self):
        with pytest.raises(WifiPosError, match="no survey data"):
            ingest_scans([])
        with pytest.raises(WifiPosError, match="no survey data"):
            ingest_scans(["row,col,ap_id,rssi_dbm,lq", ""])

    def test_survey_scale_file(self, tmp_path):
        path = tmp_path / "survey.csv"
        rows = [f"{1 + i % 6},{1 + (i // 6) % 6},AP{i % 3},{-40 - i % 50},{i % 101}" for i in range(3600)]
        path.write_text("\n".join(rows) + "\n")
        assert len(ingest_scans(path)) == 3600

    def test_seq_assigned_per_stream(self):
        recs = ingest_scans(["1,1,A,-50,1", "1,1,B,-51,1", "1,1,A,-52,1"])
        assert [r.seq for r in recs] == [0, 0, 1]


class TestBuild:
    def test_single_record(self):
        rm = build_radio_map([rec(1, 1, "AP1", -50)], GridSpec(6, 6))
        assert [(p, [s.rssi_dbm for s in ss]) for p, ss in rm.by_ap["AP1"].items()] == [(GridPoint(1, 1), [-50])]
        assert rm.rssi(GridPoint(1, 1), "AP1") == [-50]

    def test_out_of_grid(self):
        with pytest.raises(GridError, match="7.1"):
            build_radio_map([rec(7, 1, "A", -50)], GridSpec(6, 6))

    def test_empty(self):
        with pytest.raises(WifiPosError):
            build_radio_map([], GridSpec(6, 6))

    def test_duplicate_seq(self):
        with pytest.raises(WifiPosError, match="duplicate seq"):
            build_radio_map([rec(1, 1, "A", -50, 0), rec(1, 1, "A", -51, 0)], GridSpec(2, 2))

    def test_order_follows_seq(self):
        rm = build_radio_map([rec(1, 1, "A", -52, 1), rec(1, 1, "A", -50, 0)], GridSpec(1, 1))
        assert rm.rssi(GridPoint(1, 1), "A") == [-50, -52]

    def test_survey_scale(self):
        rng = random.Random(5)
        grid = GridSpec(6, 6)
        recs = []
        for p in grid.points():
            for k in range(101):
                recs.append(rec(p.row, p.col, "A", rng.randint(-90, -30), k))
        rm = build_radio_map(recs, grid)
        assert rm.total_samples() == rm.total_samples_by_point() == 3636 > 3600

    def test_pure_function_of_inputs(self):
        rng = random.Random(1)
        grid = GridSpec(4, 5)
        recs = random_records(rng, grid, 300)
        a = build_radio_map(recs, grid)
        b = build_radio_map(list(reversed(recs)), grid)
        assert a == b

    @pytest.mark.parametrize("bad", [(0, 1, 1.0), (1, 0, 1.0), (1, 1, 0.0)])
    def test_grid_invariants(self, bad):
        with pytest.raises(WifiPosError):
            GridSpec(*bad)


class TestConsistency:
    def test_fresh_map_is_clean(self):
        rm = build_radio_map([rec(1, 1, "A", -50), rec(2, 2, "B", -60)], GridSpec(2, 2))
        assert check_consistency(rm) == []

    def test_detects_removed_sample(self):
        rm = build_radio_map([rec(1, 1, "A", -50, 0), rec(1, 1, "A", -55, 1), rec(2, 1, "A", -70)], GridSpec(2, 2))
        rm.by_point[0][0]["A"] = rm.by_point[0][0]["A"][:1]
        report = check_consistency(rm)
        assert [(m.ap, m.point) for m in report] == [("A", GridPoint(1, 1))]

    def test_detects_extra_ap_in_one_view(self):
        rm = build_radio_map([rec(1, 1, "A", -50)], GridSpec(2, 2))
        rm.by_point[1][1]["Z"] = (RawSample(-40, 60),)
        assert [(m.ap, m.point) for m in check_consistency(rm)] == [("Z", GridPoint(2, 2))]

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 8))
    def test_random_builds_mirror(self, seed, rows, cols):
        rng = random.Random(seed)
        grid = GridSpec(rows, cols)
        recs = random_records(rng, grid, 1000)
        rm = build_radio_map(recs, grid)
        assert check_consistency(rm) == []
        assert rm.total_samples() == rm.total_samples_by_point() == len(recs)


class TestVisibleAps:
    def test_sorted(self):
        rm = build_radio_map([rec(1, 1, "B", -1), rec(1, 1, "A", -1), rec(1, 2, "C", -1)], GridSpec(1, 2))
        assert visible_aps(rm) == ["A", "B", "C"]

    def test_single(self):
        assert visible_aps(build_radio_map([rec(1, 1, "X", -1)], GridSpec(1, 1))) == ["X"]

    def test_synthetic_three_aps(self, noisy_map):
        assert len(visible_aps(noisy_map)) == 3


class TestPersistence:
    def test_round_trip(self):
        rng = random.Random(2)
        grid = GridSpec(3, 4, 0.5)
        rm = build_radio_map(random_records(rng, grid, 400), grid, floor_dbm=-100)
        text = dumps_map(rm)
        rm2, _ = loads_map(text)
        assert rm2 == rm
        assert dumps_map(rm2) == text

    def test_bad_documents(self):
        with pytest.raises(WifiPosError):
            loads_map("not json")
        with pytest.raises(WifiPosError):
            loads_map('{"format": "other"}')
        with pytest.raises(WifiPosError, match="version"):
            loads_map('{"format": "wifipos-map", "version": 99}')
