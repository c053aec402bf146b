import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wifipos import (
    ApFilter,
    GridPoint,
    GridSpec,
    NoUsableAPsError,
    RawSample,
    SurveyRecord,
    Technique,
    WifiPosError,
    apply_ap_filter,
    build_radio_map,
    euclidean_distance,
    locate,
    locate_all,
    precompute,
)
from wifipos.locator import RawFingerprintIndex
from wifipos.stats import StatTable


def table_from(grid, aps, fingerprints, floor=-100):
    """StatTable with the same fingerprint for every technique."""
    rows = tuple(
        tuple(tuple(fingerprints.get(GridPoint(r, c), {}).get(ap) for ap in aps) for c in range(1, grid.cols + 1))
        for r in range(1, grid.rows + 1)
    )
    return StatTable(grid, aps, {t: rows for t in Technique}, floor)


class TestDistance:
    def test_identical(self):
        assert euclidean_distance({"A": -50, "B": -60}, {"A": -50, "B": -60}, ["A", "B"]) == 0

    def test_three_four_five(self):
        assert euclidean_distance({"A": -50, "B": -60}, {"A": -53, "B": -56}, ["A", "B"]) == 5.0

    def test_missing_uses_floor(self):
        assert euclidean_distance({"A": -50}, {"A": -50, "B": -60}, ["A", "B"], -100) == 40.0

    def test_empty_axis(self):
        with pytest.raises(WifiPosError):
            euclidean_distance({"A": -1}, {"A": -1}, [])

    @given(
        st.dictionaries(st.sampled_from("ABCD"), st.integers(-100, 0)),
        st.dictionaries(st.sampled_from("ABCD"), st.integers(-100, 0)),
    )
    def test_metric_sanity(self, q, f):
        axis = list("ABCD")
        d = euclidean_distance(q, f, axis)
        assert d >= 0
        assert d == euclidean_distance(f, q, axis)
        same = all(q.get(a, -100) == f.get(a, -100) for a in axis)
        assert (d == 0) == same


class TestFilter:
    def test_include(self):
        assert apply_ap_filter(["A", "B", "C"], {}, ApFilter(include={"A", "C"})) == ["A", "C"]

    def test_too_close_excluded(self):
        assert apply_ap_filter(["A", "B"], {"A": -30, "B": -70}, ApFilter(rssi_max=-40)) == ["B"]

    def test_nothing_left(self):
        with pytest.raises(NoUsableAPsError, match="no usable APs"):
            apply_ap_filter(["A"], {"A": -90}, ApFilter(rssi_min=-60))

    def test_missing_ap_judged_at_floor(self):
        assert apply_ap_filter(["A", "B"], {"A": -50}, ApFilter(rssi_min=-99)) == ["A"]

    def test_bounds_must_be_ordered(self):
        with pytest.raises(WifiPosError):
            ApFilter(rssi_min=-40, rssi_max=-60)

    def test_no_filter_keeps_order(self):
        assert apply_ap_filter(["C", "A"], {}, None) == ["C", "A"]


class TestLocate:
    def test_self_match(self, noisy_table):
        p = GridPoint(4, 6)
        for t in Technique:
            est = locate(noisy_table.fingerprint(p, t), noisy_table, t)
            assert est.point == p
            assert est.distance == 0
            assert est.technique is t

    def test_two_points(self):
        table = table_from(GridSpec(1, 2), ["A"], {GridPoint(1, 1): {"A": -50}, GridPoint(1, 2): {"A": -70}})
        est = locate({"A": -55}, table, Technique.AVERAGE)
        assert est.point == GridPoint(1, 1)
        assert est.distance == 5

    def test_tie_goes_to_lowest_row_col(self):
        fp = {"A": -60}
        table = table_from(GridSpec(2, 2), ["A"], {GridPoint(2, 1): fp, GridPoint(1, 2): fp})
        assert locate({"A": -60}, table, Technique.MODE).point == GridPoint(1, 2)

    def test_evaluations_equal_grid_cells(self, noisy_table):
        est = locate({"AP1": -50}, noisy_table, Technique.AVERAGE)
        assert est.evaluations == 36

    def test_filter_changes_axis(self):
        table = table_from(
            GridSpec(1, 2),
            ["A", "B"],
            {GridPoint(1, 1): {"A": -50, "B": -90}, GridPoint(1, 2): {"A": -52, "B": -40}},
        )
        q = {"A": -50, "B": -40}
        assert locate(q, table, Technique.AVERAGE).point == GridPoint(1, 2)
        assert locate(q, table, Technique.AVERAGE, ApFilter(include={"A"})).point == GridPoint(1, 1)

    def test_filter_error_propagates(self, noisy_table):
        with pytest.raises(NoUsableAPsError):
            locate({"AP1": -90}, noisy_table, Technique.AVERAGE, ApFilter(include={"nope"}))

    def test_empty_table(self):
        table = table_from(GridSpec(1, 1), ["A"], {})
        with pytest.raises(WifiPosError, match="no average values"):
            locate({"A": -50}, table, Technique.AVERAGE)

    def test_empty_query(self, noisy_table):
        with pytest.raises(WifiPosError):
            locate({}, noisy_table, Technique.AVERAGE)

    def test_matches_scalar_distance_bruteforce(self, noisy_table):
        rng = random.Random(9)
        for _ in range(50):
            q = {ap: rng.randint(-90, -30) for ap in noisy_table.aps}
            t = rng.choice(list(Technique))
            dists = [
                (euclidean_distance(q, noisy_table.fingerprint(p, t), noisy_table.aps), p)
                for p in noisy_table.grid.points()
            ]
            best = min(dists)
            est = locate(q, noisy_table, t)
            assert est.point == best[1]
            assert est.distance == pytest.approx(best[0], abs=1e-9)


class TestLocateAll:
    def test_singleton_table_agrees(self):
        recs = [SurveyRecord(p, "A", RawSample(-40 - 5 * i, 0), 0) for i, p in enumerate(GridSpec(2, 2).points())]
        table = precompute(build_radio_map(recs, GridSpec(2, 2)))
        ests = locate_all({"A": -47}, table)
        assert len({e.point for e in ests.values()}) == 1
        assert set(ests) == set(Technique)

    def test_equals_independent_calls(self, noisy_table):
        rng = random.Random(4)
        q = {ap: rng.randint(-80, -40) for ap in noisy_table.aps}
        assert locate_all(q, noisy_table) == {t: locate(q, noisy_table, t) for t in Technique}


def test_raw_index_counts_every_scan(noisy_map):
    idx = RawFingerprintIndex(noisy_map)
    assert len(idx) == 36 * 30
    p = GridPoint(3, 3)
    first_scan = {ap: noisy_map.rssi(p, ap)[0] for ap in idx.aps}
    est = idx.locate(first_scan)
    assert est.evaluations == 36 * 30
    assert est.distance == 0
