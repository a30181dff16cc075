import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecomode.modes import PUBLISHED_MAPPING, TransportMeans as T
from ecomode.optimizer import Assignment, build_instance, solve
from ecomode.report import (
    ComparisonStats,
    ReportError,
    changed_count,
    compare_emissions,
    compare_times,
    example_rows,
    export_geojson,
    mode_change_matrix,
    table5_csv,
)
from helpers import random_instance, example_sessions


@pytest.fixture
def table5():
    sessions = example_sessions()
    inst = build_instance(sessions, PUBLISHED_MAPPING)
    return sessions, inst, solve(inst)


def test_stats_lower_median_population_sd():
    s = ComparisonStats.of([4.0, 1.0, 3.0, 2.0])
    assert s.total == 10 and s.mean == 2.5 and s.median == 2.0
    assert s.stddev == pytest.approx(statistics.pstdev([1, 2, 3, 4]))
    assert ComparisonStats.of([7.0]).median == 7.0


def test_stats_empty():
    with pytest.raises(ReportError, match="empty simulation"):
        ComparisonStats.of([])


def test_single_session_comparison(table5):
    sessions, _, _ = table5
    inst = build_instance([sessions[1]], PUBLISHED_MAPPING)
    res = solve(inst)
    co2, times = compare_emissions(inst, res), compare_times(inst, res)
    assert co2.baseline.total == pytest.approx(228.162) and co2.optimized.total == 0
    assert co2.reduction_pct == pytest.approx(100.0)
    assert times.baseline.total == 1710 and times.optimized.total == 846


def test_identity_assignment(table5):
    _, inst, _ = table5
    base = inst.baseline()
    assert compare_emissions(inst, base).reduction_pct == 0
    t = compare_times(inst, base)
    assert t.baseline == t.optimized
    matrix = mode_change_matrix(inst, base, PUBLISHED_MAPPING)
    assert all(b == o for b, o in matrix)


def test_table5_matrix_and_examples(table5):
    sessions, inst, res = table5
    assert mode_change_matrix(inst, res, PUBLISHED_MAPPING) == {(T.BUS, T.BUS): 1, (T.BUS, T.CYCLING): 3, (T.BUS, T.BUS_AND_SUBWAY): 1}
    rows = example_rows(inst, res, PUBLISHED_MAPPING, k=5)
    assert len(rows) == 5
    saving = {r.sid: r.co2_saved_g for r in rows}
    assert saving["1612703"] == pytest.approx(545.921, abs=1e-9)
    assert [r.sid for r in rows] == sorted(saving, key=lambda s: (-saving[s], s))
    assert example_rows(inst, res, PUBLISHED_MAPPING, k=0) == []
    assert len(example_rows(inst, res, PUBLISHED_MAPPING, k=50)) == 5
    csv_text = table5_csv(rows)
    assert "2318006,Bus,228.162,1710,Cycling,0.000,846" in csv_text


def test_examples_sid_order_within_equal_savings():
    sessions = example_sessions()
    inst = build_instance(sessions, PUBLISHED_MAPPING)
    rows = example_rows(inst, inst.baseline(), PUBLISHED_MAPPING, k=10)
    assert [r.sid for r in rows] == sorted(s.sid for s in sessions)


def test_all_bus_to_cycling_matrix(table5):
    sessions, _, _ = table5
    inst = build_instance(sessions[1:4], PUBLISHED_MAPPING)
    assert mode_change_matrix(inst, solve(inst), PUBLISHED_MAPPING) == {(T.BUS, T.CYCLING): 3}


def test_geojson(table5):
    sessions, inst, res = table5
    doc = export_geojson(sessions, inst, res, PUBLISHED_MAPPING)
    assert doc["type"] == "FeatureCollection" and len(doc["features"]) == 5
    f = next(f for f in doc["features"] if f["properties"]["sid"] == "2318006")
    assert f["geometry"]["coordinates"][0] == [116.30, 39.99]
    assert f["properties"]["co2_saved_g"] == pytest.approx(228.162)
    assert f["properties"]["changed"] is True
    unchanged = next(f for f in doc["features"] if f["properties"]["sid"] == "2848914")
    assert unchanged["properties"]["changed"] is False
    empty = build_instance([], PUBLISHED_MAPPING)
    assert export_geojson([], empty, Assignment(chosen=[]), PUBLISHED_MAPPING)["features"] == []


def test_geojson_degenerate_flag(table5):
    from dataclasses import replace

    s = replace(table5[0][0], destination=table5[0][0].origin)
    inst = build_instance([s], PUBLISHED_MAPPING)
    (f,) = export_geojson([s], inst, solve(inst), PUBLISHED_MAPPING)["features"]
    assert f["properties"]["degenerate"] is True
    assert f["geometry"]["coordinates"][0] == f["geometry"]["coordinates"][1]


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_time_and_matrix_consistency(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, m=int(rng.integers(1, 60)), n=8, grid=False)
    mapping = {k: v for k, v in zip(range(1, 9), [T.BUS, T.SUBWAY, T.DRIVING, T.TAXI, T.WALKING, T.CYCLING, T.BUS_AND_SUBWAY, T.BUS_AND_SHARE_CYCLE])}
    res = solve(inst)
    t = compare_times(inst, res)
    assert t.optimized.mean <= t.baseline.mean
    matrix = mode_change_matrix(inst, res, mapping)
    assert sum(matrix.values()) == inst.m
    off = sum(n for (b, o), n in matrix.items() if b != o)
    assert off == changed_count(inst, res)
