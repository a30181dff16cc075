import io
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from ecomode.ingest import (
    ClickRecord,
    DisplayRecord,
    GeoPoint,
    IngestError,
    PlanOption,
    QueryRecord,
    Session,
    join_sessions,
    parse_clicks,
    parse_plans,
    parse_queries,
)
from ecomode.modes import DEFAULT_MODE_FILTER


def src(*docs):
    return io.BytesIO("".join((d if isinstance(d, str) else json.dumps(d)) + "\n" for d in docs).encode())


def test_parse_query_maps_lnglat_to_latlng():
    res = parse_queries(src({"sid": "s1", "o": "116.30,39.99", "d": "116.40,39.90", "ts": 1538323200}))
    (q,) = res.records
    assert q == QueryRecord("s1", GeoPoint(39.99, 116.30), GeoPoint(39.90, 116.40), 1538323200)
    assert res.rejected == 0


def test_query_out_of_range_latitude_rejected():
    res = parse_queries(src({"sid": "s1", "o": "116.30,95.0", "d": "116.40,39.90", "ts": 1}))
    assert res.records == [] and res.rejected == 1


def test_empty_file(tmp_path):
    path = tmp_path / "q.jsonl"
    path.write_bytes(b"")
    res = parse_queries(path)
    assert res.records == [] and res.rejected == 0


def test_malformed_lines_counted():
    res = parse_queries(src("not json", {"sid": "", "o": "1,2", "d": "1,2"}, {"o": "1,2"}, [1, 2]))
    assert res.rejected == 4


def test_unreadable_source(tmp_path):
    with pytest.raises(IngestError):
        parse_queries(tmp_path / "missing.jsonl")
    with pytest.raises(IngestError):
        parse_queries(io.BytesIO(b"\xff\xfe\x00"))


def test_plan_without_price():
    res = parse_plans(src({"sid": "s1", "ts": 0, "plans": [{"mode": 5, "dist": 2100, "eta": 1800}]}))
    assert res.records[0].options == (PlanOption(5, 2100, 1800, price=None),)


def test_plan_option_with_zero_eta_dropped():
    res = parse_plans(src({"sid": "s1", "ts": 0, "plans": [{"mode": 5, "dist": 2100, "eta": 0}, {"mode": 1, "dist": 2000, "eta": 900, "price": 200}]}))
    (rec,) = res.records
    assert [o.mode_id for o in rec.options] == [1]
    assert res.dropped_options == 1


def test_plan_record_with_only_bad_options_rejected():
    res = parse_plans(src({"sid": "s1", "ts": 0, "plans": [{"mode": 5, "dist": 2100, "eta": 0}]}))
    assert res.records == [] and res.rejected == 1


def test_duplicate_mode_rejects_record():
    res = parse_plans(src({"sid": "s1", "ts": 0, "plans": [{"mode": 1, "dist": 10, "eta": 5}, {"mode": 1, "dist": 20, "eta": 6}]}))
    assert res.records == [] and res.rejected == 1


def test_click_parsing_and_range():
    res = parse_clicks(src({"sid": "s1", "click": 2, "ts": 1538323260}, {"sid": "s2", "click": 12, "ts": 1}))
    assert res.records == [ClickRecord("s1", 2, 1538323260)]
    assert res.rejected == 1


def test_duplicate_sid_last_wins():
    res = parse_clicks(src({"sid": "s1", "click": 2, "ts": 1}, {"sid": "s1", "click": 3, "ts": 2}))
    assert res.records == [ClickRecord("s1", 3, 2)]
    assert res.duplicates == 1


def _q(sid, same=False):
    o = GeoPoint(39.9, 116.3)
    return QueryRecord(sid, o, o if same else GeoPoint(39.95, 116.35), 0)


def _d(sid, *modes):
    return DisplayRecord(sid, tuple(PlanOption(m, 1000 * m, 100 * m) for m in modes), 0)


def test_join_happy_path():
    sessions, diag = join_sessions([_q("a")], [_d("a", 1, 2, 5)], [ClickRecord("a", 2, 0)], {1, 2, 5})
    (s,) = sessions
    assert s.clicked_eta_s == 200 and s.clicked_distance_m == 2000
    assert diag.total_dropped == 0


def test_join_drops_unused_modes():
    sessions, diag = join_sessions([_q("a")], [_d("a", 1, 9)], [ClickRecord("a", 9, 0)], DEFAULT_MODE_FILTER)
    assert sessions == []
    assert diag.dropped["click_not_allowed"] == 1


def test_join_click_not_displayed():
    sessions, diag = join_sessions([_q("a")], [_d("a", 1, 2)], [ClickRecord("a", 3, 0)], DEFAULT_MODE_FILTER)
    assert sessions == [] and diag.dropped["click_not_displayed"] == 1


def test_join_filters_options_and_flags_degenerate():
    sessions, diag = join_sessions([_q("a", same=True)], [_d("a", 1, 8, 11)], [ClickRecord("a", 1, 0)], DEFAULT_MODE_FILTER)
    assert [o.mode_id for o in sessions[0].options] == [1, 11]
    assert sessions[0].degenerate and diag.degenerate == 1


def test_join_missing_inputs_counted():
    clicks = [ClickRecord(s, 1, 0) for s in "abc"]
    sessions, diag = join_sessions([_q("a"), _q("b")], [_d("a", 1), _d("c", 1)], clicks, {1})
    assert [s.sid for s in sessions] == ["a"]
    assert diag.dropped["missing_query"] == 1 and diag.dropped["missing_display"] == 1


def test_session_requires_clicked_option():
    with pytest.raises(ValueError):
        Session("x", GeoPoint(0, 0), GeoPoint(1, 1), (PlanOption(1, 1, 1),), clicked_mode_id=2)


@st.composite
def logs(draw):
    n = draw(st.integers(0, 25))
    queries, displays, clicks = [], [], []
    for i in range(n):
        sid = f"s{i}"
        if draw(st.booleans()) or i % 3:
            queries.append(_q(sid))
        modes = draw(st.sets(st.integers(1, 11), min_size=1, max_size=5))
        if draw(st.integers(0, 4)):
            displays.append(_d(sid, *sorted(modes)))
        clicks.append(ClickRecord(sid, draw(st.integers(1, 11)), 0))
    allowed = draw(st.sets(st.integers(1, 11), min_size=1))
    seed = draw(st.integers(0, 2**16))
    return queries, displays, clicks, allowed, seed


@given(logs())
@settings(max_examples=150)
def test_join_properties(data):
    queries, displays, clicks, allowed, seed = data
    sessions, diag = join_sessions(queries, displays, clicks, allowed)
    # accounting identity
    assert len(sessions) + diag.total_dropped == len({c.sid for c in clicks})
    # order independence
    rng = random.Random(seed)
    shuffled = [list(x) for x in (queries, displays, clicks)]
    for x in shuffled:
        rng.shuffle(x)
    again, diag2 = join_sessions(*shuffled, allowed)
    assert again == sessions and diag2.to_json() == diag.to_json()
    # re-validation
    for s in sessions:
        rebuilt = Session(**{f: getattr(s, f) for f in Session.__dataclass_fields__})
        assert rebuilt == s
        assert all(o.mode_id in allowed for o in s.options)
        assert s.clicked_eta_s == s.option(s.clicked_mode_id).eta_s
