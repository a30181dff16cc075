import pytest
from hypothesis import given, strategies as st

from ecomode.emissions import DEFAULT_TABLE, EmissionError, EmissionTable, plan_emission_g, rate_for
from ecomode.modes import TransportMeans as T


@pytest.mark.parametrize(
    "means, rate",
    [
        (T.BUS_AND_SHARE_CYCLE, 33.0),
        (T.BUS_AND_SUBWAY, 43.0),
        (T.WALKING, 0.0),
        (T.CYCLING, 0.0),
        (T.BUS, 66.0),
        (T.SUBWAY, 20.0),
        (T.TAXI, 145.0),
        (T.DRIVING, 145.0),
    ],
)
def test_rate_for(means, rate):
    assert rate_for(means) == rate


def test_unknown_means_rejected():
    with pytest.raises(EmissionError, match="unmapped"):
        rate_for(T.UNKNOWN)


def test_table5_products():
    assert plan_emission_g(3457, T.BUS) == pytest.approx(228.162, abs=1e-9)
    assert plan_emission_g(43705, T.BUS_AND_SUBWAY) == pytest.approx(1879.315, abs=1e-9)
    assert plan_emission_g(12345, T.CYCLING) == 0


def test_negative_distance():
    with pytest.raises(EmissionError):
        plan_emission_g(-1, T.BUS)


def test_table_roundtrip_and_validation(tmp_path):
    path = tmp_path / "e.json"
    path.write_text('{"passenger_car": 150, "bus": 60, "railway": 18, "cycling": 0, "walking": 0}')
    table = EmissionTable.load(path)
    assert rate_for(T.BUS_AND_SUBWAY, table) == 39.0
    assert EmissionTable.load() == DEFAULT_TABLE
    with pytest.raises(EmissionError):
        EmissionTable.from_json({"bus": 1})
    with pytest.raises(EmissionError):
        EmissionTable(bus=-1)


def test_share_cycle_is_half_bus():
    assert rate_for(T.BUS_AND_SHARE_CYCLE) == rate_for(T.BUS) / 2


means_st = st.sampled_from([m for m in T if m is not T.UNKNOWN])
dist_st = st.floats(min_value=0, max_value=1e6, allow_nan=False)


@given(dist_st, dist_st, means_st)
def test_linearity(a, b, means):
    lhs = plan_emission_g(a + b, means)
    rhs = plan_emission_g(a, means) + plan_emission_g(b, means)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


@given(dist_st, dist_st, st.sampled_from([T.BUS, T.SUBWAY, T.TAXI, T.BUS_AND_SUBWAY]))
def test_monotone_in_distance(a, b, means):
    lo, hi = sorted((a, b))
    assert plan_emission_g(lo, means) <= plan_emission_g(hi, means)
