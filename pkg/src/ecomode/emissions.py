"""Per-plan CO2 emissions from per-person-km rates."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ecomode.modes import TransportMeans

BASE_KEYS = ("passenger_car", "bus", "railway", "cycling", "walking")

# Combined means are the plain average of their two components.
_COMPONENTS = {
    TransportMeans.BUS: ("bus",),
    TransportMeans.SUBWAY: ("railway",),
    TransportMeans.DRIVING: ("passenger_car",),
    TransportMeans.TAXI: ("passenger_car",),
    TransportMeans.WALKING: ("walking",),
    TransportMeans.CYCLING: ("cycling",),
    TransportMeans.BUS_AND_SUBWAY: ("bus", "railway"),
    TransportMeans.BUS_AND_SHARE_CYCLE: ("bus", "cycling"),
}


class EmissionError(ValueError):
    pass


@dataclass(frozen=True)
class EmissionTable:
    """Grams of CO2 per person per km for the five base categories."""

    passenger_car: float = 145.0
    bus: float = 66.0
    railway: float = 20.0
    cycling: float = 0.0
    walking: float = 0.0

    def __post_init__(self):
        for key in BASE_KEYS:
            value = getattr(self, key)
            if value < 0:
                raise EmissionError(f"negative emission rate for {key}: {value}")

    def to_json(self) -> dict[str, float]:
        return {key: getattr(self, key) for key in BASE_KEYS}

    @classmethod
    def from_json(cls, doc) -> EmissionTable:
        unknown = sorted(set(doc) - set(BASE_KEYS))
        if unknown:
            raise EmissionError(f"unknown emission keys: {unknown}")
        missing = sorted(set(BASE_KEYS) - set(doc))
        if missing:
            raise EmissionError(f"missing emission keys: {missing}")
        return cls(**{k: float(doc[k]) for k in BASE_KEYS})

    @classmethod
    def load(cls, path=None) -> EmissionTable:
        if path is None:
            text = resources.files("ecomode").joinpath("data/emissions.json").read_text(encoding="utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return cls.from_json(json.loads(text))


DEFAULT_TABLE = EmissionTable()


def rate_for(means: TransportMeans, table: EmissionTable = DEFAULT_TABLE) -> float:
    """Rate in g/person/km; taxi and driving use the passenger-car rate."""
    try:
        keys = _COMPONENTS[TransportMeans(means)]
    except KeyError:
        raise EmissionError(f"unmapped means: {means}") from None
    if len(keys) == 1:
        return float(getattr(table, keys[0]))
    a, b = (getattr(table, k) for k in keys)
    return (a + b) / 2


def plan_emission_g(distance_m: float, means: TransportMeans, table: EmissionTable = DEFAULT_TABLE) -> float:
    if distance_m < 0:
        raise EmissionError(f"negative distance: {distance_m}")
    # multiply first: integer metres times integer rates stay exact until the final division
    return distance_m * rate_for(means, table) / 1000
