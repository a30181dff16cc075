"""Infer which real transport means each opaque mode ID stands for.

Unpriced modes are told apart by mean speed (walking < cycling < driving).
Priced modes are matched against fare hypotheses built from a city fare
schedule; the two flat-fare modes are split by how often they are displayed,
the more frequent one being plain bus.
"""

from __future__ import annotations

import bisect
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import linear_sum_assignment

from ecomode.modes import UNKNOWN_MODE_IDS, ModeMapping, TransportMeans

PRICE_PRESENCE_THRESHOLD = 0.5
MIN_PRICE_SAMPLES = 5

T = TransportMeans


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class FareSchedule:
    """Fares in currency minor units.

    ``subway_steps`` holds ``(km, fare)`` pairs: trips up to ``km`` cost
    ``fare``; trips beyond the last threshold pay the last fare.
    """

    bus_flat: int
    subway_steps: tuple[tuple[float, int], ...]
    taxi_base: int
    taxi_per_km: int

    def __post_init__(self):
        steps = tuple((float(km), int(fare)) for km, fare in self.subway_steps)
        object.__setattr__(self, "subway_steps", steps)
        if not steps:
            raise ValueError("subway_steps must not be empty")
        kms = [km for km, _ in steps]
        if any(b <= a for a, b in zip(kms, kms[1:])):
            raise ValueError(f"subway thresholds must be strictly increasing: {kms}")
        if min([self.bus_flat, self.taxi_base, self.taxi_per_km] + [f for _, f in steps]) < 0:
            raise ValueError("fares must be non-negative")

    def bus(self, distance_m):
        return np.full(np.shape(distance_m), float(self.bus_flat))

    def subway(self, distance_m):
        km = np.asarray(distance_m, dtype=float) / 1000
        thresholds = np.array([k for k, _ in self.subway_steps])
        fares = np.array([f for _, f in self.subway_steps], dtype=float)
        idx = np.minimum(np.searchsorted(thresholds, km, side="left"), len(fares) - 1)
        return fares[idx]

    def taxi(self, distance_m):
        return self.taxi_base + self.taxi_per_km * np.asarray(distance_m, dtype=float) / 1000

    def bus_and_subway(self, distance_m):
        return (self.bus(distance_m) + self.subway(distance_m)) / 2

    def bus_and_share_cycle(self, distance_m):
        # share cycle adds nothing measurable on top of the bus fare
        return (self.bus(distance_m) + self.bus(distance_m)) / 2

    def fare(self, means: TransportMeans, distance_m):
        return {
            T.BUS: self.bus,
            T.SUBWAY: self.subway,
            T.TAXI: self.taxi,
            T.BUS_AND_SUBWAY: self.bus_and_subway,
            T.BUS_AND_SHARE_CYCLE: self.bus_and_share_cycle,
        }[means](distance_m)

    def fare_at(self, means: TransportMeans, distance_m: float) -> float:
        """Scalar twin of :meth:`fare` without numpy overhead."""
        bus = float(self.bus_flat)
        if means is T.BUS or means is T.BUS_AND_SHARE_CYCLE:
            return bus
        if means is T.TAXI:
            return self.taxi_base + self.taxi_per_km * distance_m / 1000
        km = distance_m / 1000
        idx = min(bisect.bisect_left([k for k, _ in self.subway_steps], km), len(self.subway_steps) - 1)
        subway = float(self.subway_steps[idx][1])
        if means is T.SUBWAY:
            return subway
        if means is T.BUS_AND_SUBWAY:
            return (bus + subway) / 2
        raise KeyError(means)

    def to_json(self) -> dict:
        return {
            "bus_flat": self.bus_flat,
            "subway_steps": [[km, fare] for km, fare in self.subway_steps],
            "taxi_base": self.taxi_base,
            "taxi_per_km": self.taxi_per_km,
        }

    @classmethod
    def from_json(cls, doc) -> FareSchedule:
        return cls(
            bus_flat=int(doc["bus_flat"]),
            subway_steps=tuple(tuple(step) for step in doc["subway_steps"]),
            taxi_base=int(doc["taxi_base"]),
            taxi_per_km=int(doc["taxi_per_km"]),
        )

    @classmethod
    def load(cls, path=None) -> FareSchedule:
        if path is None:
            text = resources.files("ecomode").joinpath("data/fares.json").read_text(encoding="utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return cls.from_json(json.loads(text))


PRICED_MEANS = (T.BUS, T.SUBWAY, T.TAXI, T.BUS_AND_SUBWAY, T.BUS_AND_SHARE_CYCLE)
UNPRICED_MEANS = (T.WALKING, T.CYCLING, T.DRIVING)

# Bus and bus+share-cycle share one fare hypothesis.
_HYPOTHESES = ("flat", "subway", "taxi", "bus_subway_mid")
_SLOTS = (("flat", T.BUS), ("flat", T.BUS_AND_SHARE_CYCLE), ("subway", T.SUBWAY), ("taxi", T.TAXI), ("bus_subway_mid", T.BUS_AND_SUBWAY))


@dataclass
class ModeStats:
    mode_id: int
    display_count: int = 0
    mean_speed_mps: float = 0.0
    priced_count: int = 0
    price_samples: list[tuple[float, int]] = field(default_factory=list)

    @property
    def has_price(self) -> bool:
        return self.display_count > 0 and self.priced_count >= PRICE_PRESENCE_THRESHOLD * self.display_count


def aggregate_mode_stats(displays) -> dict[int, ModeStats]:
    displays = list(displays)
    if not displays:
        raise InferenceError("no display records to aggregate")
    speeds = defaultdict(list)
    stats: dict[int, ModeStats] = {}
    for record in displays:
        for o in record.options:
            st = stats.setdefault(o.mode_id, ModeStats(o.mode_id))
            st.display_count += 1
            speeds[o.mode_id].append(o.distance_m / o.eta_s)
            if o.price is not None:
                st.priced_count += 1
                st.price_samples.append((o.distance_m, o.price))
    for mode_id, st in stats.items():
        # fsum keeps the mean independent of record order
        st.mean_speed_mps = math.fsum(speeds[mode_id]) / st.display_count
    return dict(sorted(stats.items()))


def classify_unpriced(stats) -> dict[int, TransportMeans]:
    stats = list(stats.values()) if isinstance(stats, dict) else list(stats)
    if len(stats) != 3:
        raise InferenceError(f"expected 3 unpriced modes, got {len(stats)}: {sorted(s.mode_id for s in stats)}")
    ordered = sorted(stats, key=lambda s: s.mean_speed_mps)
    if len({s.mean_speed_mps for s in ordered}) != 3:
        raise InferenceError(f"unpriced modes have equal mean speeds: {[(s.mode_id, s.mean_speed_mps) for s in ordered]}")
    return {s.mode_id: means for s, means in zip(ordered, UNPRICED_MEANS)}


def fare_residuals(st: ModeStats, fares: FareSchedule) -> dict[str, float]:
    """Median absolute deviation of a mode's prices from each fare hypothesis."""
    dist = np.array([d for d, _ in st.price_samples], dtype=float)
    price = np.array([p for _, p in st.price_samples], dtype=float)
    predicted = {
        "flat": fares.bus(dist),
        "subway": fares.subway(dist),
        "taxi": fares.taxi(dist),
        "bus_subway_mid": fares.bus_and_subway(dist),
    }
    return {h: float(np.median(np.abs(price - predicted[h]))) for h in _HYPOTHESES}


def classify_priced(stats, fares: FareSchedule) -> dict[int, TransportMeans]:
    """Match priced modes to fare hypotheses by minimum total median residual."""
    stats = sorted(stats.values() if isinstance(stats, dict) else stats, key=lambda s: s.mode_id)
    thin = [s.mode_id for s in stats if len(s.price_samples) < MIN_PRICE_SAMPLES]
    if thin:
        raise InferenceError(f"modes with fewer than {MIN_PRICE_SAMPLES} price samples: {thin}")
    if not stats:
        raise InferenceError(f"no priced modes; unassigned means: {[m.value for m in PRICED_MEANS]}")
    residuals = {s.mode_id: fare_residuals(s, fares) for s in stats}
    cost = np.array([[residuals[s.mode_id][h] for h, _ in _SLOTS] for s in stats])
    rows, cols = linear_sum_assignment(cost)

    by_hypothesis = defaultdict(list)
    for r, c in zip(rows, cols):
        by_hypothesis[_SLOTS[c][0]].append(stats[r])
    unclassified = sorted(set(s.mode_id for s in stats) - {stats[r].mode_id for r in rows})
    if unclassified:
        raise InferenceError(f"more priced modes than fare hypotheses; unclassified modes: {unclassified}")

    result = {}
    flat = sorted(by_hypothesis.pop("flat", []), key=lambda s: (-s.display_count, s.mode_id))
    if len(flat) == 2 and flat[0].display_count == flat[1].display_count:
        raise InferenceError(
            f"modes {flat[0].mode_id} and {flat[1].mode_id} both fit the flat bus fare with equal display counts"
        )
    for st, means in zip(flat, (T.BUS, T.BUS_AND_SHARE_CYCLE)):
        result[st.mode_id] = means
    for hypothesis, members in by_hypothesis.items():
        (st,) = members
        result[st.mode_id] = next(means for h, means in _SLOTS if h == hypothesis)
    missing = [m.value for m in PRICED_MEANS if m not in result.values()]
    if missing:
        raise InferenceError(f"unassigned means: {missing}")
    return result


def infer_mapping(displays, fares: FareSchedule, unknown_modes=UNKNOWN_MODE_IDS) -> ModeMapping:
    stats = aggregate_mode_stats(displays)
    candidates = {k: v for k, v in stats.items() if k not in unknown_modes}
    unpriced = {k: v for k, v in candidates.items() if not v.has_price}
    priced = {k: v for k, v in candidates.items() if v.has_price}
    problems = []
    mapping = {k: T.UNKNOWN for k in unknown_modes}
    for step, args in ((classify_unpriced, (unpriced,)), (classify_priced, (priced, fares))):
        try:
            mapping.update(step(*args))
        except InferenceError as exc:
            problems.append(str(exc))
    if problems:
        raise InferenceError("; ".join(problems))
    unseen = sorted(set(range(1, 12)) - set(mapping))
    if unseen:
        raise InferenceError(f"modes never displayed: {unseen}")
    return ModeMapping(mapping)
