"""Seeded synthetic query/plan/click corpora with known ground truth."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from ecomode.inference import PRICED_MEANS, FareSchedule
from ecomode.modes import PUBLISHED_MAPPING, ModeMapping, TransportMeans

T = TransportMeans

CLICK_MODELS = ("fastest", "cheapest", "uniform", "sticky-bus")
EARTH_RADIUS_M = 6_371_008.8
START_TS = 1538352000  # 2018-10-01T00:00:00Z

DEFAULT_SPEED_BANDS = {
    T.WALKING: (1.0, 1.5),
    T.CYCLING: (3.0, 4.5),
    T.DRIVING: (7.0, 12.0),
    T.BUS: (3.5, 6.5),
    T.SUBWAY: (6.0, 10.0),
    T.TAXI: (7.0, 12.0),
    T.BUS_AND_SUBWAY: (5.0, 8.5),
    T.BUS_AND_SHARE_CYCLE: (3.0, 5.5),
    T.UNKNOWN: (4.0, 9.0),
}
DEFAULT_DETOUR = {
    T.WALKING: 1.2,
    T.CYCLING: 1.25,
    T.DRIVING: 1.35,
    T.BUS: 1.4,
    T.SUBWAY: 1.3,
    T.TAXI: 1.35,
    T.BUS_AND_SUBWAY: 1.35,
    T.BUS_AND_SHARE_CYCLE: 1.3,
    T.UNKNOWN: 1.3,
}
DEFAULT_DISPLAY_PROB = {
    T.WALKING: 0.6,
    T.CYCLING: 0.7,
    T.DRIVING: 0.7,
    T.BUS: 0.9,
    T.SUBWAY: 0.8,
    T.TAXI: 0.6,
    T.BUS_AND_SUBWAY: 0.5,
    T.BUS_AND_SHARE_CYCLE: 0.3,
    T.UNKNOWN: 0.1,
}
# straight-line km beyond which a means is not offered
DEFAULT_MAX_KM = {T.WALKING: 6.0, T.CYCLING: 20.0, T.BUS_AND_SHARE_CYCLE: 30.0}
BEIJING_BOX = (39.75, 40.10, 116.15, 116.65)


class SynthConfigError(ValueError):
    pass


@dataclass
class SynthConfig:
    session_count: int = 1000
    seed: int = 0
    mapping: ModeMapping = PUBLISHED_MAPPING
    fares: FareSchedule = field(default_factory=FareSchedule.load)
    speed_bands: dict = field(default_factory=lambda: dict(DEFAULT_SPEED_BANDS))
    detour: dict = field(default_factory=lambda: dict(DEFAULT_DETOUR))
    display_prob: dict = field(default_factory=lambda: dict(DEFAULT_DISPLAY_PROB))
    max_km: dict = field(default_factory=lambda: dict(DEFAULT_MAX_KM))
    od_box: tuple = BEIJING_BOX
    median_trip_km: float = 5.0
    price_noise: float = 0.10
    click_model: str = "uniform"
    days: int = 61

    def validate(self) -> None:
        if isinstance(self.session_count, bool) or not isinstance(self.session_count, int) or self.session_count < 0:
            raise SynthConfigError(f"session_count must be a non-negative integer, got {self.session_count!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise SynthConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.click_model not in CLICK_MODELS:
            raise SynthConfigError(f"unknown click model {self.click_model!r}; choose from {CLICK_MODELS}")
        if not 0 <= self.price_noise < 1:
            raise SynthConfigError(f"price_noise must be in [0, 1), got {self.price_noise}")
        if self.days < 1:
            raise SynthConfigError("days must be >= 1")
        if self.median_trip_km <= 0:
            raise SynthConfigError("median_trip_km must be positive")
        lat0, lat1, lng0, lng1 = self.od_box
        if not (-90 <= lat0 < lat1 <= 90 and -180 <= lng0 < lng1 <= 180):
            raise SynthConfigError(f"bad OD box {self.od_box}")
        for means in T:
            lo, hi = self.speed_bands[means]
            if not 0 < lo < hi:
                raise SynthConfigError(f"speed band for {means.value} must satisfy 0 < min < max, got {(lo, hi)}")
            if self.detour[means] < 1:
                raise SynthConfigError(f"detour factor for {means.value} must be >= 1")
            if not 0 <= self.display_prob[means] <= 1:
                raise SynthConfigError(f"display probability for {means.value} must be in [0, 1]")
        unpriced = sorted((self.speed_bands[m] for m in (T.WALKING, T.CYCLING, T.DRIVING)))
        if any(a[1] > b[0] for a, b in zip(unpriced, unpriced[1:])):
            raise SynthConfigError(f"speed bands of walking, cycling and driving overlap: {unpriced}")

    def to_json(self) -> dict:
        return {
            "session_count": self.session_count,
            "seed": self.seed,
            "mapping": self.mapping.to_json(),
            "fares": self.fares.to_json(),
            "speed_bands": {m.value: list(v) for m, v in self.speed_bands.items()},
            "detour": {m.value: v for m, v in self.detour.items()},
            "display_prob": {m.value: v for m, v in self.display_prob.items()},
            "max_km": {m.value: v for m, v in self.max_km.items()},
            "od_box": list(self.od_box),
            "median_trip_km": self.median_trip_km,
            "price_noise": self.price_noise,
            "click_model": self.click_model,
            "days": self.days,
        }


def haversine_m(lat1, lng1, lat2, lng2) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lng2 - lng1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


def _eta_in_band(distance: int, lo: float, hi: float, speed: float) -> int:
    eta = max(1, round(distance / speed))
    while distance / eta > hi:
        eta += 1
    while eta > 1 and distance / eta < lo and distance / (eta - 1) <= hi:
        eta -= 1
    return eta


def _sample_od(rng: random.Random, cfg: SynthConfig):
    lat0, lat1, lng0, lng1 = cfg.od_box
    olat, olng = rng.uniform(lat0, lat1), rng.uniform(lng0, lng1)
    for _ in range(20):
        km = max(0.3, rng.lognormvariate(math.log(cfg.median_trip_km), 0.7))
        bearing = rng.uniform(0, 2 * math.pi)
        dlat = km * 1000 * math.cos(bearing) / 111_320
        dlng = km * 1000 * math.sin(bearing) / (111_320 * math.cos(math.radians(olat)))
        dlat_, dlng_ = olat + dlat, olng + dlng
        if lat0 <= dlat_ <= lat1 and lng0 <= dlng_ <= lng1:
            return (round(olat, 6), round(olng, 6)), (round(dlat_, 6), round(dlng_, 6))
    return (round(olat, 6), round(olng, 6)), (round(min(max(olat + 0.01, lat0), lat1), 6), round(olng, 6))


def _price(rng, cfg: SynthConfig, means: TransportMeans, distance: int):
    if means in PRICED_MEANS:
        base = cfg.fares.fare_at(means, distance)
    elif means is T.UNKNOWN:
        base = cfg.fares.fare_at(T.TAXI, distance) * 1.5
    else:
        return None
    return round(base * rng.uniform(1 - cfg.price_noise, 1 + cfg.price_noise))


def _click(rng, cfg: SynthConfig, plans):
    if cfg.click_model == "fastest":
        return min(plans, key=lambda p: (p["eta"], p["mode"]))["mode"]
    if cfg.click_model == "cheapest":
        return min(plans, key=lambda p: (p.get("price", 0), p["eta"], p["mode"]))["mode"]
    if cfg.click_model == "sticky-bus":
        bus = cfg.mapping.mode_for(T.BUS)
        if any(p["mode"] == bus for p in plans):
            return bus
    return rng.choice(plans)["mode"]


def generate_records(cfg: SynthConfig):
    """Yield ``(query, plan, click)`` dicts per session in sid order."""
    cfg.validate()
    rng = random.Random(int(cfg.seed))
    mode_ids = sorted(cfg.mapping)
    driving = cfg.mapping.mode_for(T.DRIVING)
    for i in range(cfg.session_count):
        sid = f"s{i:07d}"
        origin, dest = _sample_od(rng, cfg)
        straight = haversine_m(*origin, *dest)
        ts = START_TS + rng.randrange(cfg.days * 86400)
        plans = []
        for mode_id in mode_ids:
            means = cfg.mapping[mode_id]
            if rng.random() >= cfg.display_prob[means]:
                continue
            if straight / 1000 > cfg.max_km.get(means, math.inf):
                continue
            plans.append(_plan(rng, cfg, mode_id, means, straight))
        if not plans:
            plans.append(_plan(rng, cfg, driving, T.DRIVING, straight))
        click = _click(rng, cfg, plans)
        yield (
            {"sid": sid, "o": f"{origin[1]},{origin[0]}", "d": f"{dest[1]},{dest[0]}", "ts": ts},
            {"sid": sid, "ts": ts + 1, "plans": plans},
            {"sid": sid, "click": click, "ts": ts + 5 + rng.randrange(120)},
        )


def _plan(rng, cfg, mode_id, means, straight):
    distance = max(1, round(straight * cfg.detour[means]))
    lo, hi = cfg.speed_bands[means]
    eta = _eta_in_band(distance, lo, hi, rng.uniform(lo, hi))
    plan = {"mode": mode_id, "dist": distance, "eta": eta}
    price = _price(rng, cfg, means, distance)
    if price is not None:
        plan["price"] = price
    return plan


def _dump(doc) -> str:
    return json.dumps(doc, separators=(",", ":"), sort_keys=False)


def generate(cfg: SynthConfig, out_dir) -> dict[str, Path]:
    """Write queries/plans/clicks JSONL plus ``ground_truth.json`` into ``out_dir``."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.jsonl" for name in ("queries", "plans", "clicks")}
    handles = {name: open(p, "w", encoding="utf-8", newline="\n") for name, p in paths.items()}
    try:
        for q, p, c in generate_records(cfg):
            handles["queries"].write(_dump(q) + "\n")
            handles["plans"].write(_dump(p) + "\n")
            handles["clicks"].write(_dump(c) + "\n")
    finally:
        for fh in handles.values():
            fh.close()
    truth = out / "ground_truth.json"
    truth.write_text(
        json.dumps({"mapping": cfg.mapping.to_json(), "config": cfg.to_json()}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    paths["ground_truth"] = truth
    return paths

