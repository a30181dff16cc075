"""Fixtures shared across test modules."""

import json

import numpy as np

from ecomode.ingest import GeoPoint, PlanOption, Session
from ecomode.modes import PUBLISHED_MAPPING, TransportMeans
from ecomode.optimizer import Instance

T = TransportMeans
M = {means: PUBLISHED_MAPPING.mode_for(means) for means in T if means is not T.UNKNOWN}

# Published example rows: sid, baseline (bus) CO2 g and ETA s, optimized means, CO2 g and ETA s.
EXAMPLE_ROWS = [
    ("2848914", 3508.296, 6456, T.BUS, 3508.296, 6456),
    ("2318006", 228.162, 1710, T.CYCLING, 0.0, 846),
    ("2437983", 494.406, 2104, T.CYCLING, 0.0, 1958),
    ("2869206", 230.604, 1960, T.CYCLING, 0.0, 1090),
    ("1612703", 2425.236, 7679, T.BUS_AND_SUBWAY, 1879.315, 6975),
]

# Distances reconstructed as CO2 / rate: bus 66 g/km, bus+subway 43 g/km.
BUS_DIST = {"2848914": 53156, "2318006": 3457, "2437983": 7491, "2869206": 3494, "1612703": 36746}

# Alternatives per sid: (means, distance m, eta s). Optimized plans come first;
# the rest are decoys that are either too slow or cost more.
ALTERNATIVES = {
    "2848914": [(T.CYCLING, 52000, 14000), (T.SUBWAY, 50000, 7000), (T.DRIVING, 48000, 6500)],
    "2318006": [(T.CYCLING, 3300, 846), (T.DRIVING, 3600, 600), (T.WALKING, 3200, 2600)],
    "2437983": [(T.CYCLING, 7200, 1958), (T.TAXI, 8000, 1200)],
    "2869206": [(T.CYCLING, 3400, 1090), (T.SUBWAY, 3800, 1500), (T.WALKING, 3300, 2700)],
    "1612703": [(T.BUS_AND_SUBWAY, 43705, 6975), (T.CYCLING, 35000, 9000), (T.TAXI, 45000, 3600)],
}

BEIJING = GeoPoint(lat=39.99, lng=116.30)


def example_sessions():
    sessions = []
    for k, (sid, *_rest) in enumerate(EXAMPLE_ROWS):
        bus = PlanOption(M[T.BUS], BUS_DIST[sid], EXAMPLE_ROWS[k][2], price=200)
        alts = [PlanOption(M[means], dist, eta) for means, dist, eta in ALTERNATIVES[sid]]
        options = tuple(sorted([bus, *alts], key=lambda o: o.mode_id))
        sessions.append(
            Session(
                sid=sid,
                origin=BEIJING,
                destination=GeoPoint(lat=39.90 + 0.01 * k, lng=116.40),
                options=options,
                clicked_mode_id=M[T.BUS],
                timestamp=1538524800 + k,
            )
        )
    return sessions


def write_corpus(sessions, out_dir):
    """Write sessions back out in the three JSONL log formats."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "queries.jsonl", "w") as q, open(out_dir / "plans.jsonl", "w") as p, open(out_dir / "clicks.jsonl", "w") as c:
        for s in sessions:
            q.write(json.dumps({"sid": s.sid, "o": f"{s.origin.lng},{s.origin.lat}", "d": f"{s.destination.lng},{s.destination.lat}", "ts": s.timestamp}) + "\n")
            plans = []
            for o in s.options:
                plan = {"mode": o.mode_id, "dist": o.distance_m, "eta": o.eta_s}
                if o.price is not None:
                    plan["price"] = o.price
                plans.append(plan)
            p.write(json.dumps({"sid": s.sid, "ts": s.timestamp, "plans": plans}) + "\n")
            c.write(json.dumps({"sid": s.sid, "click": s.clicked_mode_id, "ts": s.timestamp + 10}) + "\n")
    return out_dir


def random_instance(rng, m=None, n=None, grid=True):
    """Random instance with a mix of dense, sparse and clicked-only rows.

    ``grid`` draws small integers so that objective ties are common.
    """
    m = int(rng.integers(1, 9)) if m is None else m
    n = int(rng.integers(1, 7)) if n is None else n
    density = rng.choice([0.2, 0.5, 0.8, 1.0])
    offered = rng.random((m, n)) < density
    clicked = rng.integers(0, n, m)
    offered[np.arange(m), clicked] = True
    if grid:
        P = rng.integers(0, 4, (m, n)).astype(float) * rng.choice([1.0, 33.0, 66.0])
        Q = rng.integers(1, 5, (m, n)).astype(float) * 100
    else:
        P = rng.uniform(0, 5000, (m, n))
        Q = rng.integers(60, 10000, (m, n)).astype(float)
    # rows where the clicked plan is the quickest (only it is feasible unless ties)
    fast = rng.random(m) < 0.2
    Q[fast, clicked[fast]] = 0.5
    P[~offered] = np.nan
    Q[~offered] = np.nan
    alpha, beta = rng.choice([(1.0, 1.0), (0.5, 2.0), (2.0, 0.25), (1.0, 0.0), (0.0, 1.0)])
    return Instance(
        sids=tuple(f"r{i}" for i in range(m)),
        mode_ids=tuple(range(1, n + 1)),
        P=P,
        Q=Q,
        offered=offered,
        qprime=Q[np.arange(m), clicked].copy(),
        clicked=clicked.astype(np.intp),
        alpha=float(alpha),
        beta=float(beta),
    )
