"""Baseline vs optimized comparisons, mode-change counts, example rows, GeoJSON."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ecomode.modes import TransportMeans
from ecomode.optimizer import Assignment, Instance

STD_DEFINITION = "population"
MEDIAN_DEFINITION = "lower-middle for even counts"


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonStats:
    total: float
    mean: float
    median: float
    stddev: float
    count: int

    @classmethod
    def of(cls, values) -> ComparisonStats:
        values = [float(v) for v in values]
        m = len(values)
        if m == 0:
            raise ReportError("empty simulation")
        total = math.fsum(values)
        mean = total / m
        ordered = sorted(values)
        median = ordered[(m - 1) // 2]
        stddev = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / m)
        return cls(total=total, mean=mean, median=median, stddev=stddev, count=m)

    def to_json(self) -> dict:
        return {"total": self.total, "mean": self.mean, "median": self.median, "stddev": self.stddev, "count": self.count}


@dataclass(frozen=True)
class Comparison:
    baseline: ComparisonStats
    optimized: ComparisonStats

    @property
    def reduction_pct(self) -> float:
        if self.baseline.total == 0:
            return 0.0
        return 100 * (self.baseline.total - self.optimized.total) / self.baseline.total

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline.to_json(),
            "optimized": self.optimized.to_json(),
            "reduction_pct": self.reduction_pct,
        }


def _picked(matrix: np.ndarray, chosen) -> np.ndarray:
    chosen = np.asarray(chosen, dtype=np.intp)
    return matrix[np.arange(len(chosen)), chosen]


def compare_emissions(instance: Instance, assignment: Assignment) -> Comparison:
    """CO2 per session in grams, clicked plan vs chosen plan."""
    return Comparison(
        baseline=ComparisonStats.of(_picked(instance.P, instance.clicked)),
        optimized=ComparisonStats.of(_picked(instance.P, assignment.chosen)),
    )


def compare_times(instance: Instance, assignment: Assignment) -> Comparison:
    return Comparison(
        baseline=ComparisonStats.of(_picked(instance.Q, instance.clicked)),
        optimized=ComparisonStats.of(_picked(instance.Q, assignment.chosen)),
    )


def _means(instance: Instance, mapping, j) -> TransportMeans:
    return mapping[instance.mode_ids[j]]


def mode_change_matrix(instance: Instance, assignment: Assignment, mapping) -> Counter:
    """Counts keyed by ``(baseline means, optimized means)``."""
    counts = Counter()
    for b, o in zip(instance.clicked.tolist(), np.asarray(assignment.chosen).tolist()):
        counts[_means(instance, mapping, b), _means(instance, mapping, o)] += 1
    return counts


def changed_count(instance: Instance, assignment: Assignment) -> int:
    return int(np.count_nonzero(np.asarray(assignment.chosen) != instance.clicked))


def matrix_to_json(counts: Counter) -> list[dict]:
    return [
        {"baseline": b.value, "optimized": o.value, "count": n}
        for (b, o), n in sorted(counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value))
    ]


@dataclass(frozen=True)
class ExampleRow:
    sid: str
    baseline_means: TransportMeans
    baseline_co2_g: float
    baseline_eta_s: float
    optimized_means: TransportMeans
    optimized_co2_g: float
    optimized_eta_s: float

    @property
    def co2_saved_g(self) -> float:
        return self.baseline_co2_g - self.optimized_co2_g

    def to_json(self) -> dict:
        return {
            "sid": self.sid,
            "baseline_mode": self.baseline_means.value,
            "baseline_co2_g": self.baseline_co2_g,
            "baseline_eta_s": self.baseline_eta_s,
            "optimized_mode": self.optimized_means.value,
            "optimized_co2_g": self.optimized_co2_g,
            "optimized_eta_s": self.optimized_eta_s,
            "co2_saved_g": self.co2_saved_g,
        }


SELECTIONS = ("top-savings", "sid")


def example_rows(instance: Instance, assignment: Assignment, mapping, k: int = 5, selection: str = "top-savings") -> list[ExampleRow]:
    """Pick ``k`` rows: by largest CO2 saving (ties by sid), or simply by sid."""
    if selection not in SELECTIONS:
        raise ReportError(f"unknown selection rule {selection!r}")
    if k <= 0:
        return []
    rows = []
    for i, (b, o) in enumerate(zip(instance.clicked.tolist(), np.asarray(assignment.chosen).tolist())):
        rows.append(
            ExampleRow(
                sid=instance.sids[i],
                baseline_means=_means(instance, mapping, b),
                baseline_co2_g=float(instance.P[i, b]),
                baseline_eta_s=float(instance.Q[i, b]),
                optimized_means=_means(instance, mapping, o),
                optimized_co2_g=float(instance.P[i, o]),
                optimized_eta_s=float(instance.Q[i, o]),
            )
        )
    if selection == "top-savings":
        rows.sort(key=lambda r: (-r.co2_saved_g, r.sid))
    else:
        rows.sort(key=lambda r: r.sid)
    return rows[:k]


def export_geojson(sessions, instance: Instance, assignment: Assignment, mapping) -> dict:
    """One origin-to-destination LineString per session, ``[lng, lat]`` order."""
    col = {mode_id: j for j, mode_id in enumerate(instance.mode_ids)}
    row = {sid: i for i, sid in enumerate(instance.sids)}
    chosen = np.asarray(assignment.chosen).tolist()
    features = []
    for s in sessions:
        i = row[s.sid]
        b, o = col[s.clicked_mode_id], chosen[i]
        props = {
            "sid": s.sid,
            "baseline": _means(instance, mapping, b).value,
            "optimized": _means(instance, mapping, o).value,
            "co2_saved_g": float(instance.P[i, b] - instance.P[i, o]),
            "time_saved_s": float(instance.Q[i, b] - instance.Q[i, o]),
            "changed": b != o,
        }
        if s.degenerate:
            props["degenerate"] = True
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [s.origin.lnglat(), s.destination.lnglat()]},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "features": features}


def _fmt2(x: float) -> str:
    return f"{x:.2f}"


def table2_csv(co2: Comparison) -> str:
    """CO2 comparison; total in tonnes, the rest in grams."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "total_t", "avg_g", "median_g", "sd_g"])
    for name, st in (("Baseline", co2.baseline), ("Optimized Mode", co2.optimized)):
        w.writerow([name, _fmt2(st.total / 1e6), _fmt2(st.mean), _fmt2(st.median), _fmt2(st.stddev)])
    return buf.getvalue()


def table3_csv(times: Comparison) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "avg_s", "median_s", "sd_s"])
    for name, st in (("Baseline", times.baseline), ("Optimized Mode", times.optimized)):
        w.writerow([name, _fmt2(st.mean), _fmt2(st.median), _fmt2(st.stddev)])
    return buf.getvalue()


def table4_csv(counts: Counter) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["baseline", "optimized", "count"])
    for entry in matrix_to_json(counts):
        w.writerow([entry["baseline"], entry["optimized"], entry["count"]])
    return buf.getvalue()


def table5_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sid", "baseline_mode", "baseline_co2_g", "baseline_eta_s", "optimized_mode", "optimized_co2_g", "optimized_eta_s"])
    for r in rows:
        w.writerow(
            [
                r.sid,
                r.baseline_means.label,
                f"{r.baseline_co2_g:.3f}",
                f"{r.baseline_eta_s:.0f}",
                r.optimized_means.label,
                f"{r.optimized_co2_g:.3f}",
                f"{r.optimized_eta_s:.0f}",
            ]
        )
    return buf.getvalue()
