"""End-to-end simulation run and its output files."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from ecomode import impact, ingest, kernels, report
from ecomode.emissions import EmissionTable
from ecomode.inference import FareSchedule, infer_mapping
from ecomode.modes import PUBLISHED_MAPPING, DEFAULT_MODE_FILTER, ModeMapping
from ecomode.optimizer import build_instance, solve, verify_assignment

log = logging.getLogger(__name__)

INPUT_NAMES = ("queries", "plans", "clicks")


class ConfigError(ValueError):
    """Bad or missing configuration (exit status 2)."""


class DomainError(RuntimeError):
    """The data cannot be simulated as asked (exit status 1)."""


@dataclass
class RunConfig:
    data_dir: Optional[str] = None
    queries: Optional[str] = None
    plans: Optional[str] = None
    clicks: Optional[str] = None
    mapping: str = "published"
    fares: Optional[str] = None
    emissions: Optional[str] = None
    alpha: float = 1.0
    beta: float = 1.0
    modes: list = field(default_factory=lambda: sorted(DEFAULT_MODE_FILTER))
    out_dir: str = "out"
    examples_k: int = 5
    selection: str = "top-savings"
    days: Optional[int] = None
    denominator: str = "sessions"
    national_mt: float = impact.CHINA_TRANSPORT_CO2_MT
    met: float = impact.DEFAULT_MET
    recommendation: float = impact.WHO_RECOMMENDATION_METH
    full_benefit: float = impact.FULL_BENEFIT_PCT

    def input_path(self, name: str) -> Path:
        explicit = getattr(self, name)
        if explicit:
            return Path(explicit)
        if not self.data_dir:
            raise ConfigError(f"no path for {name}: pass --data-dir or --{name}")
        return Path(self.data_dir) / f"{name}.jsonl"


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _load_table(cfg: RunConfig) -> EmissionTable:
    try:
        return EmissionTable.load(cfg.emissions)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load emission table {cfg.emissions}: {exc}") from exc


def _load_fares(path) -> FareSchedule:
    try:
        return FareSchedule.load(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load fare schedule {path}: {exc}") from exc


def _resolve_mapping(cfg: RunConfig, displays) -> ModeMapping:
    if cfg.mapping == "published":
        return PUBLISHED_MAPPING
    if cfg.mapping == "infer":
        from ecomode.inference import InferenceError

        try:
            return infer_mapping(displays, _load_fares(cfg.fares))
        except InferenceError as exc:
            raise DomainError(f"mode inference failed: {exc}") from exc
    try:
        return ModeMapping.load(cfg.mapping)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load mapping {cfg.mapping}: {exc}") from exc


def _distinct_days(sessions) -> int:
    dates = {dt.datetime.fromtimestamp(s.timestamp, tz=dt.timezone.utc).date() for s in sessions}
    return max(1, len(dates))


def _parse_inputs(cfg: RunConfig):
    parsed = {}
    for name, fn in zip(INPUT_NAMES, (ingest.parse_queries, ingest.parse_plans, ingest.parse_clicks)):
        path = cfg.input_path(name)
        try:
            parsed[name] = fn(path)
        except ingest.IngestError as exc:
            raise ConfigError(str(exc)) from exc
        log.info("parsed %s: %d records, %d rejected", name, len(parsed[name]), parsed[name].rejected)
    return parsed


def run_simulation(cfg: RunConfig, workers: Optional[int] = None) -> dict:
    """Run ingest, solve and report; write every output file; return report.json content."""
    modes = sorted({int(m) for m in cfg.modes})
    if not modes or not set(modes) <= set(range(1, 12)):
        raise ConfigError(f"--modes must be a non-empty subset of 1..11, got {cfg.modes}")
    if cfg.alpha < 0 or cfg.beta < 0 or (cfg.alpha == 0 and cfg.beta == 0):
        raise ConfigError("alpha and beta must be non-negative and not both zero")
    if cfg.selection not in report.SELECTIONS:
        raise ConfigError(f"--selection must be one of {report.SELECTIONS}")
    if cfg.denominator not in impact.DENOMINATORS:
        raise ConfigError(f"--denominator must be one of {impact.DENOMINATORS}")
    if cfg.examples_k < 0:
        raise ConfigError("--examples-k must be >= 0")

    table = _load_table(cfg)
    parsed = _parse_inputs(cfg)
    mapping = _resolve_mapping(cfg, parsed["plans"].records)
    log.info("mapping: %s", mapping)

    sessions, diag = ingest.join_sessions(parsed["queries"], parsed["plans"], parsed["clicks"], modes)
    log.info("joined %d sessions (%d dropped)", len(sessions), diag.total_dropped)
    if not sessions:
        raise DomainError("empty simulation: no session survived the join")

    instance = build_instance(sessions, mapping, table, cfg.alpha, cfg.beta)
    assignment = solve(instance, workers=workers if workers is not None else kernels.worker_count())
    check = verify_assignment(instance, assignment)
    if not check.ok:
        raise DomainError(f"solver produced an infeasible assignment: {check.violations[:5]}")
    baseline_objective = instance.objective(instance.clicked)
    log.info("solved %d sessions: objective %.3f -> %.3f", instance.m, baseline_objective, assignment.objective)

    co2 = report.compare_emissions(instance, assignment)
    times = report.compare_times(instance, assignment)
    matrix = report.mode_change_matrix(instance, assignment, mapping)
    changed = report.changed_count(instance, assignment)
    examples = report.example_rows(instance, assignment, mapping, cfg.examples_k, cfg.selection)
    geo = report.export_geojson(sessions, instance, assignment, mapping)

    days = cfg.days if cfg.days is not None else _distinct_days(sessions)
    uids = [s.uid for s in sessions]
    try:
        cycling_min = impact.mean_cycling_duration(instance, assignment, mapping, days, cfg.denominator, uids)
    except impact.ImpactError as exc:
        raise DomainError(str(exc)) from exc

    resolved = asdict(cfg)
    for key in ("data_dir", "queries", "plans", "clicks", "out_dir"):
        resolved.pop(key)
    resolved.update(modes=modes, days=days, mapping=mapping.to_json(), emissions=table.to_json())
    if cfg.mapping == "infer":
        resolved["fares"] = _load_fares(cfg.fares).to_json()
    else:
        resolved.pop("fares")
    inputs = {name: sha256_file(cfg.input_path(name)) for name in INPUT_NAMES}
    digest = hashlib.sha256(canonical_json({"config": resolved, "inputs": inputs}).encode()).hexdigest()

    reduction = co2.reduction_pct / 100
    impact_doc = {
        "config_digest": digest,
        "inputs": {
            "reduction_fraction": reduction,
            "national_transport_co2_mt": cfg.national_mt,
            "cycling_min_per_day": cycling_min,
            "met_factor": cfg.met,
            "recommendation_meth": cfg.recommendation,
            "full_benefit_pct": cfg.full_benefit,
            "cycling_denominator": cfg.denominator,
            "days": days,
        },
    }
    try:
        impact_doc["outputs"] = impact.estimate(
            reduction, cycling_min, cfg.national_mt, cfg.met, cfg.recommendation, cfg.full_benefit
        ).to_json()
    except impact.ImpactError as exc:
        impact_doc["outputs"] = None
        impact_doc["error"] = str(exc)

    doc = {
        "metadata": {
            "config": resolved,
            "config_digest": digest,
            "input_digests": inputs,
            "stddev": report.STD_DEFINITION,
            "median": report.MEDIAN_DEFINITION,
            "units": {"co2": "g", "time": "s", "table2_total": "t"},
            "tie_break": "objective, then lower CO2, then clicked plan, then lower mode id",
        },
        "parse": {
            name: {"records": len(p), "rejected": p.rejected, "duplicates": p.duplicates}
            for name, p in parsed.items()
        },
        "join": diag.to_json(),
        "sessions": instance.m,
        "objective": {"baseline": baseline_objective, "optimized": assignment.objective},
        "co2": co2.to_json(),
        "time": times.to_json(),
        "mode_changes": report.matrix_to_json(matrix),
        "changed_sessions": changed,
        "examples": [r.to_json() for r in examples],
        "cycling_min_per_day": cycling_min,
        "impact": impact_doc.get("outputs"),
    }

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "report.json", json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    header = f"# config_digest: {digest}\n"
    _write(out / "table2.csv", header + report.table2_csv(co2))
    _write(out / "table3.csv", header + report.table3_csv(times))
    _write(out / "table4.csv", header + report.table4_csv(matrix))
    _write(out / "table5.csv", header + report.table5_csv(examples))
    geo["config_digest"] = digest
    _write(out / "changes.geojson", json.dumps(geo, sort_keys=True, allow_nan=False) + "\n")
    _write(out / "impact.json", json.dumps(impact_doc, indent=2, sort_keys=True, allow_nan=False) + "\n")
    lines = []
    for i, s in enumerate(sessions):
        b, o = int(instance.clicked[i]), int(assignment.chosen[i])
        lines.append(
            canonical_json(
                {
                    "sid": s.sid,
                    "baseline_mode": mapping[instance.mode_ids[b]].value,
                    "optimized_mode": mapping[instance.mode_ids[o]].value,
                    "co2_g": float(instance.P[i, o]),
                    "eta_s": int(instance.Q[i, o]),
                    "config_digest": digest,
                }
            )
        )
    _write(out / "assignment.jsonl", "".join(line + "\n" for line in lines))
    log.info("wrote outputs to %s", out)
    return doc


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
