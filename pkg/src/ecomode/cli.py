"""Command line entry point: ``ecomode synth | infer | simulate | impact``.

Exit status is 0 on success, 1 when the data cannot be processed as asked,
2 on usage or configuration errors. ``--config file.json`` supplies values
for any flag; flags given explicitly on the command line still win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ecomode import impact, ingest, kernels, pipeline
from ecomode.inference import FareSchedule, InferenceError, infer_mapping
from ecomode.modes import PUBLISHED_MAPPING, DEFAULT_MODE_FILTER, ModeMapping
from ecomode.synth import CLICK_MODELS, SynthConfig, SynthConfigError, generate

log = logging.getLogger("ecomode")


class UsageError(Exception):
    pass


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _non_negative_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must be within [0, 1], got {text}")
    return value


def _mode_list(text):
    try:
        modes = sorted({int(part) for part in str(text).split(",") if part.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated mode ids, got {text!r}") from None
    if not modes or not set(modes) <= set(range(1, 12)):
        raise argparse.ArgumentTypeError(f"modes must be within 1..11, got {text!r}")
    return modes


def _impact_flags(p, with_run_inputs):
    p.add_argument("--national-mt", type=_positive_float, default=impact.CHINA_TRANSPORT_CO2_MT,
                   help="national transport CO2 in megatonnes (default %(default)s)")
    p.add_argument("--met", type=_non_negative_float, default=impact.DEFAULT_MET, help="MET factor of cycling")
    p.add_argument("--recommendation", type=_positive_float, default=impact.WHO_RECOMMENDATION_METH,
                   help="recommended MET-h per week (default %(default)s)")
    p.add_argument("--full-benefit", type=_non_negative_float, default=impact.FULL_BENEFIT_PCT,
                   help="risk reduction in percent at the full recommendation")
    if with_run_inputs:
        p.add_argument("--reduction", type=_fraction, default=0.0923, help="CO2 reduction fraction")
        p.add_argument("--cycling-min", type=_non_negative_float, default=23.04, help="cycling minutes per day")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecomode", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic log corpus")
    p.add_argument("--config")
    p.add_argument("--sessions", type=_non_negative_int, default=1000)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--out-dir")
    p.add_argument("--click-model", choices=CLICK_MODELS, default="uniform")
    p.add_argument("--days", type=_positive_int, default=61)
    p.add_argument("--price-noise", type=_fraction, default=0.10)
    p.add_argument("--mapping", help="ground-truth mapping.json (default: the published mapping)")
    p.add_argument("--fares", help="fares.json (default: bundled Beijing fares)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("infer", help="infer the mode-id mapping from plan logs")
    p.add_argument("--config")
    p.add_argument("--data-dir")
    p.add_argument("--plans", help="plans.jsonl (default: DATA_DIR/plans.jsonl)")
    p.add_argument("--fares", help="fares.json (default: bundled Beijing fares)")
    p.add_argument("--out", help="output mapping.json (default: DATA_DIR/mapping.json)")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("simulate", help="solve the selection program and write reports")
    p.add_argument("--config")
    p.add_argument("--data-dir")
    for name in pipeline.INPUT_NAMES:
        p.add_argument(f"--{name}", help=f"{name}.jsonl (default: DATA_DIR/{name}.jsonl)")
    p.add_argument("--mapping", default="published", help="'published', 'infer' or a mapping.json path")
    p.add_argument("--fares", help="fares.json used with --mapping infer")
    p.add_argument("--emissions", help="emissions.json (default: bundled rates)")
    p.add_argument("--alpha", type=_non_negative_float, default=1.0, help="weight per gram CO2")
    p.add_argument("--beta", type=_non_negative_float, default=1.0, help="weight per second")
    p.add_argument("--modes", type=_mode_list, default=sorted(DEFAULT_MODE_FILTER),
                   help="comma-separated mode ids kept for simulation (default 1,2,3,4,5,6,7,11)")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--examples-k", type=_non_negative_int, default=5)
    p.add_argument("--selection", choices=("top-savings", "sid"), default="top-savings")
    p.add_argument("--days", type=_positive_int, help="days covered (default: distinct UTC dates in the queries)")
    p.add_argument("--denominator", choices=impact.DENOMINATORS, default="sessions")
    _impact_flags(p, with_run_inputs=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("impact", help="national CO2 and health extrapolations")
    p.add_argument("--config")
    p.add_argument("--out-dir", default=".")
    _impact_flags(p, with_run_inputs=True)
    p.set_defaults(func=cmd_impact)
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(overrides, dict):
            raise UsageError("config file must hold a JSON object")
        sub = _subparser(parser, args.command)
        known = {a.dest: a for a in sub._actions}
        unknown = sorted(k for k in overrides if k.replace("-", "_") not in known)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {unknown}")
        defaults = {}
        for key, value in overrides.items():
            action = known[key.replace("-", "_")]
            if action.type is not None and value is not None:
                try:
                    value = action.type(",".join(map(str, value)) if isinstance(value, list) else str(value))
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {key}: {exc}") from exc
            defaults[action.dest] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def cmd_synth(args) -> int:
    if not args.out_dir:
        raise UsageError("--out-dir is required")
    try:
        mapping = ModeMapping.load(args.mapping) if args.mapping else PUBLISHED_MAPPING
        fares = FareSchedule.load(args.fares)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    cfg = SynthConfig(
        session_count=args.sessions,
        seed=args.seed,
        mapping=mapping,
        fares=fares,
        click_model=args.click_model,
        days=args.days,
        price_noise=args.price_noise,
    )
    try:
        paths = generate(cfg, args.out_dir)
    except SynthConfigError as exc:
        raise UsageError(str(exc)) from exc
    log.info("wrote %d sessions to %s", args.sessions, paths["queries"].parent)
    return 0


def cmd_infer(args) -> int:
    plans = args.plans or (Path(args.data_dir) / "plans.jsonl" if args.data_dir else None)
    if plans is None:
        raise UsageError("pass --data-dir or --plans")
    out = args.out or (Path(args.data_dir) / "mapping.json" if args.data_dir else None)
    if out is None:
        raise UsageError("pass --out when --data-dir is not given")
    try:
        fares = FareSchedule.load(args.fares)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot load fares: {exc}") from exc
    try:
        displays = ingest.parse_plans(plans)
    except ingest.IngestError as exc:
        raise UsageError(str(exc)) from exc
    try:
        mapping = infer_mapping(displays.records, fares)
    except InferenceError as exc:
        log.error("inference failed: %s", exc)
        return 1
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    mapping.dump(out)
    log.info("mapping %s written to %s", mapping, out)
    return 0


def cmd_simulate(args) -> int:
    cfg = pipeline.RunConfig(
        data_dir=args.data_dir,
        queries=args.queries,
        plans=args.plans,
        clicks=args.clicks,
        mapping=args.mapping,
        fares=args.fares,
        emissions=args.emissions,
        alpha=args.alpha,
        beta=args.beta,
        modes=list(args.modes),
        out_dir=args.out_dir,
        examples_k=args.examples_k,
        selection=args.selection,
        days=args.days,
        denominator=args.denominator,
        national_mt=args.national_mt,
        met=args.met,
        recommendation=args.recommendation,
        full_benefit=args.full_benefit,
    )
    try:
        workers = kernels.worker_count()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        doc = pipeline.run_simulation(cfg, workers=workers)
    except pipeline.ConfigError as exc:
        raise UsageError(str(exc)) from exc
    except pipeline.DomainError as exc:
        log.error("%s", exc)
        return 1
    log.info(
        "CO2 %.2f%% lower, mean travel time %.2f%% lower over %d sessions",
        doc["co2"]["reduction_pct"],
        doc["time"]["reduction_pct"],
        doc["sessions"],
    )
    return 0


def cmd_impact(args) -> int:
    try:
        est = impact.estimate(
            args.reduction, args.cycling_min, args.national_mt, args.met, args.recommendation, args.full_benefit
        )
    except impact.ImpactError as exc:
        raise UsageError(str(exc)) from exc
    doc = {
        "inputs": {
            "reduction_fraction": args.reduction,
            "national_transport_co2_mt": args.national_mt,
            "cycling_min_per_day": args.cycling_min,
            "met_factor": args.met,
            "recommendation_meth": args.recommendation,
            "full_benefit_pct": args.full_benefit,
        },
        "outputs": est.to_json(),
    }
    digest = pipeline.hashlib.sha256(pipeline.canonical_json(doc["inputs"]).encode()).hexdigest()
    doc["config_digest"] = digest
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "impact.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(
        f"national reduction {est.national_reduction_mt:.2f} Mt; {est.meth_per_week:.3f} MET-h/week "
        f"= {est.pct_of_recommendation:.2f}% of recommendation; risk reduction {est.mortality_risk_reduction_pct:.2f}%"
    )
    return 0


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(f"ecomode: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
