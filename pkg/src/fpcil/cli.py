"""Command-line front end.

Subcommands: simulate (one scenario over its seeds), matrix (a standard
sweep), schedule (print a class schedule), predict-future (fixture replay
or remote completion), manifest (emit a generation manifest), ingest
(validate an embedding container), report (re-render a stored report).

Exit codes: 0 success, 2 configuration error, 3 protocol violation,
4 numerical error, 5 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bridge, future, runner
from .config import apply_overrides, load_config_dict
from .errors import ConfigurationError, HarnessError
from .protocol import ClassCatalog, build_schedule
from .runner import ScenarioConfig, reference_scenario


def _scenario_from_args(args) -> ScenarioConfig:
    if args.config:
        d = load_config_dict(args.config)
    else:
        d = reference_scenario().to_dict()
        d["output_dir"] = "runs"
    apply_overrides(d, args.set or [])
    return ScenarioConfig.from_dict(d)


def _add_config_flags(p):
    p.add_argument("--config", help="TOML scenario file (defaults to the built-in reference)")
    p.add_argument(
        "--set",
        action="append",
        metavar="PATH=VALUE",
        help="override a config field, e.g. --set head.kind=fecam (repeatable)",
    )


def _cmd_simulate(args) -> int:
    config = _scenario_from_args(args)
    seeds = [args.seed] if args.seed is not None else list(config.eval_seeds)
    aias = []
    for seed in seeds:
        report = runner.run_fpcil_scenario(config, seed=seed)
        directory = runner.run_directory(config, seed)
        runner.write_report(report, directory)
        aias.append(report.average_incremental_accuracy)
        print(
            f"seed {seed}: AIA {100 * report.average_incremental_accuracy:.2f}% "
            f"Last {100 * report.last_accuracy:.2f}% -> {directory}"
        )
    if len(aias) > 1:
        print(f"mean AIA over {len(aias)} seeds: {100 * sum(aias) / len(aias):.2f}%")
    return 0


def _cmd_matrix(args) -> int:
    config = _scenario_from_args(args)
    if args.sweep == "aux":
        k_values = [float(k) for k in args.k.split(",")] if args.k else (0, 33, 50, 66, 100)
        matrix = runner.aux_sweep_matrix(config, k_values=k_values)
    elif args.sweep == "heads":
        matrix = runner.head_comparison_matrix(config)
    else:
        counts = [int(n) for n in args.counts.split(",")] if args.counts else (50, 500)
        matrix = runner.sample_count_matrix(config, counts=counts)
    result = runner.run_matrix(matrix)
    directory = runner.run_directory(config, 0, args.output_dir).parent / (
        f"matrix-{args.sweep}-{config.digest()[:12]}"
    )
    runner.write_matrix_result(result, directory)
    print(result.render())
    print(f"-> {directory}")
    return 0


def _cmd_schedule(args) -> int:
    config = _scenario_from_args(args)
    catalog = ClassCatalog.generic(config.world.num_classes)
    schedule = build_schedule(
        catalog, config.schedule.base_size, config.schedule.inc_size, config.schedule.order_seed
    )
    if args.json:
        print(schedule.to_json())
    else:
        for t in range(1, schedule.num_steps + 1):
            ids = ", ".join(str(c) for c in schedule.steps[t - 1])
            print(f"step {t}: {ids}")
    return 0


def _cmd_predict_future(args) -> int:
    names = [line.strip() for line in open(args.names_file) if line.strip()]
    if args.fixtures:
        service = future.FixtureReplayer(args.fixtures)
    else:
        service = future.RemoteClient(model=args.model)
    vocab = None
    if args.vocab_file:
        vocab = [line.strip() for line in open(args.vocab_file) if line.strip()]
    levels = future.default_levels(args.full_min, args.r1_min, args.r2_min)
    prediction = future.predict_future(
        service,
        names,
        repeats=args.repeats,
        known_vocabulary=vocab,
        levels=levels,
        log_dir=args.log_dir,
    )
    out = {
        "counts": dict(sorted(prediction.tally.counts.items())),
        "selections": {k: list(v) for k, v in sorted(prediction.selections.items())},
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _parse_id_spec(spec: str) -> list[int]:
    """Comma list with ranges: "3,7,10-19" -> [3, 7, 10..19]."""
    ids: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            ids.extend(range(int(lo), int(hi) + 1))
        else:
            ids.append(int(part))
    if not ids:
        raise ConfigurationError(f"no class ids in {spec!r}")
    return sorted(set(ids))


def _cmd_manifest(args) -> int:
    lexicon = bridge.load_lexicon(args.lexicon) if args.lexicon else bridge.default_lexicon()
    catalog = bridge.catalog_from_lexicon(lexicon)
    class_ids = _parse_id_spec(args.class_ids)
    bad = [c for c in class_ids if not 0 <= c < len(catalog)]
    if bad:
        raise ConfigurationError(f"class ids outside the catalog (0..{len(catalog) - 1}): {bad}")
    template = bridge.PROMPT_TEMPLATE_PHOTO if args.photo_prompt else bridge.PROMPT_TEMPLATE_PLAIN
    specs = bridge.build_prompt_specs(
        catalog,
        class_ids,
        n_samples=args.n_samples,
        guidance_scale=args.guidance_scale,
        base_seed=args.seed,
        template=template,
    )
    bridge.emit_manifest(specs, args.output)
    print(f"wrote {len(specs)} generation records -> {args.output}")
    return 0


def _cmd_ingest(args) -> int:
    samples = bridge.ingest_embedding_file(args.data, args.metadata)
    dim = samples[0].feature.shape[0]
    classes = sorted({s.class_id for s in samples})
    origins = sorted({s.origin for s in samples})
    print(
        f"ok: {len(samples)} samples, dim {dim}, {len(classes)} classes "
        f"({classes[0]}..{classes[-1]}), origins {'/'.join(origins)}"
    )
    return 0


def _cmd_report(args) -> int:
    report = runner.read_report(args.path)
    if args.csv:
        print("step_index,seen_classes,correct,total,top1")
        for s in report.per_step:
            print(f"{s.step_index},{len(s.seen_classes)},{s.correct},{s.total},{s.top1}")
        return 0
    print(f"config digest: {report.config_digest}")
    print(f"seed: {report.seed}")
    for s in report.per_step:
        print(
            f"step {s.step_index}: seen {len(s.seen_classes):>4} classes, "
            f"top-1 {100 * s.top1:6.2f}% ({s.correct}/{s.total})"
        )
    print(f"AIA  {100 * report.average_incremental_accuracy:.2f}%")
    print(f"Last {100 * report.last_accuracy:.2f}%")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpcil",
        description="Embedding-space harness for exemplar-free class-incremental learning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario over its eval seeds")
    _add_config_flags(p)
    p.add_argument("--seed", type=int, help="run a single seed instead of eval_seeds")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("matrix", help="run a standard comparison sweep")
    _add_config_flags(p)
    p.add_argument("--sweep", choices=("aux", "heads", "samples"), default="aux")
    p.add_argument("--k", help="comma list of partial percentages for --sweep aux")
    p.add_argument("--counts", help="comma list of per-class sample counts for --sweep samples")
    p.add_argument("--output-dir", help="base directory for matrix outputs")
    p.set_defaults(fn=_cmd_matrix)

    p = sub.add_parser("schedule", help="print the class schedule of a scenario")
    _add_config_flags(p)
    p.add_argument("--json", action="store_true", help="print machine-readable JSON")
    p.set_defaults(fn=_cmd_schedule)

    p = sub.add_parser("predict-future", help="predict future class names via completions")
    p.add_argument("--names-file", required=True, help="file with one initial class name per line")
    p.add_argument("--fixtures", help="replay transcripts from this directory instead of HTTP")
    p.add_argument("--model", default="default", help="model identifier for the remote service")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--vocab-file", help="optional vocabulary filter, one name per line")
    p.add_argument("--full-min", type=int, default=1)
    p.add_argument("--r1-min", type=int, default=4)
    p.add_argument("--r2-min", type=int, default=7)
    p.add_argument("--log-dir", help="write raw transcripts here")
    p.set_defaults(fn=_cmd_predict_future)

    p = sub.add_parser("manifest", help="emit a generation manifest for external tooling")
    p.add_argument("--output", required=True)
    p.add_argument("--class-ids", required=True, help="e.g. 10-99 or 3,7,12")
    p.add_argument("--n-samples", type=int, default=500)
    p.add_argument("--guidance-scale", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--photo-prompt", action="store_true", help='use the "a photo of a ..." template')
    p.add_argument("--lexicon", help="TSV lexicon path (defaults to the built-in catalog)")
    p.set_defaults(fn=_cmd_manifest)

    p = sub.add_parser("ingest", help="validate and summarize an embedding container")
    p.add_argument("--data", required=True)
    p.add_argument("--metadata", required=True)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("report", help="re-render a stored run report")
    p.add_argument("path", help="run directory or report.json")
    p.add_argument("--csv", action="store_true", help="print the per-step CSV")
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HarnessError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
