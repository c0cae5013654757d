"""Command line front end: extract, match, evaluate, ablate and synth."""
import argparse
import csv
import json
import logging
import os
import sys
from typing import Any

from groupmatch.groupmatch_config.GroupMatch_Config import GroupMatch_Config, load_config
from groupmatch.groupmatch_config.logging_setup import configure_logging
from groupmatch.groupmatch_exceptions import GroupMatch_Exception, GroupMatch_Validation_Exception
from groupmatch.reid_datasets.descriptor_cache import read_descriptor_cache, write_descriptor_cache
from groupmatch.reid_datasets.group_graph_documents import write_graph_documents
from groupmatch.reid_datasets.manifest import manifest_graphs, read_manifest, task_from_graphs, task_to_manifest, write_manifest
from groupmatch.reid_datasets.synthetic_groups import Synth_Config, generate_synthetic
from groupmatch.reid_pipeline.ReId_Task import ReId_Task
from groupmatch.reid_pipeline.ablation import ReId_Variant, ablation_csv, run_ablation
from groupmatch.reid_pipeline.evaluation import SUMMARY_RANKS, CMC_Result, evaluate_protocol, per_iteration_cmc
from groupmatch.reid_pipeline.Iteration_State import Iteration_State
from groupmatch.run_groupmatch import evaluate_task, require_labels, run_reid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _write_json(document: Any, path: str):
    with open(path, "w", encoding="utf-8") as out:
        json.dump(document, out, indent=1, sort_keys=True)
        out.write("\n")
    logger.info(f"Wrote {path}")


def _write_rows(header: list[str], rows: list[list], path: str):
    with open(path, "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Wrote {path}")


def _require_input(path: str):
    if not os.path.isfile(path):
        raise GroupMatch_Validation_Exception(f"input file not found: {path}")


def _require_output_dir(path: str):
    os.makedirs(path, exist_ok=True)


def _require_output_file(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise GroupMatch_Validation_Exception(f"output directory does not exist: {parent}")


def _config(args: argparse.Namespace) -> GroupMatch_Config:
    if args.config is not None:
        _require_input(args.config)
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if args.jobs is not None:
        if args.jobs < 1:
            raise GroupMatch_Validation_Exception(f"--jobs must be at least 1, got {args.jobs}")
        config = config.with_jobs(args.jobs)
    if getattr(args, "variant", None) is not None:
        config = ReId_Variant.get_variant(args.variant).configure(config)
    return config


def _load_task(args: argparse.Namespace, config: GroupMatch_Config) -> ReId_Task:
    _require_input(args.manifest)
    cache = None
    if args.cache is not None and os.path.isfile(args.cache):
        cache = {g.group_id: g for g in read_descriptor_cache(args.cache, config.features)}
        logger.info(f"Reusing {len(cache)} cached groups from {args.cache}")
    manifest = read_manifest(args.manifest)
    task = task_from_graphs(manifest, manifest_graphs(manifest, config.features, cache=cache, seed=config.pipeline.seed))
    if args.limit is not None:
        task = task.limited(args.limit)
    logger.info(f"Loaded {task}")
    return task


def _dump_importance(args: argparse.Namespace, state: Iteration_State):
    if args.dump_importance is not None:
        _write_json({group_id: table.to_dict() for group_id, table in sorted(state.importances.items())}, args.dump_importance)


def _summary_table(rows: list[tuple[str, CMC_Result]]) -> str:
    header = ["method"] + [f"rank-{r}" for r in SUMMARY_RANKS] + ["F-score"]
    lines = ["  ".join(f"{h:>10}" for h in header)]
    for name, result in rows:
        values = [f"{100.0 * result.rate(r):.1f}" for r in SUMMARY_RANKS] + [f"{result.f_score:.3f}"]
        lines.append("  ".join(f"{v:>10}" for v in [name] + values))
    return "\n".join(lines)


def cmd_extract(args: argparse.Namespace) -> int:
    """
    Build the group graphs of a manifest and store them as a descriptor cache, or as JSON if the output ends in .json.
    """
    config = _config(args)
    _require_input(args.manifest)
    _require_output_file(args.out)
    manifest = read_manifest(args.manifest)
    graphs = manifest_graphs(manifest, config.features, args.limit, seed=config.pipeline.seed)
    if args.out.endswith(".json"):
        write_graph_documents(graphs, args.out)
    else:
        write_descriptor_cache(graphs, args.out)
    logger.info(f"Extracted {len(graphs)} groups to {args.out}")
    return EXIT_OK


def cmd_match(args: argparse.Namespace) -> int:
    """
    Match every probe with every gallery and write the outcome of every pair.
    """
    config = _config(args)
    _require_output_file(args.out)
    task = _load_task(args, config)
    state = run_reid(task, config)
    probes, galleries = task.probe_map, task.gallery_map
    outcomes = []
    for (probe_id, gallery_id), outcome in sorted(state.assignments.items()):
        ids_p = probes[probe_id].person_ids if probe_id in probes else None
        ids_q = galleries[gallery_id].person_ids if gallery_id in galleries else None
        if config.pipeline.global_features:
            ids_p, ids_q = None, None
        outcomes.append(outcome.to_dict(ids_p, ids_q))
    _write_json({"iterations": state.iteration, "converged": state.converged, "pairs": outcomes}, args.out)
    _dump_importance(args, state)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    """
    Rank the galleries of every probe and write the CMC curve, the F-score and a summary table.
    """
    if args.trials is not None and (args.per_iteration or args.dump_importance is not None):
        raise GroupMatch_Validation_Exception("--per-iteration and --dump-importance describe a single run and cannot be combined with --trials")
    config = _config(args)
    _require_output_dir(args.out)
    task = _load_task(args, config)
    require_labels(task)
    if args.trials is not None:
        protocol = evaluate_protocol(task, config, args.trials, args.fraction)
        result, state = protocol.mean, None
    else:
        result, state = evaluate_task(task, config)
    _write_rows(["rank", "rate"], [[r, f"{result.rate(r):.6f}"] for r in range(1, len(result.ranks) + 1)],
                os.path.join(args.out, "cmc.csv"))
    _write_json({"fScore": result.f_score, **{f"rank{r}": result.rate(r) for r in SUMMARY_RANKS}},
                os.path.join(args.out, "fscore.json"))
    if state is not None:
        if args.per_iteration:
            rows = []
            for record, curve in zip(state.history, per_iteration_cmc(task, state)):
                rows.extend([record.iteration, r, f"{curve.rate(r):.6f}"] for r in range(1, len(curve.ranks) + 1))
            _write_rows(["iteration", "rank", "rate"], rows, os.path.join(args.out, "cmc_per_iteration.csv"))
        _dump_importance(args, state)
    print(_summary_table([(args.variant if args.variant is not None else "configured", result)]))
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    """
    Evaluate several variants on the same seeded splits and write one row per variant per rank.
    """
    if len(args.variants) < 2:
        raise GroupMatch_Validation_Exception(f"an ablation needs at least two variants, got {args.variants}")
    variants = [ReId_Variant.get_variant(v) for v in args.variants]
    config = _config(args)
    _require_output_file(args.out)
    task = _load_task(args, config)
    results = run_ablation(task, variants, config, args.trials, args.fraction)
    with open(args.out, "w", encoding="utf-8", newline="") as out:
        out.write(ablation_csv(results))
    logger.info(f"Wrote {args.out}")
    print(_summary_table([(v.value, r) for v, r in results]))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    """
    Generate a synthetic benchmark and write it as an image-free manifest.
    """
    config = _config(args)
    _require_output_file(args.out)
    synth = Synth_Config(n_pairs=args.n_pairs, size_range=(args.size_min, args.size_max), layout_noise=args.layout_noise,
                         feature_noise=args.feature_noise, churn_rate=args.churn_rate, distractor_count=args.distractors,
                         seed=config.pipeline.seed, detection_jitter=args.detection_jitter, view_change=args.view_change,
                         palette_size=args.palette_size, descriptor_blocks=args.descriptor_blocks, bins=config.features.bins)
    task, _ground_truth = generate_synthetic(synth, config.features)
    write_manifest(task_to_manifest(task), args.out)
    logger.info(f"Wrote {task} to {args.out}")
    return EXIT_OK


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="TOML or JSON file overriding the packaged defaults")
    common.add_argument("--seed", type=int, default=None, help="Seed of every random choice")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes used to score group pairs")
    common.add_argument("--variant", default=None, help=f"Method variant: {', '.join(v.value for v in ReId_Variant)}")
    common.add_argument("--dump-importance", dest="dump_importance", default=None, help="Write the final importances as JSON")
    common.add_argument("--limit", type=int, default=None, help="Process at most this many groups or probes")
    common.add_argument("--cache", default=None, help="Descriptor cache to reuse when loading a manifest")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Increase log verbosity")
    return common


def build_parser() -> argparse.ArgumentParser:
    """
    :return: The argument parser of the groupmatch command.
    """
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="groupmatch", description="Multi-granularity group re-identification.")
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser("extract", parents=[common], help="Extract group graphs from a manifest")
    extract.add_argument("manifest")
    extract.add_argument("--out", required=True, help="Descriptor cache path, or a .json path for graph documents")
    extract.set_defaults(handler=cmd_extract)

    match = commands.add_parser("match", parents=[common], help="Match every probe with every gallery")
    match.add_argument("manifest")
    match.add_argument("--out", required=True, help="JSON file of the pair outcomes")
    match.set_defaults(handler=cmd_match)

    evaluate = commands.add_parser("evaluate", parents=[common], help="CMC curve, F-score and summary of a labelled task")
    evaluate.add_argument("manifest")
    evaluate.add_argument("--out", required=True, help="Directory of cmc.csv and fscore.json")
    evaluate.add_argument("--per-iteration", dest="per_iteration", action="store_true", help="Also write cmc_per_iteration.csv")
    evaluate.add_argument("--trials", type=int, default=None, help="Average over this many random splits")
    evaluate.add_argument("--fraction", type=float, default=None, help="Share of labelled pairs drawn per split")
    evaluate.set_defaults(handler=cmd_evaluate)

    ablate = commands.add_parser("ablate", parents=[common], help="Compare method variants")
    ablate.add_argument("manifest")
    ablate.add_argument("--variants", nargs="+", required=True, help="Two or more variant names")
    ablate.add_argument("--out", required=True, help="CSV file with columns variant,rank,rate")
    ablate.add_argument("--trials", type=int, default=None, help="Number of random splits")
    ablate.add_argument("--fraction", type=float, default=None, help="Share of labelled pairs drawn per split")
    ablate.set_defaults(handler=cmd_ablate)

    synth = commands.add_parser("synth", parents=[common], help="Generate a synthetic benchmark manifest")
    defaults = Synth_Config()
    synth.add_argument("--out", required=True, help="Manifest JSON path")
    synth.add_argument("--n-pairs", dest="n_pairs", type=int, default=defaults.n_pairs)
    synth.add_argument("--size-min", dest="size_min", type=int, default=defaults.size_range[0])
    synth.add_argument("--size-max", dest="size_max", type=int, default=defaults.size_range[1])
    synth.add_argument("--layout-noise", dest="layout_noise", type=float, default=defaults.layout_noise)
    synth.add_argument("--feature-noise", dest="feature_noise", type=float, default=defaults.feature_noise)
    synth.add_argument("--churn-rate", dest="churn_rate", type=float, default=defaults.churn_rate)
    synth.add_argument("--distractors", type=int, default=defaults.distractor_count)
    synth.add_argument("--detection-jitter", dest="detection_jitter", type=float, default=defaults.detection_jitter)
    synth.add_argument("--view-change", dest="view_change", type=float, default=defaults.view_change)
    synth.add_argument("--palette-size", dest="palette_size", type=int, default=defaults.palette_size)
    synth.add_argument("--descriptor-blocks", dest="descriptor_blocks", type=int, default=defaults.descriptor_blocks)
    synth.set_defaults(handler=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Run one groupmatch command.
    :param argv: Command line arguments without the program name. Defaults to sys.argv.
    :return: 0 on success, 2 if the input is invalid, 3 if the run failed.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except GroupMatch_Validation_Exception as e:
        print(f"groupmatch {args.command}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GroupMatch_Exception, OSError) as e:
        print(f"groupmatch {args.command}: {e}", file=sys.stderr)
        logger.debug("Run failed", exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
