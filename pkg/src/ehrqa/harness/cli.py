"""Command-line entry point: ``ehrqa <subcommand>``.

Exit codes: 0 success, 1 validation error, 2 run finished with failed units.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import yaml

from ..corpus import generate_fixture, load_corpus, write_corpus
from ..errors import ConfigurationError, IntegrityError, MalformedRecordError
from .config import load_config
from .report import report
from .runner import RunManifest, run_experiment

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARTIAL = 2

logger = logging.getLogger("ehrqa")

FIXTURE_CONFIG = {
    "corpus": {"notes": "notes.jsonl", "qa": "qa.jsonl"},
    "models": [
        {"model_id": "stub-instruct", "family": "instruct", "context_window": 128000},
        {"model_id": "stub-reasoning", "family": "reasoning", "context_window": 128000,
         "think_token_budget": 8000, "service": {"kind": "echo_gold_thinking"}},
    ],
    "output_dir": "runs",
    "cache_dir": ".ehrqa-cache",
}


def _cmd_ingest(args):
    corpus = load_corpus(args.notes, args.qa, min_context_tokens=args.min_context_tokens)
    out = Path(args.out)
    write_corpus(corpus.notes, corpus.items, out / "notes.jsonl", out / "qa.jsonl")
    print(f"wrote {len(corpus.notes)} notes and {len(corpus.items)} items to {out}")
    return EXIT_OK


def _cmd_fixtures(args):
    notes, items = generate_fixture(n_patients=args.patients, items_per_patient=args.items_per_patient,
                                    seed=args.seed)
    out = Path(args.out)
    write_corpus(notes, items, out / "notes.jsonl", out / "qa.jsonl")
    cfg_path = out / "config.yaml"
    if not cfg_path.exists():
        cfg_path.write_text(yaml.safe_dump(FIXTURE_CONFIG, sort_keys=False), encoding="utf-8")
    print(f"wrote {len(notes)} notes and {len(items)} items to {out}")
    return EXIT_OK


def _cmd_validate(args):
    cfg = load_config(args.config)
    print(f"config ok; digest {cfg.digest()[:16]}")
    return EXIT_OK


def _cmd_run(args):
    cfg = load_config(args.config)
    manifest = run_experiment(cfg, max_workers=args.workers)
    if not args.no_report:
        report(manifest)
    failed = manifest.failed_units
    print(f"run {manifest.run_dir}: {len(manifest.items)} items, {failed} failed units")
    return EXIT_PARTIAL if failed else EXIT_OK


def _cmd_report(args):
    run_dir = Path(args.run_dir)
    if not (run_dir / "manifest.json").exists():
        raise ConfigurationError(f"{run_dir} has no manifest.json")
    manifest = RunManifest.load(run_dir)
    paths = report(manifest)
    for p in paths.values():
        print(p)
    return EXIT_PARTIAL if manifest.failed_units else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="ehrqa", description="Clinical-notes QA benchmark harness")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a corpus")
    p.add_argument("--notes", required=True)
    p.add_argument("--qa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-context-tokens", type=int, default=0)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("fixtures", help="write a synthetic corpus and a stub config")
    p.add_argument("--out", required=True)
    p.add_argument("--patients", type=int, default=12)
    p.add_argument("--items-per-patient", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_fixtures)

    p = sub.add_parser("run", help="execute or resume an experiment")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-report", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="(re)build reports for a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("validate-config", help="check a config file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, MalformedRecordError, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
