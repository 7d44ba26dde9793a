"""Command-line interface: one subcommand per pipeline stage plus `run`.

Flags override config-file values; the config file is flat `key = value`
text. Artefacts land in the workdir and unchanged stages are skipped.
"""

from __future__ import annotations

import argparse
import sys

from .pipeline import Pipeline, PipelineConfig, PipelineError, workdir_lock

_STAGE_COMMANDS = {
    "ingest": "ingest",
    "vectorize": "vectors",
    "import-vectors": "vectors",
    "graph": "graph",
    "scan": "scan",
    "select": "select",
    "evaluate": "evaluate",
    "sankey": "sankey",
    "report": "report",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--corpus", help="input corpus JSONL (id, text, optional category)")
    parser.add_argument("--workdir", help="artefact directory")
    parser.add_argument("--stopwords", help="custom stop-word list, one word per line")
    parser.add_argument("--vectors", help="vector interchange file to import")
    parser.add_argument("--k", type=int, help="kNN neighbour count (default 13)")
    parser.add_argument("--t-min", type=float, dest="t_min", help="smallest Markov time")
    parser.add_argument("--t-max", type=float, dest="t_max", help="largest Markov time")
    parser.add_argument("--t-points", type=int, dest="t_points", help="grid size (log-spaced)")
    parser.add_argument("--runs", type=int, help="Louvain runs per time")
    parser.add_argument("--top-m", type=int, dest="top_m", help="ensemble size kept per time")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--plateau-eps", type=float, dest="plateau_eps",
                        help="VI(t,t') plateau threshold (default 0.05 ln N)")
    parser.add_argument("--plateau-span", type=float, dest="plateau_span",
                        help="minimum plateau width in decades (default 0.5)")
    parser.add_argument("--vi-quantile", type=float, dest="vi_quantile",
                        help="VI(t) dip quantile (default 0.5)")
    parser.add_argument("--include-trivial", action="store_true", default=None,
                        dest="include_trivial",
                        help="allow all-singletons / all-in-one as selectable levels")
    parser.add_argument("--top-words", type=int, dest="top_words",
                        help="words per cluster for PMI and reports (default 10)")
    parser.add_argument("--no-evaluate", action="store_false", default=None, dest="evaluate",
                        help="skip metric reports")
    parser.add_argument("--force", action="store_true", help="re-run even when up to date")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docstability",
        description="Multiscale document clustering on MST-kNN similarity graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in list(_STAGE_COMMANDS) + ["run"]:
        sp = sub.add_parser(command, help=f"run the {command} step")
        _add_common(sp)
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {
        key: getattr(args, key)
        for key in (
            "corpus", "workdir", "stopwords", "vectors", "k", "t_min", "t_max",
            "t_points", "runs", "top_m", "seed", "plateau_eps", "plateau_span",
            "vi_quantile", "include_trivial", "evaluate", "top_words",
        )
    }
    return cfg.override(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "vectorize":
            cfg.vectors = None
        if args.command == "import-vectors" and not cfg.vectors:
            raise PipelineError("import-vectors requires --vectors")
        pipeline = Pipeline(cfg)
        if args.command == "run":
            ran = pipeline.run(force=args.force)
            for stage, executed in ran.items():
                print(f"{stage}: {'ran' if executed else 'up to date'}")
        else:
            stage = _STAGE_COMMANDS[args.command]
            with workdir_lock(cfg.workdir):
                executed = pipeline.run_stage(stage, force=args.force)
            print(f"{stage}: {'ran' if executed else 'up to date'}")
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
