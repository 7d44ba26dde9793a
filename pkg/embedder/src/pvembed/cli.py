"""Command-line interface: `train` a model on a token dump, `infer` vectors
for an analysis set into the interchange format, and `benchmark` a vector
file against category labels."""

from __future__ import annotations

import argparse
import sys

from .benchmark import BenchmarkError, centroid_benchmark
from .dbow import DbowError, EmbedConfig, infer, load_model, save_model, train
from .interchange import InterchangeError, read_vectors, write_vectors
from .tokens import TokensError, read_labels, read_token_dump


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvembed",
        description="Paragraph-vector training, inference, and centroid benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train a model on a token-dump corpus")
    tr.add_argument("--corpus", required=True, help="token dump JSONL (id, tokens)")
    tr.add_argument("--out", required=True, help="model file to write")
    tr.add_argument("--dim", type=int, default=300, help="vector dimension (default 300)")
    tr.add_argument("--epochs", type=int, default=10, help="training passes (default 10)")
    tr.add_argument("--window", type=int, default=15,
                    help="context window recorded with the model (default 15)")
    tr.add_argument("--min-count", type=int, default=5, dest="min_count",
                    help="minimum term frequency (default 5)")
    tr.add_argument("--negative", type=int, default=5, help="noise samples (default 5)")
    tr.add_argument("--subsample", type=float, default=0.001,
                    help="frequent-word down-sampling threshold (default 0.001)")
    tr.add_argument("--seed", type=int, default=0, help="RNG seed")
    tr.add_argument("--alpha", type=float, default=0.025, help="initial learning rate")
    tr.add_argument("--min-alpha", type=float, default=0.0001, dest="min_alpha",
                    help="final learning rate")

    inf = sub.add_parser("infer", help="infer vectors for an analysis set")
    inf.add_argument("--model", required=True, help="trained model file")
    inf.add_argument("--corpus", required=True, help="token dump JSONL (id, tokens)")
    inf.add_argument("--out", required=True, help="vector interchange file to write")
    inf.add_argument("--epochs", type=int, default=None,
                     help="inference passes (default: the model's epochs)")
    inf.add_argument("--seed", type=int, default=None,
                     help="inference seed (default: the model's seed)")

    bm = sub.add_parser("benchmark", help="score vectors against category labels")
    bm.add_argument("--vectors", required=True, help="vector interchange file")
    bm.add_argument("--labels", required=True,
                    help="token dump JSONL carrying a category per document")
    bm.add_argument("--n", type=int, default=100, dest="n_nearest",
                    help="documents taken per centroid (default 100)")
    return parser


def _run_train(args: argparse.Namespace) -> None:
    cfg = EmbedConfig(
        dim=args.dim, epochs=args.epochs, window=args.window,
        min_count=args.min_count, negative=args.negative,
        subsample=args.subsample, seed=args.seed,
        alpha=args.alpha, min_alpha=args.min_alpha,
    )
    docs = read_token_dump(args.corpus)
    model = train([doc.tokens for doc in docs], cfg)
    save_model(model, args.out)
    for line in model.meta["log"]:
        print(line)
    print(f"model written to {args.out}")


def _run_infer(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    docs = read_token_dump(args.corpus)
    ids, values = infer(
        model, [(doc.id, doc.tokens) for doc in docs],
        epochs=args.epochs, seed=args.seed,
    )
    write_vectors(args.out, ids, values)
    print(f"{len(ids)} vectors of dimension {values.shape[1]} written to {args.out}")


def _run_benchmark(args: argparse.Namespace) -> None:
    ids, values = read_vectors(args.vectors)
    labels = read_labels(args.labels)
    result = centroid_benchmark(ids, values, labels, args.n_nearest)
    for cat in result.categories:
        print(f"{cat}: {result.per_category[cat]}/{result.n_nearest}")
    print(f"total {result.total}/{result.maximum} "
          f"({result.distinct_documents} distinct documents"
          f"{', ties broken by id order' if result.ties else ''})")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            _run_train(args)
        elif args.command == "infer":
            _run_infer(args)
        else:
            _run_benchmark(args)
    except (DbowError, InterchangeError, TokensError, BenchmarkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
