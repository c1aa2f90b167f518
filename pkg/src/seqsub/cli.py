"""``seqsub`` command line.

Exit codes: 0 ok, 2 input error, 3 configuration error (bad or missing flags,
oracle cap exceeded), 4 invariant violation or a bound that failed to hold.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .errors import ConfigError, InputError, InvariantError, SeqSubError, UndefinedMetricError
from .io import SCHEMA_VERSION, load

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3, 4

log = logging.getLogger("seqsub")


class _Parser(argparse.ArgumentParser):
    # flag problems are configuration errors, not input errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps({"schema_version": SCHEMA_VERSION, **doc}, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _train_config(args):
    from .ingest import TrainConfig
    return TrainConfig(
        max_edge_size=args.max_edge_size, d=args.d, min_user_events=args.min_user_events,
        max_user_events=args.max_user_events, min_item_events=args.min_item_events,
        min_support=args.min_support, folds=getattr(args, "folds", 10),
    )


def _add_train_flags(p):
    p.add_argument("--log", required=True, help="interaction CSV with a header row")
    p.add_argument("--user-col", default="user")
    p.add_argument("--item-col", default="item")
    p.add_argument("--time-col", default="timestamp")
    p.add_argument("--d", type=float, default=20, help="smoothing constant (default 20)")
    p.add_argument("--max-edge-size", type=int, default=3)
    p.add_argument("--min-support", type=int, default=2,
                   help="drop tuples seen in fewer training sequences")
    p.add_argument("--min-user-events", type=int, default=0)
    p.add_argument("--max-user-events", type=int, default=None)
    p.add_argument("--min-item-events", type=int, default=0)


def cmd_train(args) -> int:
    from .ingest import extract_user_sequences, read_log, train, write_model
    cfg = _train_config(args)
    corpus = extract_user_sequences(read_log(args.log, args.user_col, args.item_col, args.time_col), cfg)
    if not corpus.sequences:
        raise InputError("no users left after filtering")
    model = train(corpus, cfg)
    side = write_model(args.out, model)
    log.info("wrote %s (%d vertices, %d edges) and %s", args.out, model.graph.n, model.graph.m, side)
    return EXIT_OK


def cmd_solve(args) -> int:
    from .solvers import SolveConfig, solve
    hf = load(args.model, args.utility)
    cfg = SolveConfig(args.k, args.direction, args.fill_to_k)
    report = solve(hf.graph, hf.make_utility(), cfg, args.algorithm, args.history)
    doc = {"report": report.to_dict()}
    if hf.labels is not None:
        doc["labels"] = [hf.labels[v] for v in report.sigma]
    _emit(doc, args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .evaluate import (ExperimentConfig, accuracy_table, run_experiment, write_plot_csv,
                           write_reports_csv, write_reports_json)
    from .ingest import extract_user_sequences, read_log
    tcfg = _train_config(args)
    xcfg = ExperimentConfig(train=tcfg, ks=tuple(args.k), prefix_len=args.prefix_len,
                            algorithms=tuple(args.algorithms), fill_pairwise=args.fill_pairwise,
                            seed=args.seed)
    corpus = extract_user_sequences(read_log(args.log, args.user_col, args.item_col, args.time_col), tcfg)
    reports = run_experiment(corpus, xcfg, workers=args.workers)
    if args.reports_json:
        write_reports_json(args.reports_json, reports)
    if args.reports_csv:
        write_reports_csv(args.reports_csv, reports)
    if args.plot_csv:
        write_plot_csv(args.plot_csv, reports)
    failed = [r for r in reports if r.error]
    rows = [{k: (None if isinstance(v, float) and v != v else v) for k, v in row.items()}
            for row in accuracy_table(reports)]
    _emit({"summary": rows, "failed_folds": sorted({r.fold for r in failed}),
           "skipped_users": sum(r.skipped for r in reports)}, args.out)
    return EXIT_INVARIANT if failed else EXIT_OK


def cmd_oracle_verify(args) -> int:
    from .oracle import random_batch, verify_ratio
    from .solvers import SolveConfig, solve
    results = []
    if args.random:
        for case in random_batch(args.random, args.seed, args.max_n, args.max_m, args.max_r,
                                 args.k or [2, 3, 4], args.cap, args.fill_to_k):
            results.append({**asdict(case), **asdict(case.verdict)})
            del results[-1]["verdict"]
    else:
        if not args.model:
            raise ConfigError("oracle-verify needs a model path or --random N")
        hf = load(args.model, args.utility)
        h = hf.make_utility()
        for k in args.k or [2]:
            report = solve(hf.graph, h, SolveConfig(k, args.direction, args.fill_to_k), args.algorithm)
            verdict = verify_ratio(hf.graph, h, k, report, args.cap)
            results.append({"k": k, "solver": f"{args.algorithm}/{args.direction}",
                            "sigma": list(report.sigma), **asdict(verdict)})
    violations = [r for r in results if not r["holds"]]
    _emit({"results": results, "checked": len(results), "violations": len(violations),
           "all_hold": not violations}, args.out)
    for r in violations:
        log.error("bound violated: %s", r)
    return EXIT_INVARIANT if violations else EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench
    result = run_bench(args.sizes, args.k, args.seed, args.repeats, args.workers)
    _emit({"timings": [asdict(t) for t in result.timings], "exponent": result.exponent}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .oracle import DEFAULT_CAP
    from .solvers import ALGORITHMS, DIRECTIONS
    from .evaluate import EXPERIMENT_ALGORITHMS

    parser = _Parser(prog="seqsub", description="Sequence selection on directed (hyper)graphs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit a conditional-probability hypergraph from a log")
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="model JSON path; counts go to <stem>.counts.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("solve", help="pick a sequence of k vertices")
    p.add_argument("model", help="hypergraph JSON or CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--algorithm", default="hyper-sequence-greedy",
                   choices=ALGORITHMS + ("pairwise", "hyper"))
    p.add_argument("--direction", default="forward", choices=DIRECTIONS)
    p.add_argument("--fill-to-k", action=argparse.BooleanOptionalAction, default=None,
                   help="top up a short greedy sequence (default: on for hyper, off for pairwise)")
    p.add_argument("--utility", choices=("modular", "coverage"), default=None,
                   help="override the utility named in the model file")
    p.add_argument("--history", type=_int_list, default=[],
                   help="comma-separated vertex ids that start the sequence (forward only)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="cross-validated next-k prediction")
    _add_train_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix-len", type=int, default=8)
    p.add_argument("--k", type=int, action="append", help="repeatable; default 5")
    p.add_argument("--algorithms", nargs="+", default=list(EXPERIMENT_ALGORITHMS),
                   choices=EXPERIMENT_ALGORITHMS)
    p.add_argument("--fill-pairwise", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--reports-json")
    p.add_argument("--reports-csv")
    p.add_argument("--plot-csv", help="k, algorithm, mean tau table")
    p.add_argument("--out", help="summary JSON path (default stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle-verify", help="compare solver output with the exact optimum")
    p.add_argument("model", nargs="?", help="hypergraph JSON or CSV")
    p.add_argument("--k", type=int, action="append", help="repeatable")
    p.add_argument("--algorithm", default="hyper-sequence-greedy",
                   choices=ALGORITHMS + ("pairwise", "hyper"))
    p.add_argument("--direction", default="forward", choices=DIRECTIONS)
    p.add_argument("--fill-to-k", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--utility", choices=("modular", "coverage"), default=None)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max sequences to enumerate")
    p.add_argument("--random", type=int, metavar="N", help="check N random instances instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=7)
    p.add_argument("--max-m", type=int, default=20)
    p.add_argument("--max-r", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("bench", help="time the pairwise solver against the edge count")
    p.add_argument("--sizes", type=_int_list, default=[1_000, 3_000, 10_000, 30_000, 100_000])
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def _validate(args) -> None:
    k = getattr(args, "k", None)
    if k is None and args.command == "evaluate":
        args.k = k = [5]
    ks = k if isinstance(k, list) else [] if k is None else [k]
    if any(k < 0 for k in ks):
        raise ConfigError("k must be nonnegative")
    if getattr(args, "workers", 1) < 1:
        raise ConfigError("--workers must be at least 1")
    if args.command == "solve" and args.history and args.direction != "forward":
        raise ConfigError("--history needs --direction forward")
    if args.command == "bench" and len(args.sizes) < 2:
        raise ConfigError("--sizes needs at least two values to fit an exponent")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return args.func(args)
    except InvariantError as exc:
        print(f"seqsub: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ConfigError as exc:
        print(f"seqsub: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, UndefinedMetricError, OSError) as exc:
        print(f"seqsub: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SeqSubError as exc:
        print(f"seqsub: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
