"""Command-line entry point.

Subcommands: sample-size, table1, tree-size, extract, evaluate,
validate-pac, case-study, rules. Every stochastic subcommand takes an
explicit --seed (default 0) and prints a reproducibility banner with
all parameters to stderr; data output is CSV on stdout or files under
--out/--out-dir. Exit codes: 0 success, 1 domain/config/usage error,
2 oracle or transport failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, casestudy
from .errors import OracleError, PacTreeError
from .evaluation import evaluate, validate_pac
from .extraction import ExtractionConfig, trepac
from .features import FeatureSpace, enumerate_candidate_splits, load_space
from .oracles import (
    ClassifiedExample,
    Distribution,
    FixtureOracle,
    MembershipOracle,
    RemoteOracle,
    TrainingSet,
    TreeOracle,
)
from .tree import load_tree, render_tree, save_tree

ENV_URL = "ORACLE_URL"
ENV_TIMEOUT = "ORACLE_TIMEOUT_SECS"
ENV_BATCH = "ORACLE_BATCH"


class _Parser(argparse.ArgumentParser):
    # Usage problems exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _banner(args: argparse.Namespace) -> None:
    shown = {
        key: value
        for key, value in sorted(vars(args).items())
        if key != "func" and value is not None
    }
    params = " ".join(f"{key}={value}" for key, value in shown.items())
    print(f"# pactree {args.command}: {params}", file=sys.stderr)


def _load_space_arg(spec: str | None) -> FeatureSpace:
    if spec in (None, "case-study"):
        return casestudy.case_study_space()
    return load_space(spec)


def _make_oracle(spec: str, args: argparse.Namespace, space: FeatureSpace) -> MembershipOracle:
    if spec.startswith("tree:"):
        tree, _ = load_tree(spec[len("tree:") :])
        return TreeOracle(tree)
    if spec.startswith("fixture:"):
        name = spec[len("fixture:") :]
        if name in casestudy.BUNDLED_FIXTURES:
            return casestudy.bundled_fixture(name)
        return FixtureOracle.from_file(name, space)
    if spec == "remote" or spec.startswith("remote:"):
        url = spec[len("remote:") :] if spec.startswith("remote:") else ""
        url = url or os.environ.get(ENV_URL, "")
        if not url:
            raise PacTreeError("remote oracle needs remote:URL or ORACLE_URL")
        model = getattr(args, "model", None)
        if not model:
            raise PacTreeError("remote oracle needs --model")
        return RemoteOracle(
            url,
            model,
            timeout=float(os.environ.get(ENV_TIMEOUT, "60")),
            batch_size=int(os.environ.get(ENV_BATCH, "32")),
        )
    raise PacTreeError(
        f"unknown oracle spec {spec!r}; use tree:FILE, fixture:FILE, or remote:URL"
    )


def _write_csv(handle, header, rows) -> None:
    writer = csv.writer(handle)
    writer.writerow(header)
    writer.writerows(rows)


# -- subcommands -----------------------------------------------------------------


def _cmd_sample_size(args) -> int:
    if (args.n is None) == (args.c is None):
        raise PacTreeError("give exactly one of --n or --c")
    n = args.n if args.n is not None else bounds.tree_size_estimate(args.c, args.epsilon)
    m = bounds.sample_size_for_tree_space(
        args.epsilon, args.delta, args.k, n, args.features, rounding=args.rounding
    )
    print(
        f"# epsilon={args.epsilon} delta={args.delta} k={args.k} n={n} "
        f"features={args.features} rounding={args.rounding}",
        file=sys.stderr,
    )
    print(m)
    return 0


def _cmd_table1(args) -> int:
    rows = bounds.grid_rows(rounding=args.rounding)
    header = ["c", "n"] + [f"m_k{k}" for k in bounds.GRID_K_VALUES]
    _write_csv(sys.stdout, header, [[row[h] for h in header] for row in rows])
    return 0


def _cmd_tree_size(args) -> int:
    print(bounds.tree_size_estimate(args.c, args.epsilon))
    return 0


def _cmd_extract(args) -> int:
    space = _load_space_arg(args.space)
    oracle = _make_oracle(args.oracle, args, space)
    dist = (
        casestudy.uniform_distribution()
        if args.space in (None, "case-study")
        else Distribution.uniform(space.enumerate_examples())
    )
    config = ExtractionConfig(
        size_limit=args.size_limit,
        k=args.k,
        training_size=args.training_size,
        candidate_splits=tuple(enumerate_candidate_splits(space)),
        seed=args.seed,
    )
    report = trepac(oracle, config, dist)
    meta = {
        "feature_space_id": space.space_id,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "k": args.k,
        "m": args.training_size,
        "n": args.size_limit,
        "seed": args.seed,
        "model_id": args.model,
    }
    save_tree(report.tree, args.out, meta)
    header = [
        "size",
        "training_error",
        "training_misclassified",
        "termination_reason",
        "oracle_calls",
        "query_secs",
        "extract_secs",
        "seed",
        "distribution",
    ]
    row = [
        report.tree.size,
        f"{report.training_error:.6f}",
        report.training_misclassified,
        report.termination_reason,
        report.oracle_calls,
        f"{report.querying_seconds:.6f}",
        f"{report.extraction_seconds:.6f}",
        report.seed,
        report.distribution,
    ]
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as handle:
            _write_csv(handle, header, [row])
    else:
        _write_csv(sys.stdout, header, [row])
    print(render_tree(report.tree, space), file=sys.stderr)
    return 0


def _load_distribution(spec: str | None, space: FeatureSpace) -> Distribution:
    if spec in (None, "uniform"):
        if space.space_id == casestudy.SPACE_ID:
            return casestudy.uniform_distribution()
        return Distribution.uniform(space.enumerate_examples())
    examples, weights = [], []
    for line in Path(spec).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = next(csv.reader([line]))
        raw_values, weight = fields[:-1], fields[-1]
        example = space.validate_example(
            tuple(
                _coerce(space, i, v) for i, v in enumerate(raw_values)
            )
        )
        examples.append(example)
        weights.append(Fraction(weight))
    return Distribution(tuple(examples), tuple(weights))


def _coerce(space: FeatureSpace, index: int, raw: str):
    domain = space.features[index].domain
    for value in getattr(domain, "values", ()):
        if str(value) == raw:
            return value
    try:
        return int(raw)
    except ValueError:
        return raw


def _cmd_evaluate(args) -> int:
    space = _load_space_arg(args.space)
    tree, _ = load_tree(args.tree)
    oracle = _make_oracle(args.oracle, args, space)
    dist = _load_distribution(args.distribution, space)
    training = None
    if args.training_set:
        fixture = FixtureOracle.from_file(args.training_set, space)
        training = TrainingSet(
            tuple(
                ClassifiedExample(e, l) for e, l in sorted(fixture.labels.items())
            )
        )
    result = evaluate(tree, oracle, dist, training_set=training)
    header = [
        "training_error",
        "true_error",
        "true_misclassified",
        "fidelity",
        "probabilistic_fidelity",
    ]
    row = [
        "" if result.training_error is None else f"{result.training_error:.6f}",
        f"{result.true_error:.6f}",
        result.true_misclassified,
        f"{result.fidelity:.6f}",
        f"{result.probabilistic_fidelity:.6f}",
    ]
    _write_csv(sys.stdout, header, [row])
    return 0


def _cmd_validate_pac(args) -> int:
    space = casestudy.case_study_space()
    report = validate_pac(
        splits=tuple(enumerate_candidate_splits(space)),
        examples=casestudy.enumerate_examples(),
        n_internal=args.n,
        epsilon=args.epsilon,
        delta=args.delta,
        k=args.k,
        trials=args.trials,
        seed=args.seed,
        m=args.m,
        size_limit=args.size_limit,
        workers=args.workers,
    )
    header = [
        "trials",
        "failures",
        "failure_fraction",
        "tolerance",
        "passed",
        "epsilon",
        "delta",
        "k",
        "m",
        "n",
        "seed",
    ]
    row = [
        report.trials,
        report.failures,
        f"{report.failure_fraction:.6f}",
        f"{report.tolerance:.6f}",
        "PASS" if report.passed else "FAIL",
        report.epsilon,
        report.delta,
        report.k,
        report.m,
        report.n_internal,
        report.seed,
    ]
    _write_csv(sys.stdout, header, [row])
    return 0 if report.passed else 1


def _cmd_case_study(args) -> int:
    if args.grid != "default":
        raise PacTreeError(f"unknown grid {args.grid!r}; only 'default' is available")
    space = casestudy.case_study_space()
    oracle = _make_oracle(args.oracle, args, space)
    model_id = args.model or args.oracle
    casestudy.run_experiment(
        oracle,
        casestudy.default_grid(),
        seed=args.seed,
        out_dir=args.out_dir,
        model_id=model_id,
    )
    print(f"# wrote runs/aggregate/plot_data/rules CSVs under {args.out_dir}", file=sys.stderr)
    return 0


def _cmd_rules(args) -> int:
    paths: list[Path] = []
    for entry in args.trees:
        path = Path(entry)
        if path.is_dir():
            paths.extend(sorted(path.glob("*.json")))
        else:
            paths.append(path)
    if not paths:
        raise PacTreeError("no tree documents found")
    trees = [load_tree(p)[0] for p in paths]
    table = casestudy.rule_frequency(trees)
    _write_csv(
        sys.stdout,
        ["rule", "frequency", "count"],
        [[e["rule"], f"{e['frequency']:.6f}", e["count"]] for e in table],
    )
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="pactree", description=__doc__)
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="root logger level",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", help="training-set size for (epsilon, delta, k)")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, help="tree size (internal nodes)")
    p.add_argument("--c", type=float, help="derive n from this weak-learning constant")
    p.add_argument("--features", type=int, default=bounds.GRID_NUM_FEATURES)
    p.add_argument("--rounding", choices=bounds.ROUNDINGS, default="nearest")
    p.set_defaults(func=_cmd_sample_size)

    p = sub.add_parser("table1", help="the full bundled sample-size grid as CSV")
    p.add_argument("--rounding", choices=bounds.ROUNDINGS, default="nearest")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("tree-size", help="tree size n for a weak-learning constant c")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=_cmd_tree_size)

    p = sub.add_parser("extract", help="extract a tree from an oracle")
    p.add_argument("--oracle", required=True, help="tree:FILE | fixture:FILE | remote:URL")
    p.add_argument("--size-limit", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--training-size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="tree document output path")
    p.add_argument("--report", help="report CSV path (default: stdout)")
    p.add_argument("--space", help="feature-space config path or 'case-study'")
    p.add_argument("--model", help="model id for remote oracles / metadata")
    p.add_argument("--epsilon", type=float, help="recorded in the tree document")
    p.add_argument("--delta", type=float, help="recorded in the tree document")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("evaluate", help="metrics of a tree against an oracle")
    p.add_argument("--tree", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--space", help="feature-space config path or 'case-study'")
    p.add_argument("--distribution", help="'uniform' (default) or a weights CSV")
    p.add_argument("--training-set", help="labeled CSV for the training-error column")
    p.add_argument("--model", help="model id for remote oracles")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("validate-pac", help="Monte-Carlo check of the sample bound")
    p.add_argument("--n", type=int, required=True, help="target internal nodes")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, help="override the derived training size")
    p.add_argument("--size-limit", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_validate_pac)

    p = sub.add_parser("case-study", help="run the full 16-cell experiment grid")
    p.add_argument("--oracle", required=True)
    p.add_argument("--grid", default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--model", help="model id for remote oracles / output labels")
    p.set_defaults(func=_cmd_case_study)

    p = sub.add_parser("rules", help="rule-frequency table from tree documents")
    p.add_argument("trees", nargs="+", help="tree JSON files or directories")
    p.set_defaults(func=_cmd_rules)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level))
    _banner(args)
    try:
        return args.func(args)
    except OracleError as exc:
        print(f"pactree: oracle failure: {exc}", file=sys.stderr)
        return 2
    except PacTreeError as exc:
        print(f"pactree: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
