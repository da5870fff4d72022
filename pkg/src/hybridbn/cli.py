"""Command-line interface: one binary, one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data error. Reports are JSON with
sorted keys; worker count and file paths never appear in report bodies, so
outputs are byte-identical across repeated runs and across --jobs settings.
Wall-clock fields are emitted only behind --timing.
"""

import argparse
import csv
import json
import os
import sys
import time

from .data import DataError, load_csv, write_csv
from .graphs import Dag, Pdag, to_dot
from .independence import DataIndependenceSource, TestConfig
from .metrics import dag_to_cpdag, shd, skeleton_metrics
from .multilabel import SCENARIOS, MlcConfig, run_scenario
from .network import fit_cpts, forward_sample, read_network, write_network
from .scoring import ScoreConfig, Scorer, hill_climb
from .skeleton import Skeleton, build_skeleton, read_skeleton, write_skeleton

_PATH_DESTS = {
    "data", "out", "out_dir", "report", "net", "truth", "test", "skeleton",
    "learned", "export_blocks",
}


def _echo_config(args):
    # Resolved non-path configuration, for provenance inside reports.
    out = {}
    for key, value in vars(args).items():
        if key in _PATH_DESTS or key in ("func", "jobs", "timing") or callable(value):
            continue
        out[key] = value
    return out


def _write_json(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _test_cfg(args):
    return TestConfig(
        alpha=args.alpha,
        power_threshold=args.power_threshold,
        max_condset=args.max_condset,
        power_cells=args.power_cells,
    )


def _score_cfg(args):
    return ScoreConfig(
        score=args.score,
        ess=args.ess,
        tabu_length=args.tabu,
        patience=args.patience,
    )


def _add_test_flags(p):
    p.add_argument("--alpha", type=float, default=0.05,
                   help="type-I level of the independence test")
    p.add_argument("--power-threshold", type=float, default=5.0,
                   help="minimum average sample per contingency cell")
    p.add_argument("--max-condset", type=int, default=None,
                   help="cap on conditioning-set size in the PC search")
    p.add_argument("--power-cells", choices=("nominal", "observed"),
                   default="nominal",
                   help="cell count semantics of the power rule")


def _add_score_flags(p):
    p.add_argument("--score", choices=("bdeu", "bic"), default="bdeu")
    p.add_argument("--ess", type=float, default=10.0,
                   help="equivalent sample size of the BDeu prior")
    p.add_argument("--tabu", type=int, default=100,
                   help="length of the structure TABU list")
    p.add_argument("--patience", type=int, default=15,
                   help="moves without improvement before stopping")


def _default_jobs():
    raw = os.environ.get("HYBRIDBN_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_jobs_flag(p):
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker threads (affects wall time only)")


def _dag_skeleton(dag):
    pairs = {(u, v) if u < v else (v, u) for u, v in dag.edges()}
    return Skeleton(d=dag.d, edges=frozenset(pairs))


def cmd_sample(args):
    net = read_network(args.net)
    if args.sizes:
        if not args.out_dir:
            raise _Usage("--sizes requires --out-dir")
        sizes = _parse_sizes(args.sizes)
        os.makedirs(args.out_dir, exist_ok=True)
        for size in sizes:
            ds = forward_sample(net, size, seed=[args.seed, size])
            write_csv(ds, os.path.join(args.out_dir, f"sample_{size}.csv"))
        return 0
    if args.n is None or not args.out:
        raise _Usage("either --sizes with --out-dir, or --n with --out")
    write_csv(forward_sample(net, args.n, seed=args.seed), args.out)
    return 0


def _parse_sizes(raw):
    try:
        sizes = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise _Usage(f"bad --sizes list: {raw!r}") from None
    if not sizes or any(s < 0 for s in sizes):
        raise _Usage(f"bad --sizes list: {raw!r}")
    return sizes


def cmd_learn_skeleton(args):
    data = load_csv(args.data, delimiter=args.delimiter)
    src = DataIndependenceSource(data, _test_cfg(args))
    skel = build_skeleton(src, src.cfg, jobs=args.jobs)
    write_skeleton(skel, data.names, args.out)
    return 0


def cmd_learn(args):
    data = load_csv(args.data, delimiter=args.delimiter)
    started = time.perf_counter()
    if args.skeleton:
        skel, names = read_skeleton(args.skeleton)
        if tuple(names) != data.names:
            raise DataError("skeleton variables do not match the dataset")
    else:
        src = DataIndependenceSource(data, _test_cfg(args))
        skel = build_skeleton(src, src.cfg, jobs=args.jobs)
    report = {
        "config": _echo_config(args),
        "n": data.n,
        "d": data.d,
        "skeleton_edges": len(skel.edges),
    }
    if args.skeleton_only:
        write_skeleton(skel, data.names, args.out)
        report["phase"] = "skeleton"
    else:
        result = hill_climb(data, skel, _score_cfg(args))
        net = fit_cpts(result.dag, data, laplace=args.laplace)
        write_network(net, args.out)
        report.update(
            phase="search",
            dag_edges=result.dag.edge_count(),
            score=result.score,
            empty_score=result.empty_score,
            moves=result.moves,
        )
    if args.timing:
        report["seconds"] = time.perf_counter() - started
    if args.report:
        _write_json(report, args.report)
    return 0


def cmd_evaluate(args):
    learned = read_network(args.learned)
    truth = read_network(args.truth)
    if learned.names != truth.names:
        raise DataError("learned and truth networks name different variables")
    sm = skeleton_metrics(_dag_skeleton(learned.graph), _dag_skeleton(truth.graph))
    report = {
        "config": _echo_config(args),
        "skeleton": {
            "tp": sm.tp, "fp": sm.fp, "fn": sm.fn,
            "precision": sm.precision, "recall": sm.recall,
            "fpr": sm.fpr, "euclidean": sm.euclidean,
        },
        "shd": shd(dag_to_cpdag(learned.graph), dag_to_cpdag(truth.graph)),
    }
    if args.test:
        test = load_csv(args.test, delimiter=args.delimiter)
        if test.names != learned.names:
            raise DataError("test data columns do not match the networks")
        if test.arities != learned.arities:
            raise DataError("test data arities do not match the networks")
        scores = {}
        for tag, g in (("learned", learned.graph), ("truth", truth.graph)):
            scores[tag] = {
                "bdeu": Scorer(test, ScoreConfig(score="bdeu", ess=args.ess)).total(g),
                "bic": Scorer(test, ScoreConfig(score="bic")).total(g),
            }
        empty = Dag(test.d)
        scores["empty"] = {
            "bdeu": Scorer(test, ScoreConfig(score="bdeu", ess=args.ess)).total(empty),
            "bic": Scorer(test, ScoreConfig(score="bic")).total(empty),
        }
        report["scores"] = scores
    _write_json(report, args.report)
    return 0


_BENCH_COLUMNS = [
    "size", "repeat", "tp", "fp", "fn", "precision", "recall", "fpr",
    "euclidean", "shd", "skeleton_edges", "dag_edges", "moves",
    "bdeu_train", "bdeu_test", "bic_train", "bic_test", "bdeu_empty_test",
]


def cmd_benchmark(args):
    net = read_network(args.truth)
    truth_skel = _dag_skeleton(net.graph)
    truth_cpdag = dag_to_cpdag(net.graph)
    sizes = _parse_sizes(args.sizes)
    test_cfg = _test_cfg(args)
    score_cfg = _score_cfg(args)
    rows = []
    empty = Dag(net.d)
    for si, size in enumerate(sizes):
        for rep in range(args.repeats):
            train = forward_sample(net, size, seed=[args.seed, si, rep, 0])
            test = forward_sample(net, args.test_n, seed=[args.seed, si, rep, 1])
            src = DataIndependenceSource(train, test_cfg)
            skel = build_skeleton(src, test_cfg, jobs=args.jobs)
            result = hill_climb(train, skel, score_cfg)
            sm = skeleton_metrics(skel, truth_skel)
            bdeu_train = Scorer(train, ScoreConfig(score="bdeu", ess=args.ess))
            bdeu_test = Scorer(test, ScoreConfig(score="bdeu", ess=args.ess))
            bic_train = Scorer(train, ScoreConfig(score="bic"))
            bic_test = Scorer(test, ScoreConfig(score="bic"))
            rows.append({
                "size": size,
                "repeat": rep,
                "tp": sm.tp, "fp": sm.fp, "fn": sm.fn,
                "precision": sm.precision, "recall": sm.recall,
                "fpr": sm.fpr, "euclidean": sm.euclidean,
                "shd": shd(dag_to_cpdag(result.dag), truth_cpdag),
                "skeleton_edges": len(skel.edges),
                "dag_edges": result.dag.edge_count(),
                "moves": result.moves,
                "bdeu_train": bdeu_train.total(result.dag),
                "bdeu_test": bdeu_test.total(result.dag),
                "bic_train": bic_train.total(result.dag),
                "bic_test": bic_test.total(result.dag),
                "bdeu_empty_test": bdeu_test.total(empty),
            })
    if args.out.endswith(".csv"):
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=_BENCH_COLUMNS,
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    else:
        _write_json({"config": _echo_config(args), "rows": rows}, args.out)
    return 0


def cmd_mlc(args):
    data = load_csv(args.data, delimiter=args.delimiter)
    if args.labels:
        names = [tok.strip() for tok in args.labels.split(",") if tok.strip()]
        if not names:
            raise _Usage("--labels lists no columns")
        labels = [data.column_index(name) for name in names]
    elif args.label_count:
        if not 0 < args.label_count < data.d:
            raise _Usage("--label-count out of range")
        labels = list(range(data.d - args.label_count, data.d))
    else:
        raise _Usage("one of --labels or --label-count is required")
    cfg = MlcConfig(
        folds=args.folds,
        seed=args.seed,
        test=_test_cfg(args),
        score=_score_cfg(args),
        smoothing=args.smoothing,
        binarize=args.binarize,
        jobs=args.jobs,
        export_dir=args.export_blocks,
        timing=args.timing,
    )
    report = run_scenario(data, labels, args.scenario, cfg)
    report["config"] = _echo_config(args)
    _write_json(report, args.report)
    return 0


def cmd_export_dot(args):
    if bool(args.net) == bool(args.skeleton):
        raise _Usage("exactly one of --net or --skeleton is required")
    if args.net:
        net = read_network(args.net)
        if args.cpdag:
            graph = dag_to_cpdag(net.graph)
        else:
            graph = net.graph
        dot = to_dot(graph, net.names)
    else:
        skel, names = read_skeleton(args.skeleton)
        pdag = Pdag(skel.d, undirected=sorted(skel.edges))
        dot = to_dot(pdag, names)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dot)
    return 0


class _Usage(Exception):
    """Bad flag combination detected after parsing."""


class _Parser(argparse.ArgumentParser):
    # the contract reserves exit code 2 for data errors; argparse uses it
    # for usage errors by default
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser():
    root = _Parser(prog="hybridbn", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[], help="draw rows from a network")
    p.add_argument("--net", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--sizes", default=None,
                   help="comma list; one CSV per size into --out-dir")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("learn-skeleton", help="constraint-based skeleton only")
    p.add_argument("--data", required=True)
    p.add_argument("--delimiter", default=",")
    _add_test_flags(p)
    _add_jobs_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_learn_skeleton)

    p = sub.add_parser("learn", help="full hybrid structure learning")
    p.add_argument("--data", required=True)
    p.add_argument("--delimiter", default=",")
    _add_test_flags(p)
    _add_score_flags(p)
    _add_jobs_flag(p)
    p.add_argument("--skeleton", default=None,
                   help="reuse a previously learned skeleton JSON")
    p.add_argument("--skeleton-only", action="store_true",
                   help="stop after the constraint phase; --out gets the skeleton")
    p.add_argument("--laplace", type=float, default=0.0,
                   help="CPT smoothing when fitting the learned network")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("evaluate", help="compare a learned network to truth")
    p.add_argument("--learned", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--test", default=None)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--ess", type=float, default=10.0)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="size sweep with repeats")
    p.add_argument("--truth", required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--test-n", type=int, default=10000)
    _add_test_flags(p)
    _add_score_flags(p)
    _add_jobs_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("mlc", help="multi-label cross-validation experiment")
    p.add_argument("--data", required=True)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--labels", default=None,
                   help="comma list of label column names")
    p.add_argument("--label-count", type=int, default=None,
                   help="use the trailing N columns as labels")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--binarize", action="store_true",
                   help="median-split non-label columns with arity > 2")
    _add_test_flags(p)
    _add_score_flags(p)
    _add_jobs_flag(p)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--export-blocks", default=None,
                   help="directory for per-block train/test CSV exports")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_mlc)

    p = sub.add_parser("export-dot", help="DOT rendering of a graph file")
    p.add_argument("--net", default=None)
    p.add_argument("--skeleton", default=None)
    p.add_argument("--cpdag", action="store_true",
                   help="emit the equivalence class of --net")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_dot)

    return root


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
