"""Multi-label classification through minimal label-powerset decomposition.

Labels that are adjacent in the graph or act as co-parents of a feature must
be predicted jointly; connected components of that auxiliary relation are
the minimal blocks. Each block gets an independent multi-class classifier
over its (optionally Markov-boundary-restricted) feature set, and the joint
most probable explanation factorizes over blocks.
"""

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import CategoricalDataset, kfold, parse_numeric_column
from .graphs import markov_sets
from .independence import DataIndependenceSource, TestConfig
from .scoring import ScoreConfig, hill_climb
from .skeleton import build_skeleton, hpc

SCENARIOS = ("br", "br+mb", "mlp", "mlp+mb")


@dataclass(frozen=True)
class LabelPowersetDecomposition:
    """Disjoint label blocks covering the label set, with per-block
    feature boundaries."""

    blocks: tuple
    boundaries: tuple


def minimal_label_powersets(g, labels):
    """Connected components of the auxiliary graph on labels.

    Two labels are linked when they are adjacent in g or when some feature
    node is a common child of both (a collider between them). Blocks are
    sorted by smallest member.
    """
    labels = sorted(set(labels))
    label_set = set(labels)
    adj = {y: set() for y in labels}
    for i, p in enumerate(labels):
        ch_p = set(g.children(p))
        for q in labels[i + 1:]:
            linked = g.adjacent(p, q)
            if not linked:
                common = ch_p & set(g.children(q))
                linked = bool(common - label_set)
            if linked:
                adj[p].add(q)
                adj[q].add(p)
    blocks = []
    seen = set()
    for y in labels:
        if y in seen:
            continue
        comp = []
        stack = [y]
        seen.add(y)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        blocks.append(tuple(sorted(comp)))
    return [b for b in sorted(blocks)]


def powerset_markov_boundary(g, block, labels):
    """Union of pc and sp over the block's members, minus every label node."""
    ms = markov_sets(g)
    out = set()
    for y in block:
        out |= ms.pc[y] | ms.sp[y]
    return frozenset(out - set(labels))


class PowersetClassifier:
    """Laplace-smoothed naive Bayes over a block's feature set.

    Classes are the distinct label combinations observed in training,
    ordered lexicographically; ties in prediction resolve to the smallest
    combination.
    """

    __slots__ = ("block", "features", "classes", "log_prior", "log_like", "smoothing")

    def __init__(self, block, features, classes, log_prior, log_like, smoothing):
        self.block = block
        self.features = features
        self.classes = classes
        self.log_prior = log_prior
        self.log_like = log_like
        self.smoothing = smoothing

    def log_scores(self, rows):
        """Unnormalized log posterior of each class for each row."""
        rows = np.asarray(rows)
        scores = np.repeat(self.log_prior[None, :], len(rows), axis=0)
        for t, f in enumerate(self.features):
            scores += self.log_like[t][:, rows[:, f]].T
        return scores

    def predict(self, rows):
        """Most probable class combination per row, shape (n, len(block))."""
        idx = np.argmax(self.log_scores(rows), axis=1)
        return np.asarray(self.classes, dtype=np.int32)[idx]


def fit_powerset_classifier(train, block, features, smoothing=1.0):
    """Estimate p(class | features) for one block from training rows."""
    block = tuple(sorted(block))
    features = tuple(sorted(features))
    if not block:
        raise ValueError("empty block")
    if set(block) & set(features):
        raise ValueError("features must be disjoint from the block's labels")
    if smoothing < 0:
        raise ValueError("smoothing must be non-negative")
    sub = train.rows[:, list(block)]
    classes, y = np.unique(sub, axis=0, return_inverse=True)
    y = y.ravel()
    k = len(classes)
    n_c = np.bincount(y, minlength=k).astype(float)
    log_prior = np.log(n_c / train.n)
    log_like = []
    with np.errstate(divide="ignore"):
        for f in features:
            a = train.arity(f)
            counts = np.bincount(y * a + train.rows[:, f], minlength=k * a)
            counts = counts.reshape(k, a).astype(float) + smoothing
            log_like.append(np.log(counts / counts.sum(axis=1, keepdims=True)))
    return PowersetClassifier(
        block=block,
        features=features,
        classes=tuple(tuple(int(v) for v in row) for row in classes),
        log_prior=log_prior,
        log_like=log_like,
        smoothing=smoothing,
    )


def predict_mpe(classifiers, row):
    """Joint most probable label assignment for one row.

    The blocks must be disjoint; the prediction is the concatenation of the
    per-block argmax combinations, returned as {label index: value}.
    """
    seen = set()
    for clf in classifiers:
        overlap = seen & set(clf.block)
        if overlap:
            raise ValueError(f"blocks overlap on {sorted(overlap)}")
        seen |= set(clf.block)
    row = np.asarray(row).reshape(1, -1)
    out = {}
    for clf in classifiers:
        combo = clf.predict(row)[0]
        for lbl, val in zip(clf.block, combo):
            out[lbl] = int(val)
    return out


def _predict_matrix(classifiers, rows, label_order):
    col_of = {lbl: j for j, lbl in enumerate(label_order)}
    pred = np.zeros((len(rows), len(label_order)), dtype=np.int32)
    for clf in classifiers:
        vals = clf.predict(rows)
        for t, lbl in enumerate(clf.block):
            pred[:, col_of[lbl]] = vals[:, t]
    return pred


def global_accuracy(pred, truth):
    """Fraction of rows whose predicted labels all match (subset accuracy)."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth shapes differ")
    if pred.shape[0] == 0:
        raise ValueError("no rows to score")
    return float(np.all(pred == truth, axis=1).mean())


def learn_local_dag(data, labels, test_cfg=None, score_cfg=None, jobs=1):
    """Learn a DAG around the label set only.

    Discovery runs outward once: hpc around each label over the full
    universe, then hpc around the discovered neighbors (one expansion
    ring). The AND-rule skeleton is built within that ring and handed to
    the constrained hill climber; nodes outside the ring stay isolated.
    """
    test_cfg = test_cfg or TestConfig()
    score_cfg = score_cfg or ScoreConfig()
    labels = sorted(set(labels))
    src = DataIndependenceSource(data, test_cfg)

    def neighborhoods(targets):
        if jobs > 1 and len(targets) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(lambda t: hpc(t, src, None, test_cfg), targets))
        return [hpc(t, src, None, test_cfg) for t in targets]

    ring = set(labels)
    for found in neighborhoods(labels):
        ring |= found
    fringe = sorted(ring - set(labels))
    for found in neighborhoods(fringe):
        ring |= found
    skel = build_skeleton(src, test_cfg, jobs=jobs, universe=sorted(ring))
    return hill_climb(data, skel, score_cfg).dag


@dataclass(frozen=True)
class MlcConfig:
    folds: int = 10
    seed: int = 0
    test: TestConfig = field(default_factory=TestConfig)
    score: ScoreConfig = field(default_factory=ScoreConfig)
    smoothing: float = 1.0
    binarize: bool = False
    jobs: int = 1
    export_dir: str | None = None
    timing: bool = False


def _binarize_for_fold(data, train_idx, labels):
    # Median split of every non-label column with arity > 2, medians taken
    # from the training rows only; binary columns are left alone.
    rows = np.array(data.rows)
    levels = list(data.levels)
    label_set = set(labels)
    changed = False
    for col in range(data.d):
        if col in label_set or data.arity(col) <= 2:
            continue
        numeric = parse_numeric_column(data, col)
        med = float(np.median(numeric[train_idx]))
        rows[:, col] = (numeric > med).astype(np.int32)
        levels[col] = ("le_median", "gt_median")
        changed = True
    if not changed:
        return data
    return CategoricalDataset(data.names, tuple(levels), rows)


def _export_block(directory, fold, bix, dataset, rows_idx, block, features, tag):
    cols = list(features) + list(block)
    path = os.path.join(directory, f"fold{fold:02d}_block{bix:02d}_{tag}.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([dataset.names[c] for c in cols])
        for i in rows_idx:
            writer.writerow(
                [dataset.levels[c][dataset.rows[i, c]] for c in cols]
            )


def run_scenario(data, labels, scenario, cfg=None):
    """Cross-validated multi-label experiment for one scenario.

    br: one block per label, all features. br+mb: one block per label,
    features restricted to the label's Markov boundary in the learned local
    DAG. mlp: minimal label powersets, all features. mlp+mb: minimal label
    powersets with per-block boundaries.
    """
    cfg = cfg or MlcConfig()
    key = scenario.strip().lower()
    if key not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; pick one of {SCENARIOS}")
    labels = sorted(set(labels))
    if not labels:
        raise ValueError("at least one label column is required")
    for y in labels:
        if not 0 <= y < data.d:
            raise ValueError(f"label index {y} out of range")
    all_features = [v for v in range(data.d) if v not in set(labels)]
    folds = kfold(data.n, cfg.folds, cfg.seed)
    needs_graph = key != "br"

    def run_fold(f):
        started = time.perf_counter()
        train_idx = folds.train_indices(f)
        test_idx = folds.test_indices(f)
        fold_data = (
            _binarize_for_fold(data, train_idx, labels) if cfg.binarize else data
        )
        train = fold_data.subset_rows(train_idx)
        if needs_graph:
            dag = learn_local_dag(train, labels, cfg.test, cfg.score, jobs=1)
        if key == "br":
            blocks = [(y,) for y in labels]
            feats = [tuple(all_features)] * len(blocks)
        elif key == "br+mb":
            blocks = [(y,) for y in labels]
            feats = [
                tuple(sorted(powerset_markov_boundary(dag, b, labels)))
                for b in blocks
            ]
        elif key == "mlp":
            blocks = [tuple(b) for b in minimal_label_powersets(dag, labels)]
            feats = [tuple(all_features)] * len(blocks)
        else:
            blocks = [tuple(b) for b in minimal_label_powersets(dag, labels)]
            feats = [
                tuple(sorted(powerset_markov_boundary(dag, b, labels)))
                for b in blocks
            ]
        classifiers = [
            fit_powerset_classifier(train, b, fs, cfg.smoothing)
            for b, fs in zip(blocks, feats)
        ]
        test_rows = fold_data.rows[test_idx]
        pred = _predict_matrix(classifiers, test_rows, labels)
        acc = global_accuracy(pred, test_rows[:, labels])
        if cfg.export_dir:
            os.makedirs(cfg.export_dir, exist_ok=True)
            for bix, (b, fs) in enumerate(zip(blocks, feats)):
                _export_block(cfg.export_dir, f, bix, fold_data, train_idx, b, fs, "train")
                _export_block(cfg.export_dir, f, bix, fold_data, test_idx, b, fs, "test")
        sizes = [len(b) for b in blocks]
        report = {
            "fold": f,
            "accuracy": acc,
            "n_blocks": len(blocks),
            "blocks": [[data.names[y] for y in b] for b in blocks],
            "boundary_sizes": [len(fs) for fs in feats],
            "labels_per_block": {
                "min": min(sizes),
                "median": float(np.median(sizes)),
                "max": max(sizes),
            },
        }
        if cfg.timing:
            report["seconds"] = time.perf_counter() - started
        return report

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            fold_reports = list(pool.map(run_fold, range(cfg.folds)))
    else:
        fold_reports = [run_fold(f) for f in range(cfg.folds)]
    accs = np.array([r["accuracy"] for r in fold_reports])
    nblocks = np.array([r["n_blocks"] for r in fold_reports])
    return {
        "scenario": key,
        "labels": [data.names[y] for y in labels],
        "folds": fold_reports,
        "accuracy_mean": float(accs.mean()),
        "accuracy_sd": float(accs.std()),
        "n_blocks": {
            "min": int(nblocks.min()),
            "median": float(np.median(nblocks)),
            "max": int(nblocks.max()),
        },
    }
