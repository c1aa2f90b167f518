"""Prediction metrics and the cross-validated next-k experiment."""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InputError, InvariantError, SeqSubError, UndefinedMetricError
from .hypergraph import is_subsequence
from .io import SCHEMA_VERSION
from .ingest import Corpus, ModelTrainer, TrainConfig, count_subsequences, split_folds
from .solvers import (SolveConfig, frequency_baseline, hyper_sequence_greedy_forward,
                      sequence_greedy_forward)
from .utility import CoverageUtility

log = logging.getLogger(__name__)

EXPERIMENT_ALGORITHMS = ("hyper-sequence-greedy", "sequence-greedy", "frequency")


def ordered_pairs(sigma: Sequence) -> list[tuple]:
    """Every ``(sigma[i], sigma[j])`` with ``i < j``, in lexicographic index order."""
    return [(sigma[i], sigma[j]) for i in range(len(sigma)) for j in range(i + 1, len(sigma))]


def tau_accuracy(predicted: Sequence, actual: Sequence) -> float:
    """Fraction of the ordered pairs of ``actual`` that ``predicted`` also orders the same way."""
    truth = set(ordered_pairs(actual))
    if not truth:
        raise UndefinedMetricError(f"need at least 2 actual items, got {len(actual)}")
    return len(truth & set(ordered_pairs(predicted))) / len(truth)


@dataclass(frozen=True)
class CourseValueReport:
    value: float
    n_users: int
    sigma: tuple


def course_value(sigma: Sequence, test_users: Mapping[str, tuple[Sequence, Mapping]],
                 d: float) -> CourseValueReport:
    """Mean completion of ``sigma``'s courses among users who started all of them in order,
    shrunk by ``d``.

    ``test_users`` maps a user to ``(courses ordered by start time, {course: completion})``
    with completion fractions in [0, 1].
    """
    sigma = tuple(sigma)
    if not sigma:
        raise InputError("course_value needs a non-empty sequence")
    total = 0.0
    matched = 0
    for order, completion in test_users.values():
        if is_subsequence(sigma, tuple(order)):
            matched += 1
            for c in sigma:
                frac = completion.get(c, 0.0)
                if not 0.0 <= frac <= 1.0:
                    raise InputError(f"completion {frac} outside [0, 1]")
                total += frac
    denom = (matched + d) * len(sigma)
    value = total / denom if denom > 0 else 0.0
    return CourseValueReport(value, matched, sigma)


@dataclass
class EvalReport:
    fold: int
    algorithm: str
    k: int
    per_user_tau: dict[str, float] = field(default_factory=dict)
    per_user_objective: dict[str, float] = field(default_factory=dict)
    per_user_prediction: dict[str, list[int]] = field(default_factory=dict)
    skipped: int = 0
    n_train_users: int = 0
    n_train_events: int = 0
    error: str | None = None

    @property
    def mean_tau(self) -> float:
        vals = list(self.per_user_tau.values())
        return math.fsum(vals) / len(vals) if vals else math.nan

    @property
    def mean_objective(self) -> float:
        vals = list(self.per_user_objective.values())
        return math.fsum(vals) / len(vals) if vals else math.nan

    def to_dict(self) -> dict:
        d = asdict(self)
        # NaN (no scored users) is not valid JSON
        d["mean_tau"] = None if math.isnan(self.mean_tau) else self.mean_tau
        d["mean_objective"] = None if math.isnan(self.mean_objective) else self.mean_objective
        return d


@dataclass(frozen=True)
class ExperimentConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    ks: tuple[int, ...] = (5,)
    prefix_len: int = 8
    algorithms: tuple[str, ...] = EXPERIMENT_ALGORITHMS
    # the pairwise solver stops one vertex short for odd k unless topped up
    fill_pairwise: bool = True
    seed: int = 0


def _predict(algorithm, model, h, k, history, pair_graph, pair_h, fill_pairwise):
    if algorithm == "hyper-sequence-greedy":
        return hyper_sequence_greedy_forward(model.graph, h, SolveConfig(k, fill_to_k=True), history)
    if algorithm == "sequence-greedy":
        return sequence_greedy_forward(pair_graph, pair_h, SolveConfig(k, fill_to_k=fill_pairwise), history)
    if algorithm == "frequency":
        return frequency_baseline(model.graph, h, k, history)
    raise InputError(f"unknown experiment algorithm {algorithm!r}")


def run_fold(corpus: Corpus, xcfg: ExperimentConfig, fold: int, train_users: Sequence[str],
             test_users: Sequence[str]) -> list[EvalReport]:
    reports = {(a, k): EvalReport(fold, a, k) for a in xcfg.algorithms for k in xcfg.ks}
    try:
        overlap = set(train_users) & set(test_users)
        if overlap:
            raise InvariantError(f"fold {fold}: users in both train and test: {sorted(overlap)[:5]}")
        train_seqs = [corpus.sequences[u] for u in train_users]
        counts = count_subsequences(train_seqs, xcfg.train.max_edge_size)
        n_events = sum(len(s) for s in train_seqs)
        # leak check: the counts must account for exactly the training events
        singles = sum(c for s, c in counts.items() if len(s) == 1)
        if counts[()] != len(train_users) or singles != n_events:
            raise InvariantError(f"fold {fold}: counts do not match the training users")
        trainer = ModelTrainer(counts, xcfg.train, corpus.n, corpus.items)
        # the pairwise view keeps the same edges for every user, only values change
        pair_ids = [e.id for e in trainer.structure.edges if len(e) <= 2]
        pair_structure = trainer.structure.subgraph(2)
        for rep in reports.values():
            rep.n_train_users = len(train_users)
            rep.n_train_events = n_events
        for user in sorted(test_users):
            seq = corpus.sequences[user]
            history = seq[: xcfg.prefix_len]
            model = trainer.build(history)
            h = CoverageUtility.from_hypergraph(model.graph)
            pair_graph = pair_structure.with_values([model.graph.edges[i].value for i in pair_ids])
            pair_h = CoverageUtility.from_hypergraph(pair_graph)
            for k in xcfg.ks:
                actual = seq[xcfg.prefix_len: xcfg.prefix_len + k]
                for algorithm in xcfg.algorithms:
                    rep = reports[(algorithm, k)]
                    if len(actual) < 2:
                        rep.skipped += 1
                        continue
                    sr = _predict(algorithm, model, h, k, history, pair_graph, pair_h, xcfg.fill_pairwise)
                    predicted = list(sr.added)
                    rep.per_user_tau[user] = tau_accuracy(predicted, actual)
                    rep.per_user_objective[user] = sr.objective
                    rep.per_user_prediction[user] = predicted
    except SeqSubError as exc:
        log.error("fold %d failed: %s", fold, exc)
        for rep in reports.values():
            rep.error = f"{type(exc).__name__}: {exc}"
    return list(reports.values())


def _run_fold_args(args):
    return run_fold(*args)


def run_experiment(corpus: Corpus, xcfg: ExperimentConfig, workers: int = 1) -> list[EvalReport]:
    """Cross-validated next-k prediction.

    For every fold the model is counted on the training users only.  Each test
    user's first ``prefix_len`` items seed a personalised model and the solver
    sequence; the ``k`` items added are scored with :func:`tau_accuracy`
    against the user's actual next ``k`` items.  Users with fewer than two
    items after the prefix are skipped and counted.  Output order is
    ``(fold, algorithm, k)`` whatever ``workers`` is.
    """
    folds = split_folds(corpus, xcfg.train.folds, xcfg.seed)
    jobs = [(corpus, xcfg, f, tr, te) for f, (tr, te) in enumerate(folds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_fold_args, jobs))
    else:
        results = [_run_fold_args(j) for j in jobs]
    out = [rep for fold in results for rep in fold]
    order = {a: i for i, a in enumerate(xcfg.algorithms)}
    out.sort(key=lambda r: (r.fold, order[r.algorithm], r.k))
    return out


def accuracy_table(reports: Iterable[EvalReport]) -> list[dict]:
    """Pooled mean tau and objective per (k, algorithm), averaging over users."""
    pooled: dict[tuple[int, str], tuple[list, list]] = {}
    for rep in reports:
        taus, objs = pooled.setdefault((rep.k, rep.algorithm), ([], []))
        taus.extend(rep.per_user_tau.values())
        objs.extend(rep.per_user_objective.values())
    rows = []
    for (k, algorithm), (taus, objs) in sorted(pooled.items()):
        rows.append({
            "k": k,
            "algorithm": algorithm,
            "mean_tau": math.fsum(taus) / len(taus) if taus else math.nan,
            "mean_objective": math.fsum(objs) / len(objs) if objs else math.nan,
            "users": len(taus),
        })
    return rows


def write_reports_csv(path, reports: Iterable[EvalReport]) -> None:
    """One row per (fold, algorithm, k, user)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["fold", "algorithm", "k", "user", "tau", "objective", "prediction"])
        for rep in reports:
            for user in sorted(rep.per_user_tau):
                w.writerow([rep.fold, rep.algorithm, rep.k, user, repr(rep.per_user_tau[user]),
                            repr(rep.per_user_objective[user]),
                            ";".join(map(str, rep.per_user_prediction[user]))])


def write_reports_json(path, reports: Iterable[EvalReport]) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "reports": [r.to_dict() for r in reports]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_plot_csv(path, reports: Iterable[EvalReport]) -> None:
    rows = accuracy_table(reports)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["k", "algorithm", "mean_tau", "mean_objective", "users"])
        w.writeheader()
        w.writerows(rows)
