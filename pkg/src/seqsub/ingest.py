"""Turn timestamped interaction logs into a conditional-probability hypergraph.

Each retained item tuple ``s`` becomes a hyperedge whose value estimates the
probability of consuming ``s[-1]`` after the rest of ``s``::

    p_s = N_s / (N_{s'} + d)            if s' is contained in the history
    p_s = p_{s'} * N_s / (N_{s'} + d)   otherwise

where ``s'`` is ``s`` without its last item, ``N_s`` counts training users
whose sequence contains ``s`` in order, ``N_() = |train users|`` and
``p_() = 1``.  Containment is order-preserving and need not be contiguous.
"""
from __future__ import annotations

import csv
import itertools
import json
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, InputError, InvariantError, LogFormatError
from .hypergraph import DirectedHypergraph
from .io import SCHEMA_VERSION, HypergraphFile, write_json

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interaction:
    user: str
    item: str
    timestamp: float
    order: int  # position in the source file, breaks timestamp ties


@dataclass
class InteractionLog:
    records: list[Interaction]

    @classmethod
    def from_tuples(cls, rows: Iterable[tuple]) -> "InteractionLog":
        """Build from ``(user, item, timestamp)`` tuples, e.g. in tests."""
        return cls([Interaction(str(u), str(i), float(t), n) for n, (u, i, t) in enumerate(rows)])

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class TrainConfig:
    max_edge_size: int = 3
    d: float = 20.0
    min_user_events: int = 0
    max_user_events: int | None = None
    min_item_events: int = 0
    # tuples observed for fewer users than this get no edge
    min_support: int = 2
    folds: int = 10

    def __post_init__(self):
        if self.max_edge_size < 1:
            raise ConfigError(f"max_edge_size must be >= 1, got {self.max_edge_size}")
        if not self.d >= 0:
            raise ConfigError(f"d must be nonnegative, got {self.d}")
        if self.min_support < 1:
            raise ConfigError(f"min_support must be >= 1, got {self.min_support}")
        if self.max_user_events is not None and self.max_user_events < self.min_user_events:
            raise ConfigError("max_user_events is below min_user_events")


@dataclass
class Corpus:
    """Per-user item sequences over a dense item vocabulary."""

    sequences: dict[str, tuple[int, ...]]
    items: list[str]

    @property
    def n(self) -> int:
        return len(self.items)

    def users(self) -> list[str]:
        return sorted(self.sequences)


def parse_timestamp(text: str) -> float:
    """Integer/float epoch seconds or an ISO-8601 string (naive means UTC)."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def read_log(path, user_col: str = "user", item_col: str = "item",
             time_col: str = "timestamp") -> InteractionLog:
    """Read a headed CSV of interactions.

    Raises :class:`LogFormatError` carrying the 1-based line number of the
    first bad row, or with no line for an empty/headerless file.
    """
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LogFormatError(f"{path}: empty file")
        header = [h.strip() for h in header]
        try:
            cols = [header.index(c) for c in (user_col, item_col, time_col)]
        except ValueError:
            raise LogFormatError(
                f"{path}: header must contain {user_col!r}, {item_col!r}, {time_col!r}; got {header}",
                line=1,
            ) from None
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise LogFormatError(f"expected {width} fields, got {len(row)}", line=lineno)
            user, item, ts = (row[c].strip() for c in cols)
            if not user or not item:
                raise LogFormatError("empty user or item", line=lineno)
            try:
                t = parse_timestamp(ts)
            except ValueError:
                raise LogFormatError(f"bad timestamp {ts!r}", line=lineno) from None
            records.append(Interaction(user, item, t, len(records)))
    if not records:
        raise LogFormatError(f"{path}: no interaction rows")
    return InteractionLog(records)


def _item_key(name: str):
    try:
        return (0, int(name), name)
    except ValueError:
        return (1, 0, name)


def extract_user_sequences(interactions: InteractionLog, cfg: TrainConfig) -> Corpus:
    """Group by user, order by time, drop repeats, then apply activity filters.

    Repeated (user, item) pairs keep their earliest occurrence.  Users are
    filtered on length first, then rare items are removed, as in the usual
    MovieLens preprocessing.  Users left with no items are dropped.
    """
    by_user: dict[str, list[Interaction]] = {}
    for rec in interactions.records:
        by_user.setdefault(rec.user, []).append(rec)

    seqs: dict[str, list[str]] = {}
    for user, recs in by_user.items():
        recs.sort(key=lambda r: (r.timestamp, r.order))
        seen = set()
        items = []
        for r in recs:
            if r.item not in seen:
                seen.add(r.item)
                items.append(r.item)
        if len(items) < cfg.min_user_events:
            continue
        if cfg.max_user_events is not None and len(items) > cfg.max_user_events:
            continue
        seqs[user] = items

    popularity = Counter(i for items in seqs.values() for i in items)
    kept = {i for i, c in popularity.items() if c >= cfg.min_item_events}
    vocab = sorted(kept, key=_item_key)
    index = {name: v for v, name in enumerate(vocab)}
    out = {}
    for user, items in seqs.items():
        seq = tuple(index[i] for i in items if i in index)
        if seq:
            out[user] = seq
    log.info("extracted %d users over %d items", len(out), len(vocab))
    return Corpus(out, vocab)


def count_subsequences(sequences: Iterable[Sequence[int]], max_edge_size: int) -> Counter:
    """``N_s`` for every ordered tuple of length ``1..max_edge_size`` that occurs
    (not necessarily contiguously) in at least one sequence; ``N_()`` is the
    number of sequences."""
    counts: Counter = Counter()
    users = 0
    for seq in sequences:
        users += 1
        seq = tuple(seq)
        distinct = len(set(seq)) == len(seq)
        for size in range(1, max_edge_size + 1):
            combos = itertools.combinations(seq, size)
            counts.update(combos if distinct else set(combos))
    counts[()] = users
    return counts


@dataclass
class TrainedModel:
    graph: DirectedHypergraph
    counts: Counter
    tuples: list[tuple[int, ...]]  # item tuple behind each edge id
    cfg: TrainConfig
    history: tuple[int, ...] | None = None
    labels: list[str] | None = None

    def probability(self, s: Sequence[int]) -> float:
        idx = self._index.get(tuple(s))
        return 0.0 if idx is None else self.graph.edges[idx].value

    def __post_init__(self):
        self._index = {s: i for i, s in enumerate(self.tuples)}

    def to_file(self) -> HypergraphFile:
        meta = {
            "d": self.cfg.d,
            "max_edge_size": self.cfg.max_edge_size,
            "min_support": self.cfg.min_support,
            "n_train": self.counts.get((), 0),
            "history": None if self.history is None else list(self.history),
        }
        return HypergraphFile(self.graph, "coverage", self.labels, meta)


class ModelTrainer:
    """Reusable builder: sorts the retained tuples once, then builds one model
    per history (the per-user personalised graphs of an experiment)."""

    def __init__(self, counts: Counter, cfg: TrainConfig, n: int | None = None,
                 labels: list[str] | None = None):
        self.counts = counts
        self.cfg = cfg
        self.labels = labels
        self.tuples = sorted(
            (s for s, c in counts.items()
             if s and len(s) <= cfg.max_edge_size and c >= cfg.min_support),
            key=lambda s: (len(s), s),
        )
        top = max((v for s in self.tuples for v in s), default=-1)
        self.n = top + 1 if n is None else n
        if self.n <= top:
            raise InputError(f"item id {top} outside [0, {self.n})")
        self._structure = None

    @property
    def structure(self) -> DirectedHypergraph:
        """The edge lists every built model shares, with indexes precomputed."""
        if self._structure is None:
            g = DirectedHypergraph(self.n, [(s, 0.0) for s in self.tuples])
            for name in DirectedHypergraph._SHARED:
                getattr(g, name)
            self._structure = g
        return self._structure

    def build(self, history: Sequence[int] | None = None) -> TrainedModel:
        counts = self.counts
        d = self.cfg.d
        hist = None if history is None else tuple(history)
        contained = set()
        if hist is not None:
            for size in range(self.cfg.max_edge_size):
                contained.update(itertools.combinations(hist, size))
        p: dict[tuple, float] = {(): 1.0}
        for s in self.tuples:
            parent = s[:-1]
            if parent not in counts:
                raise InputError(f"counts lack the prefix {parent} of {s}")
            denom = counts[parent] + d
            if denom == 0:
                raise InputError(f"zero denominator for tuple {s}: N_{parent} = 0 and d = 0")
            ratio = counts[s] / denom
            if not parent or parent in contained:
                p[s] = ratio
            else:
                p[s] = p[parent] * ratio
        values = [p[s] for s in self.tuples]
        for s, ps in zip(self.tuples, values):
            if not 0.0 <= ps <= 1.0:
                raise InvariantError(f"p_{s} = {ps} outside [0, 1]; counts are inconsistent")
        graph = self.structure.with_values(values)
        return TrainedModel(graph, counts, list(self.tuples), self.cfg, hist, self.labels)


def build_model(counts: Counter, cfg: TrainConfig, history: Sequence[int] | None = None,
                n: int | None = None, labels: list[str] | None = None) -> TrainedModel:
    """One hyperedge per retained tuple, valued by the smoothed probability.

    Without a history only the empty prefix counts as contained, so every
    probability chains through its prefixes.
    """
    return ModelTrainer(counts, cfg, n, labels).build(history)


def train(corpus: Corpus, cfg: TrainConfig, users: Iterable[str] | None = None,
          history: Sequence[int] | None = None) -> TrainedModel:
    users = corpus.users() if users is None else list(users)
    counts = count_subsequences((corpus.sequences[u] for u in users), cfg.max_edge_size)
    return build_model(counts, cfg, history, corpus.n, corpus.items)


def split_folds(users: Corpus | Iterable[str], folds: int, seed: int = 0) -> list[tuple[list[str], list[str]]]:
    """User-level K-fold partitions as ``(train_users, test_users)`` pairs.

    Test folds differ in size by at most one and together cover every user
    exactly once.  Deterministic for a given seed.
    """
    ids = users.users() if isinstance(users, Corpus) else sorted(set(users))
    if folds < 2:
        raise ConfigError(f"need at least 2 folds, got {folds}")
    if len(ids) < folds:
        raise ConfigError(f"{len(ids)} users cannot fill {folds} folds")
    random.Random(seed).shuffle(ids)
    size, extra = divmod(len(ids), folds)
    out = []
    start = 0
    for f in range(folds):
        stop = start + size + (1 if f < extra else 0)
        test = ids[start:stop]
        test_set = set(test)
        out.append(([u for u in ids if u not in test_set], test))
        start = stop
    return out


def counts_to_json(counts: Counter) -> dict:
    rows = sorted(([list(s), c] for s, c in counts.items() if s), key=lambda r: (len(r[0]), r[0]))
    return {"schema_version": SCHEMA_VERSION, "n_train": counts.get((), 0), "counts": rows}


def counts_from_json(d: Mapping) -> Counter:
    counts = Counter({tuple(s): int(c) for s, c in d["counts"]})
    counts[()] = int(d["n_train"])
    return counts


def sidecar_path(model_path) -> Path:
    p = Path(model_path)
    return p.with_name(p.stem + ".counts.json")


def write_model(path, model: TrainedModel) -> Path:
    """Write the hypergraph JSON and its counts sidecar; returns the sidecar path."""
    write_json(path, model.to_file())
    side = sidecar_path(path)
    side.write_text(json.dumps(counts_to_json(model.counts), sort_keys=True) + "\n")
    return side
