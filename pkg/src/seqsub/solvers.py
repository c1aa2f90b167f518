"""Greedy sequence selection on digraphs and hypergraphs.

Sequence-Greedy picks, at each step, the eligible edge with the largest
marginal gain and places its missing vertices at the end (forward) or the
start (backward) of the sequence.  Hyper Sequence-Greedy generalises the
eligibility rule to hyperedges: the vertices of the edge already placed must
form a prefix (forward) or suffix (backward) of the edge.

Ties in the argmax go to the smallest edge id.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

from .errors import ConfigError, InputError
from .hypergraph import DirectedHypergraph, check_sequence, is_induced
from .utility import UtilityFunction

DIRECTIONS = ("forward", "backward", "both")
TIE_BREAKS = ("smallest-id",)
ALGORITHMS = ("sequence-greedy", "hyper-sequence-greedy", "frequency")
_ALIASES = {"pairwise": "sequence-greedy", "hyper": "hyper-sequence-greedy"}


@dataclass(frozen=True)
class SolveConfig:
    k: int
    direction: str = "forward"
    # None picks the per-algorithm default: on for hyper solvers, off for pairwise
    fill_to_k: bool | None = None
    tie_break: str = "smallest-id"

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int):
            raise ConfigError(f"k must be an integer, got {self.k!r}")
        if self.k < 0:
            raise ConfigError(f"k must be nonnegative, got {self.k}")
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError(f"unsupported tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class TraceStep:
    edge: int
    gain: float  # marginal of ``edge`` at selection time
    realized: float  # f(sigma_s) - f(sigma_{s-1}), >= gain
    length: int  # |sigma| after the step
    phase: str = "greedy"  # "greedy" or "fill"


@dataclass(frozen=True)
class SolveReport:
    sigma: tuple[int, ...]
    objective: float
    trace: tuple[TraceStep, ...]
    bound: float
    direction_used: str
    algorithm: str
    k: int
    history: tuple[int, ...] = ()
    fill_to_k: bool = False
    tie_break: str = "smallest-id"
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def added(self) -> tuple[int, ...]:
        """Vertices chosen by the solver, i.e. ``sigma`` minus the given history."""
        return self.sigma[len(self.history):]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sigma"] = list(self.sigma)
        d["history"] = list(self.history)
        d["added"] = list(self.added)
        d["trace"] = [asdict(t) for t in self.trace]
        return d


def approx_bound(k: float, d_in: int, d_out: int | None = None, r: int = 2,
                 direction: str = "forward") -> float:
    """Worst-case approximation ratio guaranteed for a run with these parameters.

    ``r == 2`` uses the digraph guarantee ``(1 - e^{-(1-1/k)}) / (2d + 1)``;
    any other ``r`` uses ``(1 - e^{-(1-r/k)}) / (r d + 1)``.  ``d`` is the max
    in-degree going forward and the max out-degree going backward; for
    ``direction="both"`` the better of the two applies.  ``k`` may be
    ``math.inf``.  Vacuous (negative) values are reported as 0.
    """
    if direction == "both":
        if d_out is None:
            raise ConfigError("direction='both' needs d_out")
        return max(approx_bound(k, d_in, d_out, r, "forward"),
                   approx_bound(k, d_in, d_out, r, "backward"))
    if direction == "forward":
        d = d_in
    elif direction == "backward":
        if d_out is None:
            raise ConfigError("direction='backward' needs d_out")
        d = d_out
    else:
        raise ConfigError(f"unknown direction {direction!r}")
    if k <= 0 or r < 1:
        return 0.0
    shrink = 1.0 / k if r == 2 else r / k
    bound = -math.expm1(-(1.0 - shrink)) / (r * d + 1)
    return max(bound, 0.0)


def asymptotic_bound(delta: int, r: int = 2) -> float:
    """Limit of the best-of-both guarantee as k grows: ``(1 - 1/e) / (r delta + 1)``."""
    return (1.0 - math.exp(-1.0)) / (r * delta + 1)


class _Builder:
    """A sequence under construction plus the utility state of its induced edges."""

    def __init__(self, H: DirectedHypergraph, h: UtilityFunction):
        self.H = H
        self.state = h.new_state()
        self.seq: deque[int] = deque()
        self.pos: dict[int, int] = {}
        self._lo = 0
        self._hi = 0

    def __len__(self):
        return len(self.seq)

    def __contains__(self, v):
        return v in self.pos

    def append(self, v: int) -> float:
        self.pos[v] = self._hi
        self._hi += 1
        self.seq.append(v)
        return self._absorb(self.H.ending_at[v])

    def prepend(self, v: int) -> float:
        self._lo -= 1
        self.pos[v] = self._lo
        self.seq.appendleft(v)
        return self._absorb(self.H.starting_at[v])

    def _absorb(self, candidates) -> float:
        # an edge becomes induced only when its last (append) or first (prepend)
        # vertex arrives, so only those candidates need checking
        gained = 0.0
        edges = self.H.edges
        for eid in candidates:
            if is_induced(edges[eid], self.pos):
                gained += self.state.add(eid)
        return gained


class _Strategy:
    """Eligibility bookkeeping and placement rule of one greedy variant.

    Strategies start on an empty sequence with every edge tracked; ``place``
    adds one vertex and prunes what it makes ineligible, so seeding with a
    history goes through the same update as the greedy steps.
    """

    eligible: dict[int, None]

    def __init__(self, b: _Builder):
        self.b = b
        self.eligible = dict.fromkeys(range(b.H.m))

    def new_vertices(self, eid: int) -> tuple[int, ...]:
        raise NotImplementedError

    def missing(self, eid: int) -> int:
        return len(self.new_vertices(eid))

    def place(self, v: int) -> float:
        raise NotImplementedError

    def take(self, eid: int) -> float:
        """Place the missing vertices of ``eid``; returns the realised gain."""
        verts = self.new_vertices(eid)
        if self.backward:
            verts = reversed(verts)
        return sum(self.place(v) for v in verts)

    backward = False


class _PairwiseForward(_Strategy):
    # eligible: edges whose end point is not in sigma
    def new_vertices(self, eid):
        e = self.b.H.edges[eid]
        i, j = e.first, e.last
        if i == j or i in self.b:
            return (j,)
        return (i, j)

    def place(self, v):
        gained = self.b.append(v)
        for gone in self.b.H.ending_at[v]:
            self.eligible.pop(gone, None)
        return gained


class _PairwiseBackward(_Strategy):
    # eligible: edges whose start point is not in sigma
    backward = True

    def new_vertices(self, eid):
        e = self.b.H.edges[eid]
        i, j = e.first, e.last
        if i == j or j in self.b:
            return (i,)
        return (i, j)

    def place(self, v):
        gained = self.b.prepend(v)
        for gone in self.b.H.starting_at[v]:
            self.eligible.pop(gone, None)
        return gained


class _HyperForward(_Strategy):
    # matched[e] = length of the prefix of e already in sigma.  Fully induced
    # edges are dropped from ``eligible``: their gain is 0 and picking one would
    # not extend sigma.
    def __init__(self, b):
        super().__init__(b)
        self.matched = [0] * b.H.m

    def new_vertices(self, eid):
        return self.b.H.edges[eid].vertices[self.matched[eid]:]

    def missing(self, eid):
        return len(self.b.H.edges[eid].vertices) - self.matched[eid]

    def place(self, v):
        H = self.b.H
        gained = self.b.append(v)
        matched = self.matched
        for other in H.incident[v]:
            if other not in self.eligible:
                continue
            verts = H.edges[other].vertices
            k = matched[other]
            if verts[k] == v and k + 1 < len(verts):
                matched[other] = k + 1
            else:
                del self.eligible[other]
        return gained


class _HyperBackward(_Strategy):
    # matched[e] = length of the suffix of e already in sigma
    backward = True

    def __init__(self, b):
        super().__init__(b)
        self.matched = [0] * b.H.m

    def new_vertices(self, eid):
        verts = self.b.H.edges[eid].vertices
        return verts[: len(verts) - self.matched[eid]]

    def missing(self, eid):
        return len(self.b.H.edges[eid].vertices) - self.matched[eid]

    def place(self, v):
        H = self.b.H
        gained = self.b.prepend(v)
        matched = self.matched
        for other in H.incident[v]:
            if other not in self.eligible:
                continue
            verts = H.edges[other].vertices
            k = matched[other]
            if verts[len(verts) - 1 - k] == v and k + 1 < len(verts):
                matched[other] = k + 1
            else:
                del self.eligible[other]
        return gained


def _argmax(strategy: _Strategy, state, limit: int | None):
    best, best_gain = None, -1.0
    gain = state.gain
    if limit is None:
        for eid in strategy.eligible:
            g = gain(eid)
            if g > best_gain:
                best, best_gain = eid, g
    else:
        for eid in strategy.eligible:
            if strategy.missing(eid) > limit:
                continue
            g = gain(eid)
            if g > best_gain:
                best, best_gain = eid, g
    return best, best_gain


def _run(strategy: _Strategy, b: _Builder, k: int, guard_r: int, fill: bool):
    base = len(b)
    steps = []
    while len(b) - base <= k - guard_r:
        if not strategy.eligible:
            break
        eid, g = _argmax(strategy, b.state, None)
        realized = strategy.take(eid)
        steps.append(TraceStep(eid, g, realized, len(b), "greedy"))
    if fill:
        while len(b) - base < k:
            eid, g = _argmax(strategy, b.state, k - (len(b) - base))
            if eid is None or g <= 0.0:
                break
            realized = strategy.take(eid)
            steps.append(TraceStep(eid, g, realized, len(b), "fill"))
    return tuple(steps)


def _start(H, h, strategy_cls=None, history=()):
    if h.m != H.m:
        raise InputError(f"utility covers {h.m} edges but the graph has {H.m}")
    history = check_sequence(H, history)
    b = _Builder(H, h)
    strategy = strategy_cls(b) if strategy_cls else None
    for v in history:
        if strategy:
            strategy.place(v)
        else:
            b.append(v)
    return b, strategy


def _require_pairwise(H: DirectedHypergraph):
    if H.r > 2:
        raise InputError(
            f"graph has hyperedges of size {H.r}; use the hyper-sequence-greedy solvers"
        )


def _report(b, steps, cfg, direction, algorithm, bound, history, fill):
    sigma = tuple(b.seq)
    return SolveReport(
        sigma=sigma,
        objective=b.state.value,
        trace=steps,
        bound=bound,
        direction_used=direction,
        algorithm=algorithm,
        k=cfg.k,
        history=tuple(history),
        fill_to_k=fill,
        tie_break=cfg.tie_break,
    )


def sequence_greedy_forward(H: DirectedHypergraph, h: UtilityFunction, cfg: SolveConfig,
                            history: Sequence[int] = ()) -> SolveReport:
    """Pairwise greedy that appends; edges whose end point is placed are ineligible.

    ``history`` seeds sigma; ``k`` then counts only the vertices added after it.
    """
    _require_pairwise(H)
    fill = bool(cfg.fill_to_k)
    b, strategy = _start(H, h, _PairwiseForward, history)
    steps = _run(strategy, b, cfg.k, 2, fill)
    bound = approx_bound(cfg.k, H.d_in, H.d_out, 2, "forward")
    return _report(b, steps, cfg, "forward", "sequence-greedy", bound, history, fill)


def sequence_greedy_backward(H: DirectedHypergraph, h: UtilityFunction,
                             cfg: SolveConfig) -> SolveReport:
    """Pairwise greedy that prepends; edges whose start point is placed are ineligible."""
    _require_pairwise(H)
    fill = bool(cfg.fill_to_k)
    b, strategy = _start(H, h, _PairwiseBackward)
    steps = _run(strategy, b, cfg.k, 2, fill)
    bound = approx_bound(cfg.k, H.d_in, H.d_out, 2, "backward")
    return _report(b, steps, cfg, "backward", "sequence-greedy", bound, (), fill)


def _hyper_r(H):
    return max(H.r, 1)


def hyper_sequence_greedy_forward(H: DirectedHypergraph, h: UtilityFunction, cfg: SolveConfig,
                                  history: Sequence[int] = ()) -> SolveReport:
    fill = True if cfg.fill_to_k is None else cfg.fill_to_k
    r = _hyper_r(H)
    b, strategy = _start(H, h, _HyperForward, history)
    steps = _run(strategy, b, cfg.k, r, fill)
    bound = approx_bound(cfg.k, H.d_in, H.d_out, r, "forward")
    return _report(b, steps, cfg, "forward", "hyper-sequence-greedy", bound, history, fill)


def hyper_sequence_greedy_backward(H: DirectedHypergraph, h: UtilityFunction,
                                   cfg: SolveConfig) -> SolveReport:
    fill = True if cfg.fill_to_k is None else cfg.fill_to_k
    r = _hyper_r(H)
    b, strategy = _start(H, h, _HyperBackward)
    steps = _run(strategy, b, cfg.k, r, fill)
    bound = approx_bound(cfg.k, H.d_in, H.d_out, r, "backward")
    return _report(b, steps, cfg, "backward", "hyper-sequence-greedy", bound, (), fill)


def best_of_both(H: DirectedHypergraph, h: UtilityFunction, cfg: SolveConfig,
                 algorithm: str = "sequence-greedy") -> SolveReport:
    """Run forward and backward and keep the better report (ties go forward)."""
    algorithm = _ALIASES.get(algorithm, algorithm)
    if algorithm == "sequence-greedy":
        fwd_fn, bwd_fn, r = sequence_greedy_forward, sequence_greedy_backward, 2
    elif algorithm == "hyper-sequence-greedy":
        fwd_fn, bwd_fn, r = hyper_sequence_greedy_forward, hyper_sequence_greedy_backward, _hyper_r(H)
    else:
        raise ConfigError(f"best_of_both does not apply to {algorithm!r}")
    fwd = fwd_fn(H, h, replace(cfg, direction="forward"))
    bwd = bwd_fn(H, h, replace(cfg, direction="backward"))
    winner = bwd if bwd.objective > fwd.objective else fwd
    bound = approx_bound(cfg.k, H.d_in, H.d_out, r, "both")
    return replace(winner, bound=bound,
                   extra={"forward_objective": fwd.objective, "backward_objective": bwd.objective})


def frequency_baseline(H: DirectedHypergraph, h: UtilityFunction, k: int,
                       history: Sequence[int] = ()) -> SolveReport:
    """Top-``k`` vertices by self-loop value, skipping ``history``.

    Vertices without a self-loop score 0; ties go to the smaller vertex id.
    The returned sigma is ``history`` followed by the picks.
    """
    cfg = SolveConfig(k)
    b, _ = _start(H, h, None, history)
    score = [max((H.edges[e].value for e in loops), default=0.0) for loops in H.self_loops]
    ranked = sorted((v for v in range(H.n) if v not in b), key=lambda v: (-score[v], v))
    steps = []
    for v in ranked[:k]:
        before = b.state.value
        b.append(v)
        loop = H.self_loops[v][0] if H.self_loops[v] else -1
        steps.append(TraceStep(loop, score[v], b.state.value - before, len(b), "greedy"))
    return _report(b, tuple(steps), cfg, "forward", "frequency", 0.0, history, False)


def classical_greedy(H: DirectedHypergraph, h: UtilityFunction, k: int) -> SolveReport:
    """Set greedy over vertices scored by the marginal of their self-loops.

    Only vertices that own a self-loop are candidates; ties go to the smaller
    vertex id.  This is the reference the r = 1 hyper solver must reproduce.
    """
    cfg = SolveConfig(k)
    b, _ = _start(H, h)
    steps = []
    while len(b) < k:
        best, best_gain = None, -1.0
        for v in range(H.n):
            loops = H.self_loops[v]
            if v in b or not loops:
                continue
            trial = b.state.copy()
            g = sum(trial.add(e) for e in loops)
            if g > best_gain:
                best, best_gain = v, g
        if best is None:
            break
        realized = b.append(best)
        steps.append(TraceStep(H.self_loops[best][0], best_gain, realized, len(b), "greedy"))
    return _report(b, tuple(steps), cfg, "forward", "classical-greedy", 1.0 - math.exp(-1.0), (), False)


def solve(H: DirectedHypergraph, h: UtilityFunction, cfg: SolveConfig,
          algorithm: str = "hyper-sequence-greedy", history: Sequence[int] = ()) -> SolveReport:
    """Dispatch on algorithm name and ``cfg.direction``."""
    algorithm = _ALIASES.get(algorithm, algorithm)
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if algorithm == "frequency":
        return frequency_baseline(H, h, cfg.k, history)
    if history and cfg.direction != "forward":
        raise ConfigError("a starting history is only supported for forward runs")
    if cfg.direction == "both":
        return best_of_both(H, h, cfg, algorithm)
    if algorithm == "sequence-greedy":
        if cfg.direction == "forward":
            return sequence_greedy_forward(H, h, cfg, history)
        return sequence_greedy_backward(H, h, cfg)
    if cfg.direction == "forward":
        return hyper_sequence_greedy_forward(H, h, cfg, history)
    return hyper_sequence_greedy_backward(H, h, cfg)
