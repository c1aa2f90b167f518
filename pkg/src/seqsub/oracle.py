"""Exhaustive search for the optimal sequence on small instances."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import OracleSizeError
from .hypergraph import DirectedHypergraph, is_induced
from .solvers import SolveReport
from .utility import UtilityFunction

DEFAULT_CAP = 10**7
RATIO_TOL = 1e-9
# values closer than this count as equal when picking the lexicographic winner
_VALUE_TIE = 1e-12


@dataclass(frozen=True)
class OracleResult:
    sigma_star: tuple[int, ...]
    opt_value: float
    sequences_examined: int


@dataclass(frozen=True)
class RatioVerdict:
    holds: bool
    ratio: float
    bound: float
    opt_value: float
    objective: float


def count_sequences(n: int, k: int) -> int:
    """Number of non-repeating sequences of length 0..k over n vertices."""
    k = min(k, n)
    return sum(math.perm(n, j) for j in range(k + 1))


def brute_force_opt(H: DirectedHypergraph, h: UtilityFunction, k: int,
                    cap: int = DEFAULT_CAP) -> OracleResult:
    """Best sequence of length at most ``k`` by depth-first enumeration.

    Among maximisers the lexicographically smallest sequence is returned (a
    prefix sorts before its extensions).  Raises :class:`OracleSizeError` when
    the enumeration would exceed ``cap`` sequences.
    """
    k = max(k, 0)
    total = count_sequences(H.n, k)
    if total > cap:
        raise OracleSizeError(total, cap)

    edges = H.edges
    ending_at = H.ending_at
    pos: dict[int, int] = {}
    path: list[int] = []
    best_value = 0.0
    best_sigma: tuple[int, ...] = ()
    examined = 1  # the empty sequence

    def dfs(state):
        nonlocal best_value, best_sigma, examined
        depth = len(path)
        for v in range(H.n):
            if v in pos:
                continue
            pos[v] = depth
            path.append(v)
            child = state.copy()
            for eid in ending_at[v]:
                if is_induced(edges[eid], pos):
                    child.add(eid)
            examined += 1
            if child.value > best_value + _VALUE_TIE:
                best_value = child.value
                best_sigma = tuple(path)
            if depth + 1 < k:
                dfs(child)
            path.pop()
            del pos[v]

    if k > 0:
        dfs(h.new_state())
    return OracleResult(best_sigma, best_value, examined)


def verify_ratio(H: DirectedHypergraph, h: UtilityFunction, k: int, report: SolveReport,
                 cap: int = DEFAULT_CAP) -> RatioVerdict:
    """Compare a solver report with the exact optimum.

    The guarantee holds when ``objective / opt >= bound - 1e-9``; a zero
    optimum holds trivially.
    """
    return _verdict(report, brute_force_opt(H, h, k, cap).opt_value)


@dataclass(frozen=True)
class BatchCase:
    seed: int
    n: int
    m: int
    r: int
    k: int
    utility: str
    solver: str
    verdict: RatioVerdict


def solver_suite(r: int) -> list[tuple[str, str]]:
    """(algorithm, direction) pairs that apply to graphs with max edge size ``r``."""
    algos = ["sequence-greedy", "hyper-sequence-greedy"] if r <= 2 else ["hyper-sequence-greedy"]
    return [(a, d) for a in algos for d in ("forward", "backward", "both")]


def random_batch(count: int, seed: int = 0, max_n: int = 7, max_m: int = 20,
                 max_r: int = 2, ks: Sequence[int] = (2, 3, 4), cap: int = DEFAULT_CAP,
                 fill_to_k: bool | None = None) -> Iterator[BatchCase]:
    """Check every applicable solver against the optimum on ``count`` random instances.

    Instance ``i`` is drawn from ``random.Random(seed + i)``, so any case can be
    replayed on its own.
    """
    from .instances import random_hypergraph, random_utility
    from .solvers import SolveConfig, solve

    for i in range(count):
        rng = random.Random(seed + i)
        n = rng.randint(2, max_n)
        m = rng.randint(1, max_m)
        r = rng.randint(2, max_r) if max_r >= 2 else 1
        H = random_hypergraph(rng, n, m, r)
        h = random_utility(rng, H)
        k = rng.choice(list(ks))
        opt = None
        for algorithm, direction in solver_suite(H.r):
            rep = solve(H, h, SolveConfig(k, direction, fill_to_k), algorithm)
            if opt is None:
                opt = brute_force_opt(H, h, k, cap).opt_value
            verdict = _verdict(rep, opt)
            yield BatchCase(seed + i, n, H.m, H.r, k, h.kind, f"{algorithm}/{direction}", verdict)


def _verdict(report: SolveReport, opt: float) -> RatioVerdict:
    if opt <= 0.0:
        return RatioVerdict(True, 1.0, report.bound, opt, report.objective)
    ratio = report.objective / opt
    return RatioVerdict(ratio >= report.bound - RATIO_TOL, ratio, report.bound, opt, report.objective)
