"""Wall-clock scaling of the pairwise solver in the number of edges."""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instances import random_digraph
from .solvers import SolveConfig, sequence_greedy_forward
from .utility import CoverageUtility

DEFAULT_SIZES = (1_000, 3_000, 10_000, 30_000, 100_000)


@dataclass(frozen=True)
class Timing:
    m: int
    k: int
    seconds: float  # best of the repeats


@dataclass(frozen=True)
class BenchResult:
    timings: tuple[Timing, ...]
    exponent: float  # slope of log(seconds) against log(m)


def time_pairwise(m: int, k: int = 50, seed: int = 0, n: int = 1_000, repeats: int = 3) -> Timing:
    """Time forward Sequence-Greedy on a random digraph with ``m`` edges.

    Instance construction is excluded; the best of ``repeats`` runs is kept.
    """
    H = random_digraph(random.Random(seed), n, m)
    h = CoverageUtility.from_hypergraph(H)
    H.ending_at  # build the index outside the timed region
    cfg = SolveConfig(k)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        sequence_greedy_forward(H, h, cfg)
        best = min(best, time.perf_counter() - t0)
    return Timing(m, k, best)


def _time_job(args):
    return time_pairwise(*args)


def fit_exponent(ms: Sequence[float], seconds: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(ms), np.log(seconds), 1)
    return float(slope)


def run_bench(sizes: Sequence[int] = DEFAULT_SIZES, k: int = 50, seed: int = 0,
              repeats: int = 3, workers: int = 1) -> BenchResult:
    jobs = [(m, k, seed, 1_000, repeats) for m in sizes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            timings = list(pool.map(_time_job, jobs))
    else:
        timings = [_time_job(j) for j in jobs]
    exponent = fit_exponent([t.m for t in timings], [t.seconds for t in timings])
    return BenchResult(tuple(timings), exponent)
