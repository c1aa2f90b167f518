"""Random and hand-built instances for tests, benchmarks and the CLI."""
from __future__ import annotations

import random

from .hypergraph import DirectedHypergraph
from .utility import CoverageUtility, ModularUtility, UtilityFunction

LOTR_LABELS = ("F", "T", "R")


def lotr() -> DirectedHypergraph:
    """The three-film franchise digraph: every forward pair (F,T), (F,R),
    (T,R) plus a self-loop per film, each worth one unit.

    Under the edge-count utility every first pick is a tie, so edge order
    decides what the greedy solvers return; pairs are listed first.
    """
    F, T, R = 0, 1, 2
    return DirectedHypergraph(3, [
        ((F, T), 1.0), ((F, R), 1.0), ((T, R), 1.0),
        ((F,), 1.0), ((T,), 1.0), ((R,), 1.0),
    ])


def random_hypergraph(rng: random.Random, n: int, m: int, r: int = 2,
                      loop_share: float = 0.3, one_loop_per_vertex: bool = False) -> DirectedHypergraph:
    """``m`` edges over ``n`` vertices with sizes in ``1..r``.

    Values are uniform on (0, 1] so the same graph works for both built-in
    utilities.  Duplicate vertex lists may occur.
    """
    edges = []
    looped = set()
    r = min(r, n)
    for _ in range(m):
        if rng.random() < loop_share or r == 1:
            v = rng.randrange(n)
            if one_loop_per_vertex:
                if v in looped:
                    free = [u for u in range(n) if u not in looped]
                    if not free:
                        continue
                    v = rng.choice(free)
                looped.add(v)
            verts = (v,)
        else:
            size = rng.randint(2, r)
            verts = tuple(rng.sample(range(n), size))
        edges.append((verts, 1.0 - rng.random()))
    return DirectedHypergraph(n, edges)


def random_digraph(rng: random.Random, n: int, m: int, loop_share: float = 0.3) -> DirectedHypergraph:
    return random_hypergraph(rng, n, m, 2, loop_share)


def random_utility(rng: random.Random, H: DirectedHypergraph, kind: str | None = None) -> UtilityFunction:
    kind = kind or rng.choice(("modular", "coverage"))
    if kind == "modular":
        return ModularUtility.from_hypergraph(H)
    return CoverageUtility.from_hypergraph(H)
