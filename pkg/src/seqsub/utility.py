"""Monotone submodular set functions over edge ids.

Two built-ins are provided:

* :class:`ModularUtility`, the sum of per-edge weights (unit weights give the
  edge count).
* :class:`CoverageUtility`, probabilistic coverage
  ``sum_v [1 - prod_{e ending at v} (1 - p_e)]``.

Both expose ``value`` / ``marginal`` for from-scratch evaluation and
``new_state()`` for incremental evaluation inside solvers.
"""
from __future__ import annotations

import math
import operator
from typing import Iterable, Sequence

from .errors import InputError, InvariantError, UnknownEdgeError
from .hypergraph import DirectedHypergraph

LOG_SPACE_THRESHOLD = 64
NEG_CLAMP = -1e-12

UTILITY_KINDS = ("modular", "coverage")


def _clamp(delta: float) -> float:
    if delta >= 0.0:
        return delta
    if delta > NEG_CLAMP:
        return 0.0
    raise InvariantError(f"negative marginal gain {delta!r}")


class UtilityFunction:
    kind: str

    def __init__(self, m: int):
        self.m = m

    def _check(self, edge_ids: Iterable[int]) -> set[int]:
        ids = set()
        for e in edge_ids:
            try:
                i = operator.index(e)
            except TypeError:
                raise UnknownEdgeError(e) from None
            if not 0 <= i < self.m:
                raise UnknownEdgeError(e)
            ids.add(i)
        return ids

    def value(self, edges: Iterable[int]) -> float:
        raise NotImplementedError

    def marginal(self, e: int, edges: Iterable[int]) -> float:
        """``value(S | {e}) - value(S)``, clamped at 0 for float noise."""
        S = self._check(edges)
        (e,) = self._check((e,))
        if e in S:
            return 0.0
        return _clamp(self.value(S | {e}) - self.value(S))

    def new_state(self) -> "UtilityState":
        raise NotImplementedError


class UtilityState:
    """Running value of a growing edge set."""

    value: float
    included: set[int]

    def gain(self, e: int) -> float:
        raise NotImplementedError

    def add(self, e: int) -> float:
        """Insert ``e`` and return the realised gain."""
        raise NotImplementedError

    def copy(self) -> "UtilityState":
        raise NotImplementedError


class ModularUtility(UtilityFunction):
    kind = "modular"

    def __init__(self, weights: Sequence[float]):
        super().__init__(len(weights))
        self.weights = tuple(float(w) for w in weights)
        for i, w in enumerate(self.weights):
            if not w >= 0.0:
                raise InputError(f"edge {i} has negative weight {w}")

    @classmethod
    def from_hypergraph(cls, H: DirectedHypergraph) -> "ModularUtility":
        return cls([e.value for e in H.edges])

    @classmethod
    def count(cls, H: DirectedHypergraph) -> "ModularUtility":
        """Unit weights, so the value is the number of edges."""
        return cls([1.0] * H.m)

    def value(self, edges):
        S = self._check(edges)
        return math.fsum(self.weights[e] for e in S)

    def new_state(self):
        return _ModularState(self.weights)


class _ModularState(UtilityState):
    __slots__ = ("weights", "value", "included")

    def __init__(self, weights):
        self.weights = weights
        self.value = 0.0
        self.included = set()

    def gain(self, e):
        return 0.0 if e in self.included else self.weights[e]

    def add(self, e):
        g = self.gain(e)
        self.included.add(e)
        self.value += g
        return g

    def copy(self):
        new = _ModularState(self.weights)
        new.value = self.value
        new.included = set(self.included)
        return new


class CoverageUtility(UtilityFunction):
    """Probabilistic coverage keyed by each edge's terminal vertex.

    Only vertices that terminate at least one selected edge contribute.
    """

    kind = "coverage"

    def __init__(self, probabilities: Sequence[float], terminals: Sequence[int]):
        if len(probabilities) != len(terminals):
            raise InputError("probabilities and terminals differ in length")
        super().__init__(len(probabilities))
        self.p = tuple(float(p) for p in probabilities)
        self.terminal = tuple(int(v) for v in terminals)
        for i, p in enumerate(self.p):
            if not 0.0 <= p <= 1.0:
                raise InputError(f"edge {i} has probability {p} outside [0, 1]")

    @classmethod
    def from_hypergraph(cls, H: DirectedHypergraph) -> "CoverageUtility":
        return cls([e.value for e in H.edges], [e.last for e in H.edges])

    def value(self, edges):
        S = self._check(edges)
        groups: dict[int, list[float]] = {}
        for e in S:
            groups.setdefault(self.terminal[e], []).append(self.p[e])
        return math.fsum(_covered(ps) for ps in groups.values())

    def new_state(self):
        return _CoverageState(self.p, self.terminal)


def _covered(ps: list[float]) -> float:
    """``1 - prod(1 - p)`` evaluated in a fixed order."""
    ps = sorted(ps)
    if len(ps) > LOG_SPACE_THRESHOLD:
        if ps[-1] >= 1.0:
            return 1.0
        return -math.expm1(math.fsum(math.log1p(-p) for p in ps))
    prod = 1.0
    for p in ps:
        prod *= 1.0 - p
    return 1.0 - prod


class _CoverageState(UtilityState):
    __slots__ = ("p", "terminal", "uncovered", "value", "included")

    def __init__(self, p, terminal):
        self.p = p
        self.terminal = terminal
        # per-vertex running product of (1 - p); absent means 1
        self.uncovered: dict[int, float] = {}
        self.value = 0.0
        self.included = set()

    def gain(self, e):
        if e in self.included:
            return 0.0
        return self.uncovered.get(self.terminal[e], 1.0) * self.p[e]

    def add(self, e):
        g = self.gain(e)
        if e not in self.included:
            self.included.add(e)
            v = self.terminal[e]
            self.uncovered[v] = self.uncovered.get(v, 1.0) * (1.0 - self.p[e])
            self.value += g
        return g

    def copy(self):
        new = _CoverageState(self.p, self.terminal)
        new.uncovered = dict(self.uncovered)
        new.value = self.value
        new.included = set(self.included)
        return new


def make_utility(kind: str, H: DirectedHypergraph) -> UtilityFunction:
    """Interpret edge values of ``H`` as weights or probabilities."""
    if kind == "modular":
        return ModularUtility.from_hypergraph(H)
    if kind == "coverage":
        return CoverageUtility.from_hypergraph(H)
    raise InputError(f"unknown utility kind {kind!r}; expected one of {UTILITY_KINDS}")
