"""Directed hypergraphs whose edges are ordered vertex sequences.

A plain digraph is the special case where every edge has one vertex
(a self-loop) or two vertices.  Vertices are dense integers in ``[0, n)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError


@dataclass(frozen=True)
class Hyperedge:
    id: int
    vertices: tuple[int, ...]
    value: float = 1.0

    @property
    def first(self) -> int:
        return self.vertices[0]

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class DegreeTable:
    d_in: tuple[int, ...]
    d_out: tuple[int, ...]

    @property
    def max_in(self) -> int:
        return max(self.d_in, default=0)

    @property
    def max_out(self) -> int:
        return max(self.d_out, default=0)

    @property
    def delta(self) -> int:
        return min(self.max_in, self.max_out)


class DirectedHypergraph:
    """Immutable vertex universe plus an edge list.

    Edge ids are positions in ``edges``.  Duplicate vertex lists are allowed
    and stay distinct edges.
    """

    def __init__(self, n: int, edges: Iterable[Hyperedge | tuple[Sequence[int], float]] = ()):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        self.n = int(n)
        built = []
        for idx, item in enumerate(edges):
            if isinstance(item, Hyperedge):
                if item.id != idx:
                    raise InputError(f"edge at position {idx} carries id {item.id}")
                verts, value = item.vertices, item.value
            else:
                verts, value = item
            built.append(_check_edge(idx, verts, value, self.n))
        self.edges: tuple[Hyperedge, ...] = tuple(built)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return f"DirectedHypergraph(n={self.n}, m={self.m}, r={self.r})"

    def __eq__(self, other):
        if not isinstance(other, DirectedHypergraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    __hash__ = None

    @cached_property
    def r(self) -> int:
        """Largest edge cardinality (0 for an edgeless graph)."""
        return max((len(e.vertices) for e in self.edges), default=0)

    @cached_property
    def degree_table(self) -> DegreeTable:
        return degrees(self)

    @property
    def d_in(self) -> int:
        return self.degree_table.max_in

    @property
    def d_out(self) -> int:
        return self.degree_table.max_out

    @property
    def delta(self) -> int:
        return self.degree_table.delta

    @cached_property
    def ending_at(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids grouped by last vertex."""
        return self._group(lambda e: (e.last,))

    @cached_property
    def starting_at(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids grouped by first vertex."""
        return self._group(lambda e: (e.first,))

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids grouped by every vertex they contain."""
        return self._group(lambda e: e.vertices)

    @cached_property
    def self_loops(self) -> tuple[tuple[int, ...], ...]:
        return self._group(lambda e: e.vertices if len(e.vertices) == 1 else ())

    def _group(self, key):
        groups: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            for v in key(e):
                groups[v].append(e.id)
        return tuple(tuple(g) for g in groups)

    def subgraph(self, max_size: int) -> "DirectedHypergraph":
        """Keep only edges with at most ``max_size`` vertices (ids are renumbered)."""
        return DirectedHypergraph(
            self.n,
            [(e.vertices, e.value) for e in self.edges if len(e.vertices) <= max_size],
        )

    _SHARED = ("r", "degree_table", "ending_at", "starting_at", "incident", "self_loops")

    def with_values(self, values: Sequence[float]) -> "DirectedHypergraph":
        """Same vertices and edge lists with new edge values.

        Structural indexes already computed on ``self`` are shared, which makes
        this cheap when many graphs differ only in their values.
        """
        values = [float(v) for v in values]
        if len(values) != self.m:
            raise InputError(f"{len(values)} values for {self.m} edges")
        for i, v in enumerate(values):
            if not v >= 0.0:
                raise InputError(f"edge {i} has negative or NaN value {v}")
        new = object.__new__(DirectedHypergraph)
        new.n = self.n
        new.edges = tuple(Hyperedge(e.id, e.vertices, v) for e, v in zip(self.edges, values))
        for name in self._SHARED:
            if name in self.__dict__:
                new.__dict__[name] = self.__dict__[name]
        return new

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[Sequence[int], float]]) -> "DirectedHypergraph":
        return cls(n, edges)


def _check_edge(idx, verts, value, n) -> Hyperedge:
    verts = tuple(int(v) for v in verts)
    if not verts:
        raise InputError(f"edge {idx} is empty")
    if len(set(verts)) != len(verts):
        raise InputError(f"edge {idx} repeats a vertex: {verts}")
    for v in verts:
        if not 0 <= v < n:
            raise InputError(f"edge {idx} references vertex {v} outside [0, {n})")
    value = float(value)
    if not value >= 0.0:
        raise InputError(f"edge {idx} has negative or NaN value {value}")
    return Hyperedge(idx, verts, value)


def check_sequence(H: DirectedHypergraph, sigma: Sequence[int]) -> tuple[int, ...]:
    sigma = tuple(int(v) for v in sigma)
    if len(set(sigma)) != len(sigma):
        raise InputError(f"sequence repeats a vertex: {sigma}")
    for v in sigma:
        if not 0 <= v < H.n:
            raise InputError(f"vertex {v} outside [0, {H.n})")
    return sigma


def ordered_intersection(sigma: Sequence, vertex_set) -> tuple:
    """Members of ``vertex_set`` in the order they occur in ``sigma``."""
    return tuple(v for v in sigma if v in vertex_set)


def is_subsequence(needle: Sequence, haystack: Sequence) -> bool:
    """True if ``needle`` occurs in ``haystack`` in order, not necessarily contiguously."""
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def _positions(sigma):
    return {v: i for i, v in enumerate(sigma)}


def is_induced(edge: Hyperedge, pos: dict) -> bool:
    """All vertices of ``edge`` appear in the position map in edge order."""
    prev = None
    for v in edge.vertices:
        p = pos.get(v)
        if p is None or (prev is not None and p <= prev):
            return False
        prev = p
    return True


def induced_edges(H: DirectedHypergraph, sigma: Sequence[int]) -> frozenset[int]:
    """Ids of edges whose vertices all appear in ``sigma`` in the edge's order."""
    pos = _positions(sigma)
    out = []
    seen = set()
    for v in sigma:
        for eid in H.ending_at[v]:
            if eid not in seen and is_induced(H.edges[eid], pos):
                seen.add(eid)
                out.append(eid)
    return frozenset(out)


def eligible_prefix_edges(H: DirectedHypergraph, sigma: Sequence[int]) -> frozenset[int]:
    """Edges whose intersection with ``sigma`` (in sigma's order) is a prefix of the edge.

    Fully induced edges count as their own prefix and are included.
    """
    out = []
    for e in H.edges:
        inter = ordered_intersection(sigma, set(e.vertices))
        if inter == e.vertices[: len(inter)]:
            out.append(e.id)
    return frozenset(out)


def eligible_suffix_edges(H: DirectedHypergraph, sigma: Sequence[int]) -> frozenset[int]:
    """Mirror of :func:`eligible_prefix_edges` with a suffix test."""
    out = []
    for e in H.edges:
        inter = ordered_intersection(sigma, set(e.vertices))
        if not inter or inter == e.vertices[len(e.vertices) - len(inter):]:
            out.append(e.id)
    return frozenset(out)


def degrees(H: DirectedHypergraph) -> DegreeTable:
    """In/out degree per vertex.

    A self-loop adds 1 to both degrees of its vertex.  Any longer edge adds 1
    to ``d_in(v)`` for every vertex but its first and 1 to ``d_out(v)`` for
    every vertex but its last.
    """
    d_in = [0] * H.n
    d_out = [0] * H.n
    for e in H.edges:
        verts = e.vertices
        if len(verts) == 1:
            d_in[verts[0]] += 1
            d_out[verts[0]] += 1
            continue
        for v in verts[1:]:
            d_in[v] += 1
        for v in verts[:-1]:
            d_out[v] += 1
    return DegreeTable(tuple(d_in), tuple(d_out))
