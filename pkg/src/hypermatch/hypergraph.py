"""d-uniform hypergraphs, matchings and the sequential greedy matcher.

Vertices are dense integers ``0..n-1``. Every edge is stored as a strictly
ascending tuple of ``d`` vertex ids, so two edges are equal iff their tuples
are equal and disjointness checks reduce to a per-vertex "matched" flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateEdge, InvalidMatching, VertexOutOfRange, WrongCardinality

Edge = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable d-uniform hypergraph.

    ``edges`` must already be canonical (ascending, in range, no repeats);
    use :func:`build_hypergraph` to canonicalize raw input.
    """

    n: int
    d: int
    edges: tuple[Edge, ...]
    multigraph: bool = False

    def __post_init__(self):
        if self.d < 2:
            raise WrongCardinality(f"edge cardinality must be >= 2, got {self.d}")
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        for i, e in enumerate(self.edges):
            _check_canonical(e, self.n, self.d, i)
        if not self.multigraph and len(set(self.edges)) != len(self.edges):
            seen = set()
            for i, e in enumerate(self.edges):
                if e in seen:
                    raise DuplicateEdge(f"edge {i} {e} appears more than once")
                seen.add(e)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.d, self.edges, self.multigraph) == (
            other.n, other.d, other.edges, other.multigraph)

    def __hash__(self):
        return hash((self.n, self.d, self.edges, self.multigraph))

    def __repr__(self):
        return f"Hypergraph(n={self.n}, d={self.d}, m={self.m}, multigraph={self.multigraph})"

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """``incidence[v]`` lists the indices of edges containing ``v``."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Edges as integer bitmasks over vertices."""
        out = []
        for e in self.edges:
            b = 0
            for v in e:
                b |= 1 << v
            out.append(b)
        return tuple(out)

    def as_array(self) -> np.ndarray:
        """Edges as an ``(m, d)`` int array."""
        if not self.edges:
            return np.zeros((0, self.d), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def degrees(self, members: Iterable[int] | None = None) -> np.ndarray:
        """Per-vertex degree counts within ``members`` (all edges if None)."""
        return degree_profile(self, members)

    def subgraph(self, indices: Iterable[int], multigraph: bool | None = None) -> "Hypergraph":
        """Edge-subgraph on the same vertex set; edge ``j`` of the result is
        ``self.edges[indices[j]]``."""
        mg = self.multigraph if multigraph is None else multigraph
        return Hypergraph(self.n, self.d, tuple(self.edges[i] for i in indices), mg)

    def is_linear(self) -> bool:
        """True iff any two edges share at most one vertex."""
        seen = set()
        for e in self.edges:
            for a in range(len(e)):
                for b in range(a + 1, len(e)):
                    pair = (e[a], e[b])
                    if pair in seen:
                        return False
                    seen.add(pair)
        return True


def _check_canonical(e: Sequence[int], n: int, d: int, index: int) -> None:
    if len(e) != d:
        raise WrongCardinality(f"edge {index} has {len(e)} vertices, expected {d}")
    prev = -1
    for v in e:
        if v <= prev:
            raise WrongCardinality(f"edge {index} {tuple(e)} is not strictly ascending")
        prev = v
    if e and (e[0] < 0 or e[-1] >= n):
        raise VertexOutOfRange(f"edge {index} {tuple(e)} has a vertex outside [0, {n})")


def build_hypergraph(n: int, d: int, raw_edges: Iterable[Sequence[int]],
                     multigraph: bool = False) -> Hypergraph:
    """Canonicalize ``raw_edges`` into a :class:`Hypergraph`.

    Each edge is sorted; an edge with the wrong size or a repeated vertex
    raises :class:`WrongCardinality`, an out-of-range vertex raises
    :class:`VertexOutOfRange`, and a repeated edge raises
    :class:`DuplicateEdge` unless ``multigraph`` is set. First-appearance
    order is preserved.
    """
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for i, raw in enumerate(raw_edges):
        e = tuple(sorted(int(v) for v in raw))
        if len(e) != d:
            raise WrongCardinality(f"edge {i} has {len(e)} vertices, expected {d}")
        if len(set(e)) != d:
            raise WrongCardinality(f"edge {i} {tuple(raw)} repeats a vertex")
        if e[0] < 0 or e[-1] >= n:
            raise VertexOutOfRange(f"edge {i} {tuple(raw)} has a vertex outside [0, {n})")
        if not multigraph:
            if e in seen:
                raise DuplicateEdge(f"edge {i} {e} duplicates an earlier edge")
            seen.add(e)
        edges.append(e)
    return Hypergraph(n, d, tuple(edges), multigraph)


def degree_profile(G: Hypergraph, members: Iterable[int] | None = None) -> np.ndarray:
    deg = np.zeros(G.n, dtype=np.int64)
    idx = range(G.m) if members is None else members
    for i in idx:
        for v in G.edges[i]:
            deg[v] += 1
    return deg


@dataclass(frozen=True, eq=False)
class Matching:
    """Pairwise vertex-disjoint edges of ``host``, kept in selection order."""

    host: Hypergraph = field(repr=False)
    edges: tuple[int, ...]

    def __post_init__(self):
        check_matching(self.host, self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, index) -> bool:
        return index in self.edge_set

    def __eq__(self, other):
        if not isinstance(other, Matching):
            return NotImplemented
        return self.host == other.host and self.edge_set == other.edge_set

    def __hash__(self):
        return hash(self.edge_set)

    @property
    def size(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[int]:
        return frozenset(self.edges)

    @cached_property
    def covered(self) -> frozenset[int]:
        return frozenset(v for i in self.edges for v in self.host.edges[i])

    def as_edges(self) -> list[Edge]:
        return [self.host.edges[i] for i in self.edges]


def check_matching(G: Hypergraph, indices: Iterable[int]) -> None:
    """Raise :class:`InvalidMatching` unless ``indices`` is a matching of G."""
    used = bytearray(G.n)
    seen = set()
    for i in indices:
        if not (0 <= i < G.m):
            raise InvalidMatching(f"edge index {i} not in host with m={G.m}")
        if i in seen:
            raise InvalidMatching(f"edge index {i} listed twice")
        seen.add(i)
        for v in G.edges[i]:
            if used[v]:
                raise InvalidMatching(f"edge {i} {G.edges[i]} shares vertex {v}")
            used[v] = 1


def is_matching(G: Hypergraph, indices: Iterable[int]) -> bool:
    try:
        check_matching(G, indices)
    except InvalidMatching:
        return False
    return True


def greedy_maximal_matching(G: Hypergraph, order: Sequence[int] | None = None) -> Matching:
    """Scan edges in ``order`` (natural order if None), keeping each edge
    that is disjoint from those already kept."""
    if order is None:
        order = range(G.m)
    elif len(order) != G.m or sorted(order) != list(range(G.m)):
        raise ValueError("order must be a permutation of the edge indices")
    return Matching(G, tuple(greedy_extend(G, order)))


def greedy_extend(G: Hypergraph, candidates: Iterable[int],
                  matched: bytearray | None = None) -> list[int]:
    """Greedily add ``candidates`` to a partial matching.

    ``matched`` is a per-vertex flag array that is updated in place; the
    return value lists the newly added edge indices.
    """
    if matched is None:
        matched = bytearray(G.n)
    edges = G.edges
    picked = []
    for i in candidates:
        e = edges[i]
        for v in e:
            if matched[v]:
                break
        else:
            for v in e:
                matched[v] = 1
            picked.append(i)
    return picked


def matched_flags(G: Hypergraph, M: Matching | Iterable[int]) -> bytearray:
    flags = bytearray(G.n)
    for i in M:
        for v in G.edges[i]:
            flags[v] = 1
    return flags


def is_maximal(G: Hypergraph, M: Matching | Iterable[int]) -> bool:
    """True iff every edge of G meets a matched vertex."""
    flags = matched_flags(G, M)
    for e in G.edges:
        if not any(flags[v] for v in e):
            return False
    return True


def unmatched_edge_indices(G: Hypergraph, flags: bytearray,
                           candidates: Iterable[int] | None = None) -> list[int]:
    """Indices (among ``candidates``) of edges with no flagged vertex."""
    edges = G.edges
    idx = range(G.m) if candidates is None else candidates
    return [i for i in idx if not any(flags[v] for v in edges[i])]


def induced_unmatched_subgraph(G: Hypergraph, M: Matching | Iterable[int]) -> Hypergraph:
    """Edges of G lying entirely on vertices unmatched by M (same n)."""
    keep = unmatched_edge_indices(G, matched_flags(G, M))
    return G.subgraph(keep)
