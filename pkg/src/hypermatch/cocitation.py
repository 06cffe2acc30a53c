"""Co-citation hypergraphs from directed citation lists.

Every article that has at least one citation link becomes the centroid of
an edge made of itself and all articles it cites or is cited by. Edge sizes
vary, so the result is a :class:`CitationHypergraph`; the matching code
needs a d-uniform :class:`Hypergraph`, obtained with :meth:`to_uniform`:

* ``"filter"`` keeps only the edges of size d (default: the modal size);
* ``"pad"`` fills smaller edges with fresh dummy vertices, one per missing
  slot, and drops edges larger than d.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .hypergraph import Hypergraph, build_hypergraph


@dataclass(frozen=True)
class CitationHypergraph:
    n: int
    edges: tuple[tuple[int, ...], ...]
    articles: tuple[int, ...]  # dense vertex id -> original article id
    duplicates_dropped: int = 0

    @property
    def m(self) -> int:
        return len(self.edges)

    def sizes(self) -> np.ndarray:
        return np.array([len(e) for e in self.edges], dtype=np.int64)

    def size_stats(self) -> tuple[float, float]:
        """(mean, population std) of edge sizes."""
        sz = self.sizes()
        if sz.size == 0:
            return 0.0, 0.0
        return float(sz.mean()), float(sz.std())

    def modal_size(self) -> int:
        if not self.edges:
            raise ValueError("empty hypergraph has no modal edge size")
        counts = Counter(len(e) for e in self.edges)
        # ties go to the smaller size
        return min(counts, key=lambda s: (-counts[s], s))

    def to_uniform(self, mode: str = "filter", d: int | None = None) -> tuple[Hypergraph, "UniformReport"]:
        if mode not in ("filter", "pad"):
            raise ValueError(f"mode must be 'filter' or 'pad', got {mode!r}")
        if d is None:
            d = self.modal_size() if self.edges else 2
        kept: list[tuple[int, ...]] = []
        n = self.n
        padded = 0
        for e in self.edges:
            if len(e) == d:
                kept.append(e)
            elif mode == "pad" and len(e) < d:
                extra = d - len(e)
                kept.append(e + tuple(range(n, n + extra)))
                n += extra
                padded += 1
        G = build_hypergraph(n, d, kept)
        rep = UniformReport(mode, d, self.m, len(kept), padded, n - self.n)
        return G, rep


@dataclass(frozen=True)
class UniformReport:
    mode: str
    d: int
    candidates: int
    kept: int
    padded: int
    dummy_vertices: int

    @property
    def coverage(self) -> float:
        """Fraction of candidate edges that survived."""
        return self.kept / self.candidates if self.candidates else 1.0


def build_cocitation_hypergraph(citations: Iterable[tuple[int, int]]) -> CitationHypergraph:
    """One edge per article with citation links: the article plus its in- and
    out-neighbours. Self-citations and repeated pairs are ignored, edges
    with fewer than two vertices cannot occur, and an edge produced by two
    centroids (a mutually citing pair with no other links) is kept once.
    Articles are renumbered densely in increasing id order."""
    nbrs: dict[int, set[int]] = {}
    for src, dst in citations:
        src, dst = int(src), int(dst)
        if src == dst:
            continue
        nbrs.setdefault(src, set()).add(dst)
        nbrs.setdefault(dst, set()).add(src)
    articles = tuple(sorted(nbrs))
    dense = {a: i for i, a in enumerate(articles)}
    seen: set[tuple[int, ...]] = set()
    edges = []
    for a in articles:
        e = tuple(sorted(dense[x] for x in nbrs[a] | {a}))
        if e in seen:
            continue
        seen.add(e)
        edges.append(e)
    dropped = len(articles) - len(edges)
    return CitationHypergraph(len(articles), tuple(edges), articles, dropped)


def random_citation_graph(n: int, links: int, seed=None) -> list[tuple[int, int]]:
    """``links`` distinct directed pairs (no self-citations, no pair cited
    both ways) drawn uniformly over ``n`` articles.

    With mean degree ``lam = 2 links / n`` the non-isolated articles have
    zero-truncated Poisson degrees, so edge sizes average about
    ``1 + lam / (1 - exp(-lam))``; ``n = 2708, links = 2158`` gives ~3.0 +- 1.1.
    """
    if links > n * (n - 1) // 2:
        raise ValueError("too many links for n articles")
    rng = np.random.default_rng(seed)
    out: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while len(out) < links:
        need = links - len(out)
        a = rng.integers(0, n, size=2 * need + 8)
        b = rng.integers(0, n, size=2 * need + 8)
        for x, y in zip(a.tolist(), b.tolist()):
            key = (min(x, y), max(x, y))
            if x == y or key in seen:
                continue
            seen.add(key)
            out.append((x, y))
            if len(out) == links:
                break
    return out
