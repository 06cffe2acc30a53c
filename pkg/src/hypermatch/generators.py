"""Random instance families: uniform d-uniform hypergraphs, random
geometric hypergraphs and random linear hypergraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import EdgeExplosion, TooManyEdges
from .hypergraph import Hypergraph

DEFAULT_EDGE_CEILING = 10_000_000


def random_uniform_hypergraph(n: int, m: int, d: int, seed) -> Hypergraph:
    """``m`` distinct d-subsets of ``range(n)``, each uniform at random.

    Duplicates are rejected and redrawn, so the result is a uniform random
    m-set of distinct edges listed in draw order.
    """
    total = math.comb(n, d)
    if m > total:
        raise TooManyEdges(f"m={m} exceeds C({n},{d})={total}")
    rng = np.random.default_rng(seed)
    if m == 0:
        return Hypergraph(n, d, ())
    if total <= 4 * m and total <= 2_000_000:
        # dense request: pick m of the enumerated subsets directly
        pick = rng.choice(total, size=m, replace=False)
        allsets = list(combinations(range(n), d))
        return Hypergraph(n, d, tuple(allsets[i] for i in pick))
    seen: set[tuple[int, ...]] = set()
    edges: list[tuple[int, ...]] = []
    while len(edges) < m:
        batch = max(16, 2 * (m - len(edges)))
        draws = np.sort(rng.integers(0, n, size=(batch, d)), axis=1)
        ok = np.all(draws[:, 1:] != draws[:, :-1], axis=1) if d > 1 else np.ones(batch, bool)
        for row in draws[ok]:
            e = tuple(int(v) for v in row)
            if e not in seen:
                seen.add(e)
                edges.append(e)
                if len(edges) == m:
                    break
    return Hypergraph(n, d, tuple(edges))


@dataclass(frozen=True)
class GeometricConfig:
    n: int
    r: float
    d: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.n < 0:
            raise ValueError("n must be non-negative")


def geometric_points(cfg: GeometricConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    return rng.random((cfg.n, 2))


def close_pairs(points: np.ndarray, r: float) -> list[list[int]]:
    """Forward adjacency: ``adj[u]`` holds the sorted ``v > u`` with
    ``|p_u - p_v| < r``, found through a grid of cell side ``r``."""
    n = len(points)
    cells: dict[tuple[int, int], list[int]] = {}
    keys = np.floor(points / r).astype(np.int64)
    for i in range(n):
        cells.setdefault((int(keys[i, 0]), int(keys[i, 1])), []).append(i)
    r2 = r * r
    adj: list[list[int]] = [[] for _ in range(n)]
    for (cx, cy), members in cells.items():
        cand: list[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cand.extend(cells.get((cx + dx, cy + dy), ()))
        cand_arr = np.asarray(cand, dtype=np.int64)
        cpts = points[cand_arr]
        for u in members:
            diff = cpts - points[u]
            dist2 = np.einsum("ij,ij->i", diff, diff)
            near = cand_arr[(dist2 < r2) & (cand_arr > u)]
            adj[u].extend(int(v) for v in near)
    for lst in adj:
        lst.sort()
    return adj


def random_geometric_hypergraph(cfg: GeometricConfig,
                                edge_ceiling: int = DEFAULT_EDGE_CEILING) -> Hypergraph:
    """All d-sets of uniform points in the unit square whose pairwise
    distances are all below ``r``, in lexicographic order."""
    points = geometric_points(cfg)
    adj = close_pairs(points, cfg.r)
    fwd = [set(a) for a in adj]
    d = cfg.d
    edges: list[tuple[int, ...]] = []

    def extend(clique: list[int], cand: list[int]):
        if len(clique) == d:
            edges.append(tuple(clique))
            if len(edges) > edge_ceiling:
                raise EdgeExplosion(f"more than {edge_ceiling} edges")
            return
        need = d - len(clique)
        for j, v in enumerate(cand):
            if len(cand) - j < need:
                break
            clique.append(v)
            extend(clique, [w for w in cand[j + 1:] if w in fwd[v]])
            clique.pop()

    for u in range(cfg.n):
        extend([u], adj[u])
    return Hypergraph(cfg.n, d, tuple(edges))


def random_linear_hypergraph(n: int, m: int, d: int, seed, max_tries: int = 200) -> Hypergraph:
    """Random edges such that any two share at most one vertex.

    Candidates overlapping an existing edge in two vertices are redrawn; if
    ``max_tries * m`` draws do not fill ``m`` edges the result is smaller.
    """
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    edges: list[tuple[int, ...]] = []
    tries = 0
    while len(edges) < m and tries < max_tries * max(m, 1):
        tries += 1
        e = tuple(sorted(int(v) for v in rng.choice(n, size=d, replace=False)))
        ps = list(combinations(e, 2))
        if any(p in pairs for p in ps):
            continue
        pairs.update(ps)
        edges.append(e)
    return Hypergraph(n, d, tuple(edges))
