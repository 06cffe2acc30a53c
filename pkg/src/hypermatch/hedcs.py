"""HyperEdge Degree Constrained Subgraphs (HEDCS).

A subgraph H of G is an HEDCS(beta, beta_minus) when every edge of H has
vertex-degree sum (degrees taken in H) at most ``beta`` and every edge of G
outside H has degree sum at least ``beta_minus``.

Everything here can be restricted to a *universe* of host edges: with
``within`` given, H is checked or built as an HEDCS of the edge-subgraph
``G[within]`` while indices stay in host numbering. That is how the
per-machine pieces of the parallel algorithm are certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import HostMismatch, ParameterGap
from .hypergraph import Hypergraph


@dataclass(frozen=True)
class HedcsParams:
    beta: int
    beta_minus: int

    def __post_init__(self):
        if not self.beta >= self.beta_minus >= 0:
            raise ValueError(
                f"need beta >= beta_minus >= 0, got ({self.beta}, {self.beta_minus})")

    @property
    def gap(self) -> int:
        return self.beta - self.beta_minus

    @property
    def lam(self) -> float:
        """lambda such that beta_minus = (1 - lambda) * beta."""
        return 1.0 - self.beta_minus / self.beta if self.beta else 0.0

    def constructible(self, d: int) -> bool:
        return self.gap >= d - 1

    @classmethod
    def from_lambda(cls, beta: int, lam: float) -> "HedcsParams":
        # degree sums are integers, so ">= (1-lam)*beta" is ">= ceil(...)"
        return cls(beta, max(0, math.ceil((1.0 - lam) * beta - 1e-12)))

    @classmethod
    def theoretical(cls, n: int, d: int) -> "HedcsParams":
        """beta = 500 d^3 n^2 ln^3 n and lambda = 1 / (2 n ln n)."""
        ln = math.log(max(n, 2))
        beta = math.ceil(500 * d ** 3 * n ** 2 * ln ** 3)
        return cls.from_lambda(beta, 1.0 / (2 * n * ln))

    @classmethod
    def theoretical_linear(cls, n: int, d: int) -> "HedcsParams":
        """beta = 500 d^3 ln^4 n and lambda = 1 / (2 ln^2 n), for linear inputs."""
        ln = math.log(max(n, 2))
        beta = math.ceil(500 * d ** 3 * ln ** 4)
        return cls.from_lambda(beta, 1.0 / (2 * ln ** 2))


class Violation(NamedTuple):
    edge: int
    prop: str  # "P1" or "P2"
    degree_sum: int


@dataclass
class HedcsReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class HedcsSubgraph:
    host: Hypergraph = field(repr=False)
    members: frozenset[int]
    params: HedcsParams
    degrees: np.ndarray = field(repr=False)
    within: tuple[int, ...] | None = field(default=None, repr=False)
    fixes: int = 0
    # (edge, "P1" | "P2") per fix, only when constructed with trace=True
    fix_log: tuple[tuple[int, str], ...] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def universe(self) -> Sequence[int]:
        return range(self.host.m) if self.within is None else self.within

    def as_hypergraph(self) -> Hypergraph:
        return self.host.subgraph(sorted(self.members))


def _universe(G: Hypergraph, within: Iterable[int] | None) -> Sequence[int]:
    return range(G.m) if within is None else tuple(within)


def verify_hedcs(G: Hypergraph, members: Iterable[int], params: HedcsParams,
                 within: Iterable[int] | None = None) -> HedcsReport:
    """Check P1 on every member edge and P2 on every other edge of the
    universe; the report lists each violating edge."""
    universe = _universe(G, within)
    member_set = set(members)
    if within is not None and not member_set.issubset(universe):
        raise ValueError("members must lie inside the universe")
    for i in member_set:
        if not 0 <= i < G.m:
            raise ValueError(f"edge index {i} not in host")
    deg = [0] * G.n
    for i in member_set:
        for v in G.edges[i]:
            deg[v] += 1
    bad = []
    for i in universe:
        s = sum(deg[v] for v in G.edges[i])
        if i in member_set:
            if s > params.beta:
                bad.append(Violation(i, "P1", s))
        elif s < params.beta_minus:
            bad.append(Violation(i, "P2", s))
    return HedcsReport(not bad, bad)


def construct_hedcs(G: Hypergraph, params: HedcsParams, seed=None,
                    within: Iterable[int] | None = None,
                    trace: bool = False) -> HedcsSubgraph:
    """Local-fix construction starting from H = G (or H = G[within]).

    Edges are scanned in one seeded shuffled order, pass after pass; an edge
    found violating P1 is removed and one violating P2 is added, using the
    degrees at that moment. The loop stops after a pass with no fix.
    """
    d = G.d
    if not params.constructible(d):
        raise ParameterGap(
            f"beta - beta_minus = {params.gap} < d - 1 = {d - 1}; termination not guaranteed")
    universe = _universe(G, within)
    edges = G.edges
    inside = bytearray(G.m)
    deg = [0] * G.n
    for i in universe:
        inside[i] = 1
        for v in edges[i]:
            deg[v] += 1
    rng = np.random.default_rng(seed)
    order = [universe[j] for j in rng.permutation(len(universe))]
    beta, beta_minus = params.beta, params.beta_minus
    fixes = 0
    log: list[tuple[int, str]] | None = [] if trace else None
    # the potential-range argument caps the number of fixes
    cap = potential_range_bound(G, params.beta, universe) + 1
    changed = True
    while changed:
        changed = False
        for i in order:
            e = edges[i]
            s = 0
            for v in e:
                s += deg[v]
            if inside[i]:
                if s > beta:
                    inside[i] = 0
                    for v in e:
                        deg[v] -= 1
                else:
                    continue
                kind = "P1"
            elif s < beta_minus:
                inside[i] = 1
                for v in e:
                    deg[v] += 1
                kind = "P2"
            else:
                continue
            fixes += 1
            changed = True
            if log is not None:
                log.append((i, kind))
            if fixes > cap:
                raise RuntimeError("fix count exceeded the potential bound")
    members = frozenset(i for i in universe if inside[i])
    return HedcsSubgraph(
        host=G, members=members, params=params,
        degrees=np.asarray(deg, dtype=np.int64),
        within=None if within is None else tuple(universe),
        fixes=fixes, fix_log=None if log is None else tuple(log))


def potential_scaled(G: Hypergraph, members: Iterable[int], beta: int) -> int:
    """d times the potential, an exact integer:
    ``(2 beta - (d-1)) * sum_v deg(v) - d * sum_{e in H} sum_{u in e} deg(u)``."""
    d = G.d
    member_list = list(members)
    deg = [0] * G.n
    for i in member_list:
        for v in G.edges[i]:
            deg[v] += 1
    inner = 0
    for i in member_list:
        for u in G.edges[i]:
            inner += deg[u]
    return (2 * beta - (d - 1)) * sum(deg) - d * inner


def potential(G: Hypergraph, members: Iterable[int], beta: int) -> Fraction:
    return Fraction(potential_scaled(G, members, beta), G.d)


def potential_range_bound(G: Hypergraph, beta: int,
                          within: Iterable[int] | None = None) -> int:
    """Upper bound on the number of fixes when starting from H = G[within].

    The potential equals ``a * sum deg - sum deg^2`` with
    ``a = (2 beta - d + 1) / d``, so it never exceeds ``n a^2 / 4``; every fix
    raises it by at least one.
    """
    d = G.d
    a = Fraction(2 * beta - d + 1, d)
    top = G.n * a * a / 4
    start = potential(G, _universe(G, within), beta)
    return max(0, math.floor(top - start))


def fix_step_bound(n: int, d: int, beta: int) -> int:
    """ceil((2/d) n beta^2) + 1."""
    return math.ceil(Fraction(2 * n * beta * beta, d)) + 1


def degree_distribution_distance(A: HedcsSubgraph, B: HedcsSubgraph) -> int:
    """max over vertices of |deg_A(v) - deg_B(v)|."""
    if A.host != B.host or A.params != B.params:
        raise HostMismatch("subgraphs must share host and parameters")
    if len(A.degrees) == 0:
        return 0
    return int(np.max(np.abs(A.degrees - B.degrees)))


def _draws(m: int, seed) -> np.ndarray:
    return np.random.default_rng(seed).random(m)


def sample_host_edges(G: Hypergraph, p: float, seed) -> list[int]:
    """Keep each host edge independently with probability ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    u = _draws(G.m, seed)
    return [i for i in range(G.m) if u[i] < p]


def sample_edges(H: HedcsSubgraph, p: float, seed) -> frozenset[int]:
    """Keep each member edge of H independently with probability ``p``.

    One uniform is drawn per *host* edge, so with the same seed the result
    is exactly ``H ∩ sample_host_edges(host, p, seed)``.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    u = _draws(H.host.m, seed)
    return frozenset(i for i in H.members if u[i] < p)


def degree_sum_envelope(G: Hypergraph, members: Iterable[int],
                        within: Iterable[int] | None = None) -> tuple[int, int | None]:
    """(max degree sum over members, min degree sum over non-members).

    These are the tightest (beta, beta_minus) for which ``members`` is an
    HEDCS of the universe; the second entry is None if no edge is left out.
    """
    member_set = set(members)
    deg = [0] * G.n
    for i in member_set:
        for v in G.edges[i]:
            deg[v] += 1
    top, low = 0, None
    for i in _universe(G, within):
        s = sum(deg[v] for v in G.edges[i])
        if i in member_set:
            top = max(top, s)
        elif low is None or s < low:
            low = s
    return top, low
