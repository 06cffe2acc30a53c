"""Exact maximum matching by branch and bound, for small instances.

A subproblem is the set of edges avoiding every vertex already matched or
discarded. That set is determined by its *active* vertex mask (the union of
its edges), which is also the memo key. Subproblems split into connected
components; a component branches on its vertex with the fewest remaining
edges: one of those edges joins the matching, or the vertex is discarded.

Search is fail-low: ``solve(items, need)`` only has to be exact when the
optimum exceeds ``need``. Bounds: ``min(active // d, #edges)`` above, a
greedy matching below.
"""

from __future__ import annotations

from .errors import BudgetExceeded
from .hypergraph import Hypergraph, Matching

DEFAULT_BUDGET = 10_000_000

Item = tuple[int, int, tuple[int, ...]]  # (vertex bitmask, edge index, vertices)


def _split(items: list[Item]) -> list[tuple[int, list[Item]]]:
    groups: list[tuple[int, list[Item]]] = []
    for it in items:
        mask = it[0]
        merged = [it]
        changed = True
        while changed:
            changed = False
            keep = []
            for gmask, gitems in groups:
                if gmask & mask:
                    mask |= gmask
                    merged.extend(gitems)
                    changed = True
                else:
                    keep.append((gmask, gitems))
            groups = keep
        groups.append((mask, merged))
    return groups


def _greedy(items: list[Item]) -> tuple[int, ...]:
    used = 0
    out: tuple[int, ...] = ()
    for mask, idx, _ in items:
        if not mask & used:
            used |= mask
            out += (idx,)
    return out


class _Search:
    def __init__(self, n: int, d: int, budget: int):
        self.n = n
        self.d = d
        self.budget = budget
        self.nodes = 0
        # active mask -> (best matching found, proven upper bound)
        self.memo: dict[int, tuple[tuple[int, ...], int]] = {}

    def _ub(self, n_items: int, active: int) -> int:
        return min(active.bit_count() // self.d, n_items)

    def solve(self, items: list[Item], need: int = -1) -> tuple[int, ...]:
        if not items:
            return ()
        groups = _split(items)
        if len(groups) == 1:
            return self._component(groups[0][1], groups[0][0], need)
        ubs = [self._ub(len(g), a) for a, g in groups]
        order = sorted(range(len(groups)), key=lambda j: ubs[j])
        out: tuple[int, ...] = ()
        slack = sum(ubs)
        for pos, j in enumerate(order):
            active, sub = groups[j]
            slack -= ubs[j]
            part = self._component(sub, active, need - len(out) - slack)
            out += part
            if len(out) + slack <= need:
                for j2 in order[pos + 1:]:
                    out += _greedy(groups[j2][1])
                return out
        return out

    def _component(self, items: list[Item], active: int, need: int) -> tuple[int, ...]:
        hit = self.memo.get(active)
        if hit is not None and (len(hit[0]) == hit[1] or hit[1] <= need):
            return hit[0]
        ub = self._ub(len(items), active)
        best = _greedy(items) if hit is None else hit[0]
        if ub <= need or len(best) >= ub:
            self.memo[active] = (best, ub if len(best) >= ub else min(ub, need))
            return best
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.budget)
        cnt = [0] * self.n
        for _, _, verts in items:
            for v in verts:
                cnt[v] += 1
        pivot = min((v for v in range(self.n) if cnt[v]), key=cnt.__getitem__)
        pbit = 1 << pivot
        for mask, idx, _ in [it for it in items if it[0] & pbit]:
            bar = max(need, len(best))
            rest = []
            rest_active = 0
            for it in items:
                if not it[0] & mask:
                    rest.append(it)
                    rest_active |= it[0]
            if 1 + self._ub(len(rest), rest_active) <= bar:
                continue
            cand = (idx,) + self.solve(rest, bar - 1)
            if len(cand) > len(best):
                best = cand
                if len(best) >= ub:
                    break
        if len(best) < ub:
            bar = max(need, len(best))
            rest = []
            rest_active = 0
            for it in items:
                if not it[0] & pbit:
                    rest.append(it)
                    rest_active |= it[0]
            if self._ub(len(rest), rest_active) > bar:
                cand = self.solve(rest, bar)
                if len(cand) > len(best):
                    best = cand
        # exact when best beats need; otherwise only "optimum <= need" is known
        upper = len(best) if len(best) > need else min(ub, need)
        self.memo[active] = (best, max(upper, len(best)))
        return best


def maximum_matching_exact(G: Hypergraph, budget: int = DEFAULT_BUDGET) -> Matching:
    """Certified maximum matching of G.

    Raises :class:`BudgetExceeded` when more than ``budget`` subproblems
    would be branched on.
    """
    # parallel copies of an edge are interchangeable in a matching
    first_copy: dict[tuple[int, ...], int] = {}
    for i, e in enumerate(G.edges):
        first_copy.setdefault(e, i)
    masks = G.masks
    items = [(masks[i], i, G.edges[i]) for i in sorted(first_copy.values())]
    search = _Search(G.n, G.d, budget)
    return Matching(G, search.solve(items))


def matching_number(G: Hypergraph, budget: int = DEFAULT_BUDGET) -> int:
    return len(maximum_matching_exact(G, budget))
