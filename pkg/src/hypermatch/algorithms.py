"""The three MPC matching algorithms, run on the simulated engine.

* :func:`greedy_coreset` - random k-partition, a maximal (or maximum)
  matching per machine, sequential merge on machine 0. Three rounds.
* :func:`iterated_sampling` - repeated edge sampling into one coordinator
  until the residual graph fits; always returns a maximal matching.
* :func:`hedcs_matching` - random k-partition, an HEDCS per machine, greedy
  maximal matching on the union. Three rounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AttemptsExhausted, BudgetExceeded, ParameterGap, SampleOverflow
from .hedcs import HedcsParams, construct_hedcs, degree_sum_envelope
from .hypergraph import Hypergraph, Matching, greedy_extend, is_maximal
from .mpc import MachineState, MpcEngine, RoundTrace, contiguous_parts, random_k_partition
from .oracle import maximum_matching_exact

log = logging.getLogger(__name__)

CENTRAL = 0
DEFAULT_EXACT_BUDGET = 100_000


@dataclass
class MpcResult:
    matching: Matching
    trace: RoundTrace
    # per machine: (part edge ids, coreset edge ids) as computed on that machine
    coresets: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.matching)

    @property
    def rounds(self) -> int:
        return self.trace.num_rounds


def derive_seed(*parts: int) -> int:
    """A 63-bit seed derived from integer parts."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint64)[0] >> 1)


def default_budget(G: Hypergraph, k: int) -> int:
    """s = 2m/k, the per-machine cap used in the experiments."""
    return max(1, math.ceil(2 * G.m / k))


def _partition_round(engine: MpcEngine, G: Hypergraph, k: int, seed) -> list[MachineState]:
    """Round 1 of the coreset algorithms: input blocks are rerouted to the
    machines chosen by a random k-partition."""
    parts = random_k_partition(G, k, derive_seed(seed, 1)).parts
    owner = np.empty(G.m, dtype=np.int64)
    for j, p in enumerate(parts):
        owner[list(p)] = j
    machines = [MachineState(j, tuple(b)) for j, b in enumerate(contiguous_parts(G.m, k))]

    def keep_own(st, rng):
        return MachineState(st.machine_id, tuple(i for i in st.edges if owner[i] == st.machine_id))

    def route(states):
        plan: dict[int, dict[int, list[int]]] = {}
        for st in machines:
            for i in st.edges:
                dst = int(owner[i])
                if dst != st.machine_id:
                    plan.setdefault(st.machine_id, {}).setdefault(dst, []).append(i)
        return plan

    states = engine.round(machines, keep_own, route, label="partition")
    # canonical in-part order, independent of how blocks were laid out
    return [MachineState(st.machine_id, tuple(sorted(st.edges))) for st in states]


def _central(central_s: int | None) -> dict[int, int] | None:
    return None if central_s is None else {CENTRAL: central_s}


def _send_to_central(states):
    return {st.machine_id: {CENTRAL: st.edges} for st in states if st.machine_id != CENTRAL}


def greedy_coreset(G: Hypergraph, k: int, matcher: str = "greedy", seed: int = 0,
                   s: int | None = None, exact_budget: int = DEFAULT_EXACT_BUDGET,
                   workers: int = 1, central_s: int | None = None) -> MpcResult:
    """Greedy coreset matching over a random k-partition.

    ``matcher`` is ``"greedy"`` (maximal matching in part order) or
    ``"exact"`` (maximum matching, falling back to greedy when a part
    exceeds ``exact_budget`` search nodes). ``central_s`` gives machine 0
    its own budget; by default it has ``s`` like every other machine.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if matcher not in ("greedy", "exact"):
        raise ValueError(f"unknown matcher {matcher!r}")
    s = default_budget(G, k) if s is None else s
    engine = MpcEngine(s, seed=derive_seed(seed, 2), d=G.d, workers=workers,
                       budgets=_central(central_s))
    states = _partition_round(engine, G, k, seed)
    coresets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    fallbacks = []

    def local_match(st, rng):
        part = st.edges
        if matcher == "exact":
            try:
                sub = maximum_matching_exact(G.subgraph(part), exact_budget)
                chosen = tuple(sorted(part[j] for j in sub.edges))
            except BudgetExceeded:
                fallbacks.append(st.machine_id)
                chosen = tuple(greedy_extend(G, part))
        else:
            chosen = tuple(greedy_extend(G, part))
        coresets[st.machine_id] = (part, chosen)
        return MachineState(st.machine_id, chosen)

    states = engine.round(states, local_match, _send_to_central, label="local-matching")

    def merge(st, rng):
        if st.machine_id != CENTRAL:
            return MachineState(st.machine_id)
        # edges arrive in machine order; each block is itself a matching
        return MachineState(CENTRAL, tuple(greedy_extend(G, st.edges)))

    states = engine.round(states, merge, None, label="merge")
    M = Matching(G, states[CENTRAL].edges)
    engine.trace.notes.update(k=k, matcher=matcher, exact_fallbacks=len(fallbacks))
    return MpcResult(M, engine.trace, [coresets[j] for j in range(k)])


def hedcs_machine_count(m: int, n: int, s: int) -> int:
    """k = m / (s ln n), rounded and clamped to [1, m]."""
    if m == 0:
        return 1
    k = round(m / (s * math.log(max(n, 2))))
    return int(min(max(k, 1), m))


def hedcs_matching(G: Hypergraph, s: int | None, params: HedcsParams, seed: int = 0,
                   k: int | None = None, workers: int = 1,
                   central_s: int | None = None) -> MpcResult:
    """HEDCS coreset matching.

    Without an explicit ``k`` the machine count is ``m / (s ln n)`` and the
    per-machine budget becomes ``max(s, 2m/k)``, since each part holds about
    ``s ln n`` edges. With ``s`` None the budget is ``2m/k``. The union of the per-machine HEDCSs is kept
    as a multigraph and a greedy maximal matching of it is returned.
    ``info`` records the union's measured degree-sum envelope. The union
    must fit on machine 0, whose budget is ``central_s`` (default ``s``).
    """
    if not params.constructible(G.d):
        raise ParameterGap(
            f"beta - beta_minus = {params.gap} < d - 1 = {G.d - 1}")
    if k is None:
        if s is None:
            raise ValueError("need s or k")
        k = hedcs_machine_count(G.m, G.n, s)
        # parts then hold about s ln n edges each; charge them like the
        # experiments do, against 2m/k
        s = max(s, default_budget(G, k))
    s = default_budget(G, k) if s is None else s
    engine = MpcEngine(s, seed=derive_seed(seed, 3), d=G.d, workers=workers,
                       budgets=_central(central_s))
    states = _partition_round(engine, G, k, seed)
    coresets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    fixes: dict[int, int] = {}

    def local_hedcs(st, rng):
        H = construct_hedcs(G, params, seed=rng, within=st.edges)
        members = tuple(sorted(H.members))
        coresets[st.machine_id] = (st.edges, members)
        fixes[st.machine_id] = H.fixes
        return MachineState(st.machine_id, members)

    states = engine.round(states, local_hedcs, _send_to_central, label="local-hedcs")
    union = states[CENTRAL].edges
    C = G.subgraph(union, multigraph=True)

    def final(st, rng):
        if st.machine_id != CENTRAL:
            return MachineState(st.machine_id)
        picked = greedy_extend(C, range(C.m))
        return MachineState(CENTRAL, tuple(union[j] for j in picked))

    states = engine.round(states, final, None, label="union-matching")
    M = Matching(G, states[CENTRAL].edges)
    top, low = degree_sum_envelope(G, union)
    info = {
        "k": k,
        "union_size": len(union),
        "beta_C": top,
        "beta_C_minus": low,
        "k_beta": k * params.beta,
        "k_beta_minus": k * params.beta_minus,
        "fixes": [fixes[j] for j in range(k)],
    }
    engine.trace.notes.update(info)
    return MpcResult(M, engine.trace, [coresets[j] for j in range(k)], info)


def _sampling_attempt(G: Hypergraph, s: int, k: int, seed: int,
                      attempt: int) -> tuple[list[int], RoundTrace, int]:
    """One run of the sampling loop. Machine 0 coordinates; machines
    ``1..k`` hold the input in contiguous blocks.

    Rounds: one sampling round, then per iteration a matching round on the
    coordinator (which broadcasts the unmatched vertices) and a filtering
    round in which the data machines either ship the residual graph (if it
    fits next to the matching) or sample it again; a last round solves the
    residual graph.
    """
    engine = MpcEngine(s, seed=derive_seed(seed, 4, attempt), d=G.d)
    edges = G.edges
    d = G.d
    machines = [MachineState(CENTRAL)] + [
        MachineState(j + 1, tuple(b)) for j, b in enumerate(contiguous_parts(G.m, k))]
    matched = bytearray(G.n)
    M: list[int] = []
    state = {"iterations": 0, "done": False}

    def draw_uniforms(st, rng):
        if st.machine_id == CENTRAL:
            return st
        return MachineState(st.machine_id, st.edges, {"u": rng.random(len(st.edges))})

    def sample_or_ship(states):
        data = [st for st in states if st.machine_id != CENTRAL]
        total = sum(st.load for st in data)
        if state["iterations"] > 0 and total + len(M) <= s:
            state["done"] = True
            return {st.machine_id: {CENTRAL: st.edges} for st in data if st.edges}
        state["iterations"] += 1
        p = min(1.0, s / (5 * total * d)) if total else 1.0
        plan = {}
        sampled = 0
        for st in data:
            pick = [i for i, u in zip(st.edges, st.data["u"]) if u < p]
            sampled += len(pick)
            if pick:
                plan[st.machine_id] = {CENTRAL: pick}
        if sampled + len(M) > s:
            raise SampleOverflow(sampled + len(M), s, attempt)
        return plan

    def coordinator_match(st, rng):
        if st.machine_id != CENTRAL:
            return st
        received = st.edges[len(M):]
        M.extend(greedy_extend(G, received, matched))
        return MachineState(CENTRAL, tuple(M))

    def broadcast_unmatched(states):
        free = [v for v in range(G.n) if not matched[v]]
        return {st.machine_id: {"unmatched": free} for st in states if st.machine_id != CENTRAL}

    def filter_residual(st, rng):
        if st.machine_id == CENTRAL:
            return st
        keep = tuple(i for i in st.edges if not any(matched[v] for v in edges[i]))
        return MachineState(st.machine_id, keep, {"u": rng.random(len(keep))})

    states = engine.round(machines, draw_uniforms, sample_or_ship, label="sample")
    while True:
        states = engine.round(states, coordinator_match, None, label="match-sample",
                              share=broadcast_unmatched)
        states = engine.round(states, filter_residual, sample_or_ship, label="filter")
        if state["done"]:
            break
        if state["iterations"] > 64 * max(1, G.n):
            raise RuntimeError("sampling loop failed to shrink the residual graph")
    states = engine.round(states, coordinator_match, None, label="final-solve")
    return list(M), engine.trace, state["iterations"]


def iterated_sampling(G: Hypergraph, s: int | None = None, seed: int = 0,
                      max_attempts: int = 5, k: int | None = None) -> MpcResult:
    """Maximal matching by iterated sampling.

    Each iteration samples the current edge set with probability
    ``min(1, s / (5 |S| d))`` onto the coordinator, extends the matching
    there, and restricts S to edges on unmatched vertices. The accumulated
    matching is charged to the coordinator, so the loop ends once the
    residual graph plus the matching fits in ``s``. An attempt whose sample
    does not fit raises SampleOverflow internally and is retried with a
    fresh seed, up to ``max_attempts`` times.

    ``s`` defaults to ``20 d n``; ``k`` (data machines holding the input)
    defaults to ``ceil(m / s)``.
    """
    s = 20 * G.d * G.n if s is None else s
    if s < 1:
        raise ValueError("s must be >= 1")
    if k is None:
        k = max(1, math.ceil(G.m / s))
    failures = []
    for attempt in range(1, max_attempts + 1):
        try:
            M, trace, iterations = _sampling_attempt(G, s, k, seed, attempt)
        except SampleOverflow as exc:
            log.debug("iterated sampling attempt %d overflowed: %s", attempt, exc)
            failures.append(exc)
            continue
        matching = Matching(G, tuple(M))
        if not is_maximal(G, matching):
            raise AssertionError("iterated sampling returned a non-maximal matching")
        trace.attempts = attempt
        trace.notes.update(k=k, iterations=iterations, failed_attempts=len(failures))
        return MpcResult(matching, trace, info={"iterations": iterations, "attempts": attempt})
    raise AttemptsExhausted(f"all {max_attempts} attempts overflowed s={s}")
