"""Simulated MPC execution: k machines with a memory budget of ``s`` edges,
synchronous rounds, and per-round memory/traffic accounting.

Only edges are charged against ``s``; vertex lists and scalars kept in
:attr:`MachineState.data` are free. A machine's load in a round is what it
retains after local computation plus what it receives. Any load, send total
or receive total above ``s`` is recorded in the trace and raised as
:class:`~hypermatch.errors.MemoryViolation`.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import MemoryViolation
from .hypergraph import Hypergraph

TRACE_COLUMNS = ["round", "machine", "edges_held", "bytes_sent_equiv", "violation_flag"]
BYTES_PER_VERTEX_ID = 8


@dataclass(frozen=True)
class MpcConfig:
    k: int
    s: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")


@dataclass(frozen=True)
class KPartition:
    parts: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.parts)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]


def random_k_partition(G: Hypergraph, k: int, seed) -> KPartition:
    """Send every edge to one of ``k`` parts, independently and uniformly."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    owner = np.random.default_rng(seed).integers(0, k, size=G.m)
    parts: list[list[int]] = [[] for _ in range(k)]
    for i, j in enumerate(owner.tolist()):
        parts[j].append(i)
    return KPartition(tuple(tuple(p) for p in parts))


@dataclass(frozen=True)
class MachineState:
    machine_id: int
    edges: tuple[int, ...] = ()
    data: Mapping = field(default_factory=dict)

    @property
    def load(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class MachineRecord:
    machine: int
    held: int
    sent: int
    received: int
    violation: bool = False


@dataclass(frozen=True)
class RoundRecord:
    index: int
    label: str
    machines: tuple[MachineRecord, ...]

    @property
    def peak_load(self) -> int:
        return max((r.held for r in self.machines), default=0)

    @property
    def traffic(self) -> int:
        return sum(r.sent for r in self.machines)

    @property
    def violated(self) -> bool:
        return any(r.violation for r in self.machines)


@dataclass
class RoundTrace:
    s: int
    d: int = 0
    rounds: list[RoundRecord] = field(default_factory=list)
    attempts: int = 1
    notes: dict = field(default_factory=dict)

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    @property
    def violations(self) -> list[tuple[int, int]]:
        return [(r.index, m.machine) for r in self.rounds for m in r.machines if m.violation]

    def peak_load(self) -> int:
        return max((r.peak_load for r in self.rounds), default=0)

    def rows(self):
        for r in self.rounds:
            for m in r.machines:
                yield {
                    "round": r.index,
                    "machine": m.machine,
                    "edges_held": m.held,
                    "bytes_sent_equiv": m.sent * self.d * BYTES_PER_VERTEX_ID,
                    "violation_flag": int(m.violation),
                }

    def write_csv(self, fh) -> None:
        w = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


LocalFn = Callable[[MachineState, np.random.Generator], MachineState]
Plan = Mapping[int, Mapping[int, Sequence[int]]]
RoutingFn = Callable[[Sequence[MachineState]], Plan]
# receiver -> data entries to merge into its (uncharged) data
ShareFn = Callable[[Sequence[MachineState]], Mapping[int, Mapping]]


def machine_rng(seed, round_index: int, machine: int) -> np.random.Generator:
    """Independent stream per (seed, round, machine): scheduling cannot
    change what a machine draws."""
    return np.random.default_rng([int(seed), round_index, machine])


def run_round(machines: Sequence[MachineState], local: LocalFn | None,
              routing: Plan | RoutingFn | None, s: int, round_index: int = 0,
              seed: int = 0, label: str = "", workers: int = 1,
              share: ShareFn | None = None,
              budgets: Mapping[int, int] | None = None) -> tuple[list[MachineState], RoundRecord]:
    """One synchronous round: local computation on every machine, then
    delivery of the routed messages.

    ``routing`` maps sender -> receiver -> edge ids, either directly or as a
    function of the post-computation states. Messages are copies; what a
    sender keeps is whatever its local function retained. ``share`` carries
    uncharged data (vertex lists, counts) computed from the same states.
    ``budgets`` overrides ``s`` for individual machines.
    Returns the new states and the round record; the caller decides what to
    do with violations (see :class:`MpcEngine`).
    """
    ids = [st.machine_id for st in machines]
    if local is None:
        after = list(machines)
    else:
        def work(st: MachineState) -> MachineState:
            out = local(st, machine_rng(seed, round_index, st.machine_id))
            return st if out is None else out

        if workers > 1 and len(machines) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                after = list(pool.map(work, machines))
        else:
            after = [work(st) for st in machines]
    plan = routing(after) if callable(routing) else (routing or {})
    shared = share(after) if share is not None else {}
    pos = {mid: j for j, mid in enumerate(ids)}
    sent = dict.fromkeys(ids, 0)
    received = dict.fromkeys(ids, 0)
    inbox: dict[int, list[int]] = {mid: [] for mid in ids}
    for src in sorted(plan):
        for dst in sorted(plan[src]):
            payload = list(plan[src][dst])
            if dst not in pos:
                raise ValueError(f"message to unknown machine {dst}")
            inbox[dst].extend(payload)
            if src != dst:
                sent[src] += len(payload)
                received[dst] += len(payload)
    new_states = []
    records = []
    for st in after:
        mid = st.machine_id
        incoming = inbox[mid]
        new = replace(st, edges=st.edges + tuple(incoming)) if incoming else st
        if mid in shared:
            new = replace(new, data={**new.data, **shared[mid]})
        cap = s if budgets is None else budgets.get(mid, s)
        held = max(machines[pos[mid]].load, new.load)
        bad = held > cap or sent[mid] > cap or received[mid] > cap
        records.append(MachineRecord(mid, new.load, sent[mid], received[mid], bad))
        new_states.append(new)
    rec = RoundRecord(round_index, label, tuple(records))
    return new_states, rec


class MpcEngine:
    """Runs rounds and accumulates their records into a :class:`RoundTrace`."""

    def __init__(self, s: int, seed: int = 0, d: int = 0, workers: int = 1,
                 budgets: Mapping[int, int] | None = None):
        self.s = s
        self.budgets = dict(budgets or {})
        self.seed = seed
        self.workers = workers
        self.trace = RoundTrace(s=s, d=d)

    def round(self, machines: Sequence[MachineState], local: LocalFn | None = None,
              routing: Plan | RoutingFn | None = None, label: str = "",
              share: ShareFn | None = None) -> list[MachineState]:
        index = len(self.trace.rounds) + 1
        states, rec = run_round(machines, local, routing, self.s, index, self.seed,
                                label, self.workers, share, self.budgets)
        self.trace.rounds.append(rec)
        for m in rec.machines:
            if m.violation:
                load = max(m.held, m.sent, m.received)
                cap = self.budgets.get(m.machine, self.s)
                raise MemoryViolation(m.machine, index, load, cap, trace=self.trace)
        return states


def load_machines(parts: Sequence[Sequence[int]], first_id: int = 0) -> list[MachineState]:
    return [MachineState(first_id + j, tuple(p)) for j, p in enumerate(parts)]


def contiguous_parts(m: int, k: int) -> list[list[int]]:
    """Edge ids split into ``k`` contiguous near-equal blocks."""
    bounds = np.linspace(0, m, k + 1).round().astype(int)
    return [list(range(bounds[j], bounds[j + 1])) for j in range(k)]
