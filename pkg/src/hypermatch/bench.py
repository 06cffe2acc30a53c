"""Experiment harness: instance families x algorithms x benchmarks.

A table is a list of :class:`ExperimentSpec` rows (usually loaded from an
INI preset). Every row generates ``instances`` hypergraphs with seeds
``seed, seed + 1, ...``; all algorithms run on the same instances. Results
are :class:`ExperimentRecord` rows written as CSV, plus an optional JSONL
archive holding the matchings and HEDCS certificates for :func:`verify_run`.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algorithms import (MpcResult, derive_seed, greedy_coreset,
                         hedcs_matching, iterated_sampling)
from .cocitation import build_cocitation_hypergraph, random_citation_graph
from .errors import AttemptsExhausted, MemoryViolation
from .generators import GeometricConfig, random_geometric_hypergraph, random_uniform_hypergraph
from .hedcs import HedcsParams, verify_hedcs
from .hypergraph import Hypergraph, greedy_maximal_matching, is_matching, is_maximal
from .oracle import matching_number

log = logging.getLogger(__name__)

ALGORITHMS = ("greedy", "iterated_sampling", "hedcs")
SHORT = {"greedy": "Gr", "iterated_sampling": "IS", "hedcs": "HEDCS"}
BENCHMARKS = ("perfect", "maximal", "exact")
FAMILIES = ("uniform", "geometric", "cocitation")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    family: str = "uniform"
    n: int = 15
    m: int | None = 200
    r: float | None = None
    d: int = 3
    k: int = 5
    s: int | None = None          # None: ceil(s_scale * m / k)
    s_scale: float = 2.0
    central_s: int | None = None  # machine 0 budget for the coreset algorithms; -1 = unbounded
    instances: int = 10
    seed: int = 0
    algorithms: tuple[str, ...] = ALGORITHMS
    benchmark: str = "perfect"
    beta: int = 5
    beta_minus: int = 3
    exact_budget: int = 10_000_000
    links: int | None = None      # cocitation: citation pairs among n articles
    mode: str = "filter"          # cocitation: filter | pad

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"[{self.name}] unknown family {self.family!r}")
        if self.family == "uniform" and self.m is None:
            raise ValueError(f"[{self.name}] uniform family needs m")
        if self.family == "geometric" and self.r is None:
            raise ValueError(f"[{self.name}] geometric family needs r")
        if self.family == "cocitation" and self.links is None:
            raise ValueError(f"[{self.name}] cocitation family needs links")
        if self.benchmark not in BENCHMARKS:
            raise ValueError(f"[{self.name}] unknown benchmark {self.benchmark!r}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"[{self.name}] unknown algorithms {bad}")
        if self.instances < 1 or self.k < 1:
            raise ValueError(f"[{self.name}] instances and k must be >= 1")
        HedcsParams(self.beta, self.beta_minus)

    @property
    def params(self) -> HedcsParams:
        return HedcsParams(self.beta, self.beta_minus)

    def instance(self, index: int) -> tuple[int, Hypergraph]:
        seed = self.seed + index
        if self.family == "uniform":
            return seed, random_uniform_hypergraph(self.n, self.m, self.d, seed)
        if self.family == "geometric":
            return seed, random_geometric_hypergraph(GeometricConfig(self.n, self.r, self.d, seed))
        H = build_cocitation_hypergraph(random_citation_graph(self.n, self.links, seed))
        return seed, H.to_uniform(self.mode, self.d)[0]

    def budget(self, G: Hypergraph) -> int:
        if self.s is not None:
            return self.s
        return max(1, math.ceil(self.s_scale * G.m / self.k))


@dataclass
class ExperimentRecord:
    config: str
    family: str
    n: int
    m: int
    r: float | None
    d: int
    k: int
    s: int
    algorithm: str
    seed: int
    status: str
    size: int
    benchmark: str
    benchmark_size: int
    ratio: float | None   # percent, rounded to 6 decimals
    rounds: int
    attempts: int
    beta: int | None
    beta_minus: int | None
    wall_time: float = field(default=0.0, compare=False)


CSV_FIELDS = [f.name for f in dataclasses.fields(ExperimentRecord) if f.name != "wall_time"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def write_records_csv(records: Sequence[ExperimentRecord], fh, timing: bool = False) -> None:
    cols = CSV_FIELDS + (["wall_time"] if timing else [])
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for rec in records:
        w.writerow([_fmt(getattr(rec, c)) for c in cols])


def records_to_csv(records: Sequence[ExperimentRecord], timing: bool = False) -> str:
    buf = io.StringIO()
    write_records_csv(records, buf, timing)
    return buf.getvalue()


def benchmark_size(G: Hypergraph, kind: str, budget: int = 10_000_000) -> int:
    if kind == "perfect":
        return G.n // G.d
    if kind == "maximal":
        return len(greedy_maximal_matching(G))
    return matching_number(G, budget)


def _run_algorithm(spec: ExperimentSpec, G: Hypergraph, alg: str, seed: int) -> MpcResult:
    s = spec.budget(G)
    central = None if spec.central_s is None else (G.m if spec.central_s < 0 else spec.central_s)
    alg_seed = derive_seed(seed, ALGORITHMS.index(alg))
    if alg == "greedy":
        return greedy_coreset(G, spec.k, seed=alg_seed, s=s, central_s=central)
    if alg == "iterated_sampling":
        return iterated_sampling(G, s, seed=alg_seed, k=spec.k)
    return hedcs_matching(G, s, spec.params, seed=alg_seed, k=spec.k, central_s=central)


def run_instance(spec: ExperimentSpec, index: int) -> list[tuple[ExperimentRecord, dict]]:
    """All algorithms of ``spec`` on its ``index``-th instance; each record
    comes with its archive entry."""
    seed, G = spec.instance(index)
    bench = benchmark_size(G, spec.benchmark, spec.exact_budget)
    s = spec.budget(G)
    out = []
    for alg in spec.algorithms:
        t0 = time.perf_counter()
        entry: dict = {}
        try:
            res = _run_algorithm(spec, G, alg, seed)
        except (MemoryViolation, AttemptsExhausted) as exc:
            status = "memory_violation" if isinstance(exc, MemoryViolation) else "attempts_exhausted"
            size, rounds, attempts = 0, 0, 0
            log.info("%s seed %d %s: %s", spec.name, seed, alg, exc)
        else:
            status = "ok"
            size, rounds, attempts = res.size, res.rounds, res.trace.attempts
            entry["matching"] = list(res.matching.edges)
            if alg == "hedcs":
                entry["certificates"] = [[list(p), list(c)] for p, c in res.coresets]
                entry["union_envelope"] = [res.info["beta_C"], res.info["beta_C_minus"]]
        ratio = round(100.0 * size / bench, 6) if status == "ok" and bench else None
        is_hedcs = alg == "hedcs"
        rec = ExperimentRecord(
            config=spec.name, family=spec.family, n=G.n, m=G.m, r=spec.r, d=G.d, k=spec.k, s=s,
            algorithm=alg, seed=seed, status=status, size=size, benchmark=spec.benchmark,
            benchmark_size=bench, ratio=ratio, rounds=rounds, attempts=attempts,
            beta=spec.beta if is_hedcs else None, beta_minus=spec.beta_minus if is_hedcs else None,
            wall_time=time.perf_counter() - t0)
        entry.update(record={c: getattr(rec, c) for c in CSV_FIELDS}, spec=dataclasses.asdict(spec))
        out.append((rec, entry))
    return out


def _task(args):
    spec, index = args
    return run_instance(spec, index)


@dataclass
class Aggregate:
    config: str
    algorithm: str
    instances: int
    ok: int
    mean_ratio: float | None
    std_ratio: float | None
    mean_rounds: float | None
    mean_m: float
    std_m: float

    @property
    def se_ratio(self) -> float | None:
        if self.std_ratio is None or self.ok < 2:
            return None
        return self.std_ratio / math.sqrt(self.ok)


def aggregate(records: Iterable[ExperimentRecord]) -> list[Aggregate]:
    """Per (config, algorithm): means over successful runs. ``mean_m`` is
    over all instances of the configuration."""
    groups: dict[tuple[str, str], list[ExperimentRecord]] = {}
    for rec in records:
        groups.setdefault((rec.config, rec.algorithm), []).append(rec)
    out = []
    for (cfg, alg), recs in groups.items():
        ok = [r for r in recs if r.status == "ok"]
        ratios = np.array([r.ratio for r in ok], dtype=float)
        rounds = np.array([r.rounds for r in ok], dtype=float)
        ms = np.array([r.m for r in recs], dtype=float)
        out.append(Aggregate(
            cfg, alg, len(recs), len(ok),
            float(ratios.mean()) if ok else None,
            float(ratios.std(ddof=1)) if len(ok) > 1 else None,
            float(rounds.mean()) if ok else None,
            float(ms.mean()), float(ms.std(ddof=1)) if len(ms) > 1 else 0.0))
    return out


AGG_FIELDS = ["config", "algorithm", "instances", "ok", "mean_ratio", "std_ratio",
              "mean_rounds", "mean_m", "std_m"]


def aggregates_to_csv(aggs: Sequence[Aggregate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGG_FIELDS)
    for a in aggs:
        w.writerow([_fmt(getattr(a, c)) for c in AGG_FIELDS])
    return buf.getvalue()


@dataclass
class TableResult:
    records: list[ExperimentRecord]
    archive: list[dict]
    aggregates: list[Aggregate]
    problems: list[str]

    def to_csv(self, timing: bool = False) -> str:
        return records_to_csv(self.records, timing)

    def lookup(self, config: str, algorithm: str) -> Aggregate:
        for a in self.aggregates:
            if a.config == config and a.algorithm == algorithm:
                return a
        raise KeyError((config, algorithm))


def record_problems(rec: ExperimentRecord) -> list[str]:
    """Invariant checks on a single record."""
    tag = f"{rec.config}/{rec.algorithm}/seed={rec.seed}"
    bad = []
    if rec.status != "ok" or rec.ratio is None:
        return bad
    if rec.ratio < 0:
        bad.append(f"{tag}: negative ratio")
    if rec.benchmark == "exact" and rec.ratio > 100.0:
        bad.append(f"{tag}: ratio {rec.ratio} above the optimum")
    if rec.benchmark == "exact" and rec.algorithm == "iterated_sampling" and \
            rec.size * rec.d < rec.benchmark_size:
        bad.append(f"{tag}: maximal matching below mu/d")
    if rec.benchmark == "perfect" and rec.size > rec.benchmark_size:
        bad.append(f"{tag}: larger than a perfect matching")
    return bad


def run_table(specs: Sequence[ExperimentSpec], workers: int = 1) -> TableResult:
    tasks = [(spec, i) for spec in specs for i in range(spec.instances)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_task(t) for t in tasks]
    order = {spec.name: j for j, spec in enumerate(specs)}
    pairs = [p for chunk in results for p in chunk]
    # canonical order: configuration, seed, algorithm
    pairs.sort(key=lambda p: (order[p[0].config], p[0].seed, ALGORITHMS.index(p[0].algorithm)))
    records = [p[0] for p in pairs]
    problems = [msg for rec in records for msg in record_problems(rec)]
    return TableResult(records, [p[1] for p in pairs], aggregate(records), problems)


def write_archive(archive: Sequence[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in archive:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def read_archive(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


@dataclass
class VerifyReport:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _spec_from_dict(d: dict) -> ExperimentSpec:
    d = dict(d)
    d["algorithms"] = tuple(d["algorithms"])
    return ExperimentSpec(**d)


def verify_run(archive: Iterable[dict]) -> VerifyReport:
    """Regenerate each archived instance and re-check its matching (valid,
    maximal for Iterated-Sampling, size as recorded) and every HEDCS
    certificate against P1/P2 on its machine's part."""
    report = VerifyReport()
    cache: dict[tuple, Hypergraph] = {}
    for entry in archive:
        rec = entry["record"]
        tag = f"{rec['config']}/{rec['algorithm']}/seed={rec['seed']}"
        report.checked += 1
        if rec["status"] != "ok":
            continue
        try:
            spec = _spec_from_dict(entry["spec"])
            key = (spec.family, spec.n, spec.m, spec.r, spec.d, spec.links, spec.mode, rec["seed"])
            if key not in cache:
                cache = {key: spec.instance(rec["seed"] - spec.seed)[1]}
            G = cache[key]
        except (KeyError, TypeError, ValueError) as exc:
            report.failures.append(f"{tag}: cannot rebuild instance ({exc})")
            continue
        if G.m != rec["m"]:
            report.failures.append(f"{tag}: regenerated instance has m={G.m}, recorded {rec['m']}")
            continue
        M = entry.get("matching", [])
        if any(not isinstance(i, int) or not 0 <= i < G.m for i in M) or not is_matching(G, M):
            report.failures.append(f"{tag}: archived matching is not a valid matching")
            continue
        if len(M) != rec["size"]:
            report.failures.append(f"{tag}: matching has {len(M)} edges, recorded {rec['size']}")
        if rec["algorithm"] == "iterated_sampling" and not is_maximal(G, M):
            report.failures.append(f"{tag}: matching is not maximal")
        for j, (part, members) in enumerate(entry.get("certificates", [])):
            verdict = verify_hedcs(G, members, spec.params, within=part)
            if not verdict:
                report.failures.append(
                    f"{tag}: machine {j} HEDCS certificate fails ({len(verdict.violations)} violations)")
    return report


# -- presets ---------------------------------------------------------------

_INT = {"n", "m", "d", "k", "s", "central_s", "instances", "seed", "beta", "beta_minus",
        "exact_budget", "links"}
_FLOAT = {"r", "s_scale"}


def parse_spec(name: str, fields: dict) -> ExperimentSpec:
    kw: dict = {"name": name}
    for key, raw in fields.items():
        key = key.replace("-", "_")
        val = raw.strip()
        if key in _INT:
            kw[key] = None if val.lower() in ("", "none") else (-1 if val == "unbounded" else int(val))
        elif key in _FLOAT:
            kw[key] = None if val.lower() in ("", "none") else float(val)
        elif key == "algorithms":
            kw[key] = tuple(a.strip() for a in val.replace(",", " ").split())
        elif key in ("family", "benchmark", "mode"):
            kw[key] = val
        elif key == "description":
            continue
        else:
            raise ValueError(f"[{name}] unknown key {key!r}")
    if kw.get("family") in ("geometric", "cocitation") and "m" not in kw:
        kw["m"] = None
    return ExperimentSpec(**kw)


def load_config(text: str, overrides: dict | None = None) -> list[ExperimentSpec]:
    """INI text -> specs; ``[DEFAULT]`` values apply to every section and
    ``overrides`` (already typed) to every resulting spec."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    specs = [parse_spec(sec, dict(cp[sec])) for sec in cp.sections()]
    if overrides:
        specs = [dataclasses.replace(sp, **overrides) for sp in specs]
    return specs


def preset_names() -> list[str]:
    files = resources.files("hypermatch") / "presets"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".ini"))


def preset_text(name: str) -> str:
    path = resources.files("hypermatch") / "presets" / f"{name}.ini"
    if not path.is_file():
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path.read_text(encoding="utf-8")


def load_preset(name: str, overrides: dict | None = None) -> list[ExperimentSpec]:
    return load_config(preset_text(name), overrides)


def load_config_file(path, overrides: dict | None = None) -> list[ExperimentSpec]:
    return load_config(Path(path).read_text(encoding="utf-8"), overrides)
