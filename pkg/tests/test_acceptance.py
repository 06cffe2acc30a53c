"""Acceptance criteria 1-9.

Each test appends one ``CRITERION k: PASS|FAIL ...`` line to ``REPORT``;
the lines are printed at the end of the pytest run (see conftest.py) and
when this file is executed directly. Reference values are the published
desk-scale rows; tolerances are the ones the criteria state.
"""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hypermatch.algorithms import greedy_coreset, hedcs_matching, iterated_sampling  # noqa: E402
from hypermatch.bench import load_preset, run_table  # noqa: E402
from hypermatch.generators import random_linear_hypergraph, random_uniform_hypergraph  # noqa: E402
from hypermatch.hedcs import (HedcsParams, construct_hedcs, degree_distribution_distance,  # noqa: E402
                              fix_step_bound, potential_scaled, sample_edges,
                              sample_host_edges, verify_hedcs)
from hypermatch.hypergraph import greedy_maximal_matching, is_matching, is_maximal  # noqa: E402
from hypermatch.oracle import matching_number  # noqa: E402

REPORT: list[str] = []

# reference rows: (Gr, IS, HEDCS) mean percentages and mean IS rounds
TABLE2 = {"t2-n15": ((77.6, 86.6, 82.8), 3.8),
          "t2-n30": ((78.9, 88.1, 80.3), 4.56),
          "t2-n100": ((81.7, 93.4, 83.1), 5.08)}
TABLE5 = {"t5-n15": (79.1, 87.5, 82.3),
          "t5-n100": (83.9, 96.2, 88.2)}
TABLE3 = {"t3-n100": (88.3, 89.0, 89.6)}
GEOM_MEAN_M, GEOM_SD_M = 930.1, 323.0
ALGS = ("greedy", "iterated_sampling", "hedcs")
SHORT = ("Gr", "IS", "HEDCS")

# Degree-distribution constants, frozen from a calibration run on seeds
# 1000-1099 (n=50, d=3, beta=10, beta_minus=7; 100 pairs each):
#   general (m=400):  max gap 2, bound unit sqrt(n) lam^(1/2) beta = 38.73 -> 0.052
#   linear  (m=300):  max gap 2, bound unit ln(n) lam beta = 11.74      -> 0.170
# C is about 1.5x the calibrated ratio. The test below uses seeds 0-99.
C_GENERAL = 0.08
C_LINEAR = 0.26


def report(k: int, ok: bool, detail: str) -> None:
    REPORT.append(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}")


def within(x, ref, tol):
    return x is not None and abs(x - ref) <= tol


# -- shared experiment runs -------------------------------------------------

_cache: dict = {}


def table(name: str):
    if name not in _cache:
        t0 = time.perf_counter()
        specs = load_preset(name)
        _cache[name] = (run_table(specs), time.perf_counter() - t0)
    return _cache[name]


def means(res, config):
    return tuple(res.lookup(config, a).mean_ratio for a in ALGS)


# -- criterion 1 --------------------------------------------------------------

def _phi_replay_ok(G, H, beta):
    """Replay the fix log tracking sum(deg) and sum(deg^2); d * potential is
    (2 beta - d + 1) * sum(deg) - d * sum(deg^2)."""
    d = G.d
    deg = [0] * G.n
    members = set(H.universe())
    for i in members:
        for v in G.edges[i]:
            deg[v] += 1
    s1 = sum(deg)
    s2 = sum(x * x for x in deg)
    phi = (2 * beta - d + 1) * s1 - d * s2
    for edge, kind in H.fix_log:
        step = -1 if kind == "P1" else 1
        if (edge in members) != (kind == "P1"):
            return False
        for v in G.edges[edge]:
            s2 += (deg[v] + step) ** 2 - deg[v] ** 2
            deg[v] += step
        s1 += step * d
        (members.remove if step < 0 else members.add)(edge)
        new = (2 * beta - d + 1) * s1 - d * s2
        if new - phi < d:  # d * (increase of at least 1)
            return False
        phi = new
    return members == set(H.members) and phi == potential_scaled(G, H.members, beta)


def test_criterion_1_correctness_properties():
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    failures = []
    count = 1000
    for t in range(count):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(d + 2, 101))
        m = int(rng.integers(1, min(4 * n, math.comb(n, d)) + 1))
        k = int(rng.integers(1, 7))
        G = random_uniform_hypergraph(n, m, d, seed=t)
        beta = int(rng.integers(d + 1, 3 * d + 7))
        params = HedcsParams(beta, max(0, beta - (d - 1) - int(rng.integers(0, 3))))
        # random parts hold m/k +- sqrt(m/k) edges; leave a few deviations of slack
        s = max(math.ceil(2 * m / k), math.ceil(m / k + 4 * math.sqrt(m / k)) + 4)
        gr = greedy_coreset(G, k, seed=t, s=s, central_s=m)
        hm = hedcs_matching(G, s, params, seed=t, k=k, central_s=m)
        it = iterated_sampling(G, max(s, n), seed=t, k=k)
        H = construct_hedcs(G, params, seed=t, trace=True)
        checks = {
            "greedy valid": is_matching(G, gr.matching.edges),
            "hedcs valid": is_matching(G, hm.matching.edges),
            "IS valid": is_matching(G, it.matching.edges),
            "IS maximal": is_maximal(G, it.matching),
            "HEDCS verifies": bool(verify_hedcs(G, H.members, params)),
            "potential +1 per fix": _phi_replay_ok(G, H, beta),
            "fix bound": H.fixes <= fix_step_bound(n, d, beta),
            "coreset certificates": all(verify_hedcs(G, c, params, within=p) for p, c in hm.coresets),
        }
        failures += [f"instance {t} (n={n}, m={m}, d={d}): {name}"
                     for name, ok in checks.items() if not ok]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    report(1, ok, f"{count} instances, {len(failures)} property failures, {elapsed:.1f}s (< 300s)"
           + (f"; first: {failures[0]}" if failures else ""))
    assert ok, failures[:5]


# -- criterion 2 --------------------------------------------------------------

def test_criterion_2_d_approximation():
    rng = np.random.default_rng(7)
    violations = []
    checked = 0
    for t in range(200):
        n = int(rng.integers(9, 31))
        m = int(rng.integers(10, min(300, math.comb(n, 3)) + 1))
        G = random_uniform_hypergraph(n, m, 3, seed=10_000 + t)
        mu = matching_number(G)
        sizes = [len(greedy_maximal_matching(G))]
        for _ in range(5):
            sizes.append(len(greedy_maximal_matching(G, rng.permutation(G.m).tolist())))
        res = iterated_sampling(G, max(math.ceil(2 * m / 3), n), seed=t, k=3)
        assert is_maximal(G, res.matching)
        sizes.append(res.size)
        checked += len(sizes)
        violations += [(t, sz, mu) for sz in sizes if 3 * sz < mu]
    ok = not violations
    report(2, ok, f"200 instances, {checked} maximal matchings vs exact mu, "
                  f"{len(violations)} below mu/d")
    assert ok, violations[:5]


# -- criterion 3 --------------------------------------------------------------

def test_criterion_3_uniform_perfect_benchmark():
    res, _ = table("table2")
    misses = []
    parts = []
    elapsed = sum(r.wall_time for r in res.records if r.config in TABLE2)
    for cfg, (ref, ref_rounds) in TABLE2.items():
        got = means(res, cfg)
        rounds = res.lookup(cfg, "iterated_sampling").mean_rounds
        inst = res.lookup(cfg, "greedy").instances
        assert inst >= 200
        for name, g, r in zip(SHORT, got, ref):
            if not within(g, r, 5.0):
                misses.append(f"{cfg} {name} {g:.1f} vs {r}")
        if not within(rounds, ref_rounds, 1.5):
            misses.append(f"{cfg} IS rounds {rounds:.2f} vs {ref_rounds}")
        parts.append(f"{cfg}: " + "/".join(f"{g:.1f}" for g in got) + f" rounds {rounds:.2f}")
    ok = not misses and elapsed < 1800
    report(3, ok, "; ".join(parts) + f"; {elapsed:.0f}s"
           + (f"; misses: {', '.join(misses)}" if misses else ""))
    assert ok, misses


# -- criterion 4 --------------------------------------------------------------

def test_criterion_4_uniform_maximal_benchmark():
    res, _ = table("table5")
    misses = []
    parts = []
    for cfg, ref in TABLE5.items():
        got = means(res, cfg)
        for name, g, r in zip(SHORT, got, ref):
            if not within(g, r, 5.0):
                misses.append(f"{cfg} {name} {g:.1f} vs {r}")
        parts.append(f"{cfg}: " + "/".join(f"{g:.1f}" for g in got))
    ok = not misses
    report(4, ok, "; ".join(parts) + (f"; misses: {', '.join(misses)}" if misses else ""))
    assert ok, misses


# -- criterion 5 --------------------------------------------------------------

def test_criterion_5_geometric_exact_benchmark():
    res, elapsed = table("table3")
    misses = []
    cfg = "t3-n100"
    got = means(res, cfg)
    for name, g, r in zip(SHORT, got, TABLE3[cfg]):
        if not within(g, r, 5.0):
            misses.append(f"{name} {g:.1f} vs {r}")
    agg = res.lookup(cfg, "greedy")
    assert agg.instances >= 100
    se = GEOM_SD_M / math.sqrt(agg.instances)
    if abs(agg.mean_m - GEOM_MEAN_M) > 3 * se:
        misses.append(f"mean m {agg.mean_m:.1f} vs {GEOM_MEAN_M} +- {3 * se:.1f}")
    ok = not misses
    report(5, ok, f"{cfg}: " + "/".join(f"{g:.1f}" for g in got)
           + f", mean m {agg.mean_m:.1f} (sd {agg.std_m:.1f}), {elapsed:.0f}s"
           + (f"; misses: {', '.join(misses)}" if misses else ""))
    assert ok, misses


# -- criterion 6 --------------------------------------------------------------

def test_criterion_6_ordering():
    bad = []
    n_cfg = 0
    for name, cfgs in (("table2", TABLE2), ("table5", TABLE5), ("table3", TABLE3)):
        res, _ = table(name)
        for cfg in cfgs:
            n_cfg += 1
            gr, is_, he = means(res, cfg)
            if is_ < he - 1.0:
                bad.append(f"{cfg}: IS {is_:.1f} < HEDCS {he:.1f} - 1")
            if is_ < gr - 1.0:
                bad.append(f"{cfg}: IS {is_:.1f} < Gr {gr:.1f} - 1")
    ok = not bad
    report(6, ok, f"{n_cfg} configurations, IS >= max(Gr, HEDCS) - 1 on all"
           if ok else "; ".join(bad))
    assert ok, bad


# -- criterion 7 --------------------------------------------------------------

def test_criterion_7_round_counts():
    res, _ = table("table2")
    small = [r.rounds for r in res.records if r.config == "t2-n15" and r.algorithm == "iterated_sampling"]
    large = [r.rounds for r in res.records if r.config == "t2-n300" and r.algorithm == "iterated_sampling"]
    diff = np.mean(large) - np.mean(small)
    noise = math.hypot(np.std(small, ddof=1) / math.sqrt(len(small)),
                       np.std(large, ddof=1) / math.sqrt(len(large)))
    increasing = diff > 2 * noise
    trend = ", ".join(f"n={c.split('-n')[1]}: {res.lookup(c, 'iterated_sampling').mean_rounds:.2f}"
                      for c in ("t2-n15", "t2-n30", "t2-n100", "t2-n300"))
    off = []
    statuses = []
    for name in ("table2", "table5", "table3"):
        r, _ = table(name)
        for rec in r.records:
            statuses.append(rec.status)
            if rec.algorithm != "iterated_sampling" and rec.status == "ok" and rec.rounds != 3:
                off.append(rec)
    all_ok = all(s == "ok" for s in statuses)
    ok = increasing and not off and all_ok
    report(7, ok, f"IS rounds {trend}; n=300 minus n=15 = {diff:.2f} (2 SE = {2 * noise:.2f}); "
                  f"Greedy/HEDCS runs not at 3 rounds: {len(off)}; failed runs: "
                  f"{sum(s != 'ok' for s in statuses)}")
    assert ok


# -- criterion 8 --------------------------------------------------------------

def test_criterion_8_structural_statistics():
    params = HedcsParams(10, 7)
    lam = params.lam
    n = 50
    bound = C_GENERAL * math.sqrt(n) * math.sqrt(lam) * params.beta
    bound_lin = C_LINEAR * math.log(n) * lam * params.beta
    gaps, gaps_lin = [], []
    for s in range(100):
        G = random_uniform_hypergraph(n, 400, 3, seed=s)
        gaps.append(degree_distribution_distance(construct_hedcs(G, params, seed=2 * s),
                                                 construct_hedcs(G, params, seed=2 * s + 1)))
        L = random_linear_hypergraph(n, 300, 3, seed=s)
        gaps_lin.append(degree_distribution_distance(construct_hedcs(L, params, seed=2 * s),
                                                     construct_hedcs(L, params, seed=2 * s + 1)))
    dd_ok = max(gaps) <= bound and max(gaps_lin) <= bound_lin

    # sampled HEDCS: H is built with beta_H = (1 - lam/alpha) beta / p and
    # beta_H - (d - 1); H_p = H & G_p is then checked as an HEDCS(beta, (1-lam) beta)
    # of G_p. p = 1/2 requires alpha > 4; beta must be large for concentration.
    p, alpha, beta, lam_s = 0.5, 4.5, 800, 0.5
    beta_h = math.floor((1 - lam_s / alpha) * beta / p)
    host_params = HedcsParams(beta_h, beta_h - 2)
    target = HedcsParams.from_lambda(beta, lam_s)
    passed = trials = 0
    for g in range(10):
        G = random_uniform_hypergraph(n, 16_000, 3, seed=500 + g)
        H = construct_hedcs(G, host_params, seed=g)
        for s in range(20):
            Gp = sample_host_edges(G, p, seed=(g, s))
            Hp = sample_edges(H, p, seed=(g, s))
            passed += bool(verify_hedcs(G, Hp, target, within=Gp))
            trials += 1
    rate = passed / trials
    ok = dd_ok and rate >= 0.95
    report(8, ok, f"degree gap max {max(gaps)} <= {bound:.2f} (C={C_GENERAL}), linear max "
                  f"{max(gaps_lin)} <= {bound_lin:.2f} (C'={C_LINEAR}) over 100 pairs each; "
                  f"sampled HEDCS pass rate {passed}/{trials} = {rate:.1%} (>= 95%)")
    assert ok


# -- criterion 9 --------------------------------------------------------------

def test_criterion_9_determinism():
    pairs = [("table2", {"instances": 20}), ("table3", {"instances": 3}),
             ("table5", {"instances": 5}), ("cocitation", {"instances": 2})]
    same = []
    for name, over in pairs:
        a = run_table(load_preset(name, over)).to_csv()
        b = run_table(load_preset(name, over)).to_csv()
        same.append(a == b)
    # and the full acceptance runs, when they are already available
    if "table2" in _cache:
        sub = [r for r in _cache["table2"][0].records if r.seed < 20]
        rerun = run_table(load_preset("table2", {"instances": 20}))
        from hypermatch.bench import records_to_csv
        same.append(records_to_csv(sub) == rerun.to_csv())
    ok = all(same)
    report(9, ok, f"{sum(same)}/{len(same)} reruns byte-identical")
    assert ok


if __name__ == "__main__":
    import traceback

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
            except Exception:
                traceback.print_exc()
    print("\n".join(REPORT))
