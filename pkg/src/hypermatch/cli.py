"""Command line entry point: ``hypermatch {gen,run,verify,hedcs}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .cocitation import build_cocitation_hypergraph
from .generators import GeometricConfig, random_geometric_hypergraph, random_uniform_hypergraph
from .hedcs import HedcsParams, construct_hedcs, degree_sum_envelope, verify_hedcs
from .io import read_citations, read_edge_list, write_edge_list, write_hedcs_dump


def _out(path):
    """Open ``path`` for text output; '-' or None means stdout."""
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def cmd_gen(args) -> int:
    if args.family == "uniform":
        G = random_uniform_hypergraph(args.n, args.m, args.d, args.seed)
    elif args.family == "geometric":
        G = random_geometric_hypergraph(GeometricConfig(args.n, args.r, args.d, args.seed))
    else:
        H = build_cocitation_hypergraph(read_citations(args.citations))
        G, rep = H.to_uniform(args.mode, args.d_uniform)
        mean, std = H.size_stats()
        print(f"candidate edges {rep.candidates}, size {mean:.2f} +- {std:.2f}; "
              f"kept {rep.kept} as d={rep.d} ({args.mode}, coverage {rep.coverage:.3f})",
              file=sys.stderr)
    fh, close = _out(args.output)
    try:
        write_edge_list(G, fh)
    finally:
        if close:
            fh.close()
    return 0


def _overrides(args) -> dict:
    keys = ["n", "m", "r", "d", "k", "s", "instances", "seed", "benchmark", "beta", "beta_minus"]
    out = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if args.algorithms:
        out["algorithms"] = tuple(args.algorithms)
    return out


def cmd_run(args) -> int:
    over = _overrides(args)
    if args.config:
        specs = bench.load_config_file(args.config, over)
    else:
        specs = bench.load_preset(args.preset, over)
    if args.only:
        specs = [sp for sp in specs if sp.name in set(args.only)]
        if not specs:
            print("no configuration matches --only", file=sys.stderr)
            return 2
    result = bench.run_table(specs, workers=args.workers)
    fh, close = _out(args.output)
    try:
        bench.write_records_csv(result.records, fh, timing=args.timing)
    finally:
        if close:
            fh.close()
    if args.aggregate:
        Path(args.aggregate).write_text(bench.aggregates_to_csv(result.aggregates),
                                        encoding="utf-8", newline="\n")
    if args.archive:
        bench.write_archive(result.archive, args.archive)
    for a in result.aggregates:
        ratio = "n/a" if a.mean_ratio is None else f"{a.mean_ratio:6.2f}%"
        rounds = "n/a" if a.mean_rounds is None else f"{a.mean_rounds:.2f}"
        print(f"{a.config:>16} {bench.SHORT[a.algorithm]:>6} {ratio} rounds {rounds} "
              f"ok {a.ok}/{a.instances} m {a.mean_m:.1f}", file=sys.stderr)
    for msg in result.problems:
        print(f"INVARIANT VIOLATION: {msg}", file=sys.stderr)
    return 1 if result.problems else 0


def cmd_verify(args) -> int:
    report = bench.verify_run(bench.read_archive(args.archive))
    for msg in report.failures:
        print(f"FAIL {msg}")
    print(f"checked {report.checked} records: {'pass' if report.ok else 'fail'}")
    return 0 if report.ok else 1


def cmd_hedcs(args) -> int:
    if args.input:
        G = read_edge_list(args.input)
    else:
        G = random_uniform_hypergraph(args.n, args.m, args.d, args.seed)
    params = HedcsParams(args.beta, args.beta_minus)
    H = construct_hedcs(G, params, seed=args.seed)
    verdict = verify_hedcs(G, H.members, params)
    top, low = degree_sum_envelope(G, H.members)
    print(f"n={G.n} m={G.m} d={G.d} beta={params.beta} beta_minus={params.beta_minus}")
    print(f"members {len(H)} fixes {H.fixes} max member sum {top} "
          f"min outside sum {'-' if low is None else low} verified {bool(verdict)}")
    if args.output:
        write_hedcs_dump(G, H.members, args.output)
    return 0 if verdict else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypermatch",
                                description="Parallel matching in d-uniform hypergraphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance as an edge list")
    g.add_argument("family", choices=["uniform", "geometric", "cocitation"])
    g.add_argument("--n", type=int, default=15)
    g.add_argument("--m", type=int, default=200)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--r", type=float, default=0.2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--citations", help="citation list 'src dst' (cocitation family)")
    g.add_argument("--mode", choices=["filter", "pad"], default="filter")
    g.add_argument("--d-uniform", type=int, default=None,
                   help="target edge size for cocitation (default: modal size)")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run an experiment table")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--preset", default="table2", help=f"one of {', '.join(bench.preset_names())}")
    src.add_argument("--config", help="INI file with one section per configuration")
    r.add_argument("--only", nargs="+", help="run only these configuration names")
    for name, typ in [("n", int), ("m", int), ("r", float), ("d", int), ("k", int), ("s", int),
                      ("instances", int), ("seed", int), ("beta", int), ("beta-minus", int)]:
        r.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))
    r.add_argument("--benchmark", choices=bench.BENCHMARKS)
    r.add_argument("--algorithms", nargs="+", choices=bench.ALGORITHMS)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--timing", action="store_true", help="add a wall_time column")
    r.add_argument("--aggregate", help="write per-configuration means here")
    r.add_argument("--archive", help="write matchings and certificates (JSONL) here")
    r.add_argument("-o", "--output", default="-")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="re-check an archive written by 'run --archive'")
    v.add_argument("archive")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hedcs", help="build and verify an HEDCS")
    h.add_argument("--input", help="edge list; default: a random uniform instance")
    h.add_argument("--n", type=int, default=50)
    h.add_argument("--m", type=int, default=400)
    h.add_argument("--d", type=int, default=3)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--beta", type=int, default=10)
    h.add_argument("--beta-minus", type=int, default=7)
    h.add_argument("-o", "--output", help="write an HEDCS dump here")
    h.set_defaults(func=cmd_hedcs)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
