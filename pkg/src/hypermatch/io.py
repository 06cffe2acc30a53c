"""Plain-text interchange formats.

Edge list::

    # optional comments
    n m d
    v1 v2 ... vd        (m lines)

HEDCS dump: an edge list followed by one line ``members i1 i2 ...`` of
member edge indices (the line may list none).

Citation list: one ``src dst`` pair per line, ``#`` comments allowed.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, TextIO

from .errors import ParseError
from .hypergraph import Hypergraph, build_hypergraph

MEMBERS_TAG = "members"


def _content_lines(lines: Iterable[str]):
    """(1-based line number, stripped text) for non-blank, non-comment lines."""
    for no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if text and not text.startswith("#"):
            yield no, text


def _ints(text: str, no: int, path) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}", no, path) from None


def _parse_body(rows, path, multigraph: bool) -> tuple[Hypergraph, list[tuple[int, str]]]:
    try:
        no, text = next(rows)
    except StopIteration:
        raise ParseError("missing header 'n m d'", None, path) from None
    header = _ints(text, no, path)
    if len(header) != 3 or min(header) < 0:
        raise ParseError(f"header must be three non-negative integers 'n m d', got {text!r}", no, path)
    n, m, d = header
    if d < 1:
        raise ParseError("d must be >= 1", no, path)
    edges = []
    seen: dict[tuple[int, ...], int] = {}
    last = no
    for _ in range(m):
        try:
            no, text = next(rows)
        except StopIteration:
            raise ParseError(f"header declares m={m} edges, found {len(edges)}", last, path) from None
        if text.startswith(MEMBERS_TAG):
            raise ParseError(f"header declares m={m} edges, found {len(edges)}", no, path)
        last = no
        verts = _ints(text, no, path)
        if len(verts) != d:
            raise ParseError(f"edge has {len(verts)} vertices, expected d={d}", no, path)
        if len(set(verts)) != d:
            raise ParseError("edge repeats a vertex", no, path)
        if any(v < 0 or v >= n for v in verts):
            raise ParseError(f"vertex out of range [0, {n})", no, path)
        key = tuple(sorted(verts))
        if not multigraph and key in seen:
            raise ParseError(f"duplicate edge (first on line {seen[key]})", no, path)
        seen.setdefault(key, no)
        edges.append(key)
    return build_hypergraph(n, d, edges, multigraph=multigraph), list(rows)


def parse_edge_list(lines: Iterable[str], path=None, multigraph: bool = False) -> Hypergraph:
    G, rest = _parse_body(_content_lines(lines), path, multigraph)
    if rest:
        no, _ = rest[0]
        raise ParseError(f"header declares m={G.m} edges but more lines follow", no, path)
    return G


def read_edge_list(path, multigraph: bool = False) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, path=os.fspath(path), multigraph=multigraph)


def format_edge_list(G: Hypergraph) -> str:
    out = [f"{G.n} {G.m} {G.d}"]
    out.extend(" ".join(map(str, e)) for e in G.edges)
    return "\n".join(out) + "\n"


def write_edge_list(G: Hypergraph, dest: str | os.PathLike | TextIO) -> None:
    text = format_edge_list(G)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8", newline="\n")


def format_hedcs_dump(G: Hypergraph, members: Iterable[int]) -> str:
    idx = sorted(members)
    return format_edge_list(G) + " ".join([MEMBERS_TAG, *map(str, idx)]) + "\n"


def parse_hedcs_dump(lines: Iterable[str], path=None) -> tuple[Hypergraph, list[int]]:
    G, rest = _parse_body(_content_lines(lines), path, multigraph=False)
    if not rest:
        raise ParseError(f"missing '{MEMBERS_TAG}' line", None, path)
    no, text = rest[0]
    tag, _, tail = text.partition(" ")
    if tag != MEMBERS_TAG:
        raise ParseError(f"expected '{MEMBERS_TAG}' line, got {text!r}", no, path)
    members = _ints(tail, no, path)
    if any(i < 0 or i >= G.m for i in members):
        raise ParseError(f"member index out of range [0, {G.m})", no, path)
    if len(set(members)) != len(members):
        raise ParseError("member index listed twice", no, path)
    if len(rest) > 1:
        raise ParseError("unexpected content after members line", rest[1][0], path)
    return G, members


def write_hedcs_dump(G: Hypergraph, members: Iterable[int], path) -> None:
    Path(path).write_text(format_hedcs_dump(G, members), encoding="utf-8", newline="\n")


def read_hedcs_dump(path) -> tuple[Hypergraph, list[int]]:
    with open(path, encoding="utf-8") as fh:
        return parse_hedcs_dump(fh, path=os.fspath(path))


def parse_citations(lines: Iterable[str], path=None) -> list[tuple[int, int]]:
    pairs = []
    for no, text in _content_lines(lines):
        vals = _ints(text, no, path)
        if len(vals) != 2:
            raise ParseError(f"expected 'src dst', got {text!r}", no, path)
        if min(vals) < 0:
            raise ParseError("article ids must be non-negative", no, path)
        pairs.append((vals[0], vals[1]))
    return pairs


def read_citations(path) -> list[tuple[int, int]]:
    with open(path, encoding="utf-8") as fh:
        return parse_citations(fh, path=os.fspath(path))
