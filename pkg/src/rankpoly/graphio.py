"""Graph file parsing and fraction round-tripping for the CLI.

Two input formats:

* edge list — one ``u v`` pair per line, whitespace-tolerant, ``#`` starts
  a comment.  If every token is an integer the tokens are used as vertex
  ids directly (n = max id + 1); otherwise tokens are named vertices,
  auto-numbered in order of first appearance.
* structured JSON — ``{"n": int, "edges": [[u, v], ...]}`` with optional
  ``"U"`` / ``"W"`` arrays that must partition 0..n-1.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .graphs import BipartiteGraph, Graph, TreeDecomposition, bipartition_of


class GraphFormatError(ValueError):
    pass


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed fraction {text!r}: {exc}") from None


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_edge_list(text: str) -> Graph:
    tokens: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v' per line, got {raw!r}")
        tokens.append((parts[0], parts[1]))
    all_ints = all(a.lstrip("-").isdigit() and b.lstrip("-").isdigit() for a, b in tokens)
    if all_ints and tokens:
        pairs = [(int(a), int(b)) for a, b in tokens]
        if any(u < 0 or v < 0 for u, v in pairs):
            raise GraphFormatError("negative vertex ids are not allowed")
        n = max(max(u, v) for u, v in pairs) + 1
        return Graph(n, tuple(pairs))
    names: dict[str, int] = {}
    pairs = []
    for a, b in tokens:
        for t in (a, b):
            if t not in names:
                names[t] = len(names)
        pairs.append((names[a], names[b]))
    labels = tuple(sorted(names, key=names.get))  # type: ignore[arg-type]
    return Graph(len(names), tuple(pairs), labels or None)


def parse_structured(text: str) -> tuple[Graph, BipartiteGraph | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON graph document: {exc}") from None
    if not isinstance(doc, dict) or "n" not in doc or "edges" not in doc:
        raise GraphFormatError("structured graph needs 'n' and 'edges' fields")
    g = Graph(int(doc["n"]), tuple((int(u), int(v)) for u, v in doc["edges"]))
    if "U" in doc or "W" in doc:
        if not ("U" in doc and "W" in doc):
            raise GraphFormatError("give both 'U' and 'W' or neither")
        bip = BipartiteGraph(g, tuple(map(int, doc["U"])), tuple(map(int, doc["W"])))
        return g, bip
    return g, None


def load_graph(path: str | Path, fmt: str = "auto") -> tuple[Graph, BipartiteGraph | None]:
    """Read a graph file.  fmt is 'edgelist', 'json', or 'auto' (sniff)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read graph file {path}: {exc}") from None
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("{") else "edgelist"
    if fmt == "json":
        return parse_structured(text)
    if fmt == "edgelist":
        return parse_edge_list(text), None
    raise GraphFormatError(f"unknown graph format {fmt!r}")


def require_bipartite(g: Graph, bip: BipartiteGraph | None) -> BipartiteGraph:
    if bip is not None:
        return bip
    return bipartition_of(g)


def load_tree_decomposition(path: str | Path) -> TreeDecomposition:
    """JSON: {"tree_edges": [[a, b], ...], "bags": [[v, ...], ...]}."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read decomposition file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON decomposition: {exc}") from None
    bags = tuple(tuple(map(int, b)) for b in doc["bags"])
    tree = Graph(len(bags), tuple((int(a), int(b)) for a, b in doc.get("tree_edges", [])))
    return TreeDecomposition(tree, bags)


def parse_ordering(path: str | Path, m: int) -> list[int]:
    """Whitespace-separated edge ids giving the ordering positions."""
    text = Path(path).read_text()
    perm = [int(t) for t in text.split()]
    if sorted(perm) != list(range(m)):
        raise GraphFormatError("ordering file is not a permutation of the edge ids")
    return perm
