"""Edge-list and DOT serialization for weighted graphs.

Rational weights are written as ``num/den`` and read back as exact
fractions; float weights use ``repr`` so both round-trip losslessly.
"""

from __future__ import annotations

import io
import re
from fractions import Fraction
from pathlib import Path
from typing import TextIO

from .graphs import WeightedGraph


def format_weight(wt) -> str:
    if isinstance(wt, Fraction):
        return f"{wt.numerator}/{wt.denominator}"
    return repr(float(wt))


def parse_weight(text: str):
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    try:
        return Fraction(int(text))
    except ValueError:
        return float(text)


def _open_text(target, mode):
    if isinstance(target, (str, Path)):
        return open(target, mode, encoding="utf-8"), True
    return target, False


def write_edge_list(g: WeightedGraph, target: str | Path | TextIO) -> None:
    fh, owned = _open_text(target, "w")
    try:
        fh.write(f"p {g.vertex_count}\n")
        for u, v, wt in g.edges:
            fh.write(f"{u} {v} {format_weight(wt)}\n")
    finally:
        if owned:
            fh.close()


def read_edge_list(source: str | Path | TextIO) -> WeightedGraph:
    fh, owned = _open_text(source, "r")
    try:
        lines = fh.read().splitlines()
    finally:
        if owned:
            fh.close()
    vertex_count = None
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith(("#", "c ")):
            continue
        parts = line.split()
        if parts[0] == "p":
            if vertex_count is not None or len(parts) != 2:
                raise ValueError(f"line {lineno}: bad header {raw!r}")
            vertex_count = int(parts[1])
            continue
        if vertex_count is None:
            raise ValueError(f"line {lineno}: edge before 'p <vertex_count>' header")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'u v weight', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1]), parse_weight(parts[2])))
    if vertex_count is None:
        raise ValueError("missing 'p <vertex_count>' header")
    return WeightedGraph(vertex_count, edges)


def edge_list_string(g: WeightedGraph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def to_dot(g: WeightedGraph, name: str = "G") -> str:
    out = [f"graph {name} {{"]
    out.append(f"  // vertices {g.vertex_count}")
    for v in range(g.vertex_count):
        out.append(f"  {v};")
    for u, v, wt in g.edges:
        out.append(f'  {u} -- {v} [weight="{format_weight(wt)}"];')
    out.append("}")
    return "\n".join(out) + "\n"


_DOT_EDGE = re.compile(r'^\s*(\d+)\s*--\s*(\d+)\s*\[weight="([^"]+)"\];\s*$')
_DOT_NODE = re.compile(r"^\s*(\d+);\s*$")


def from_dot(text: str) -> WeightedGraph:
    """Parse the DOT subset produced by :func:`to_dot`."""
    vertices = set()
    edges = []
    for line in text.splitlines():
        m = _DOT_EDGE.match(line)
        if m:
            edges.append((int(m.group(1)), int(m.group(2)), parse_weight(m.group(3))))
            continue
        m = _DOT_NODE.match(line)
        if m:
            vertices.add(int(m.group(1)))
    if not vertices:
        raise ValueError("no vertices in DOT input")
    if vertices != set(range(len(vertices))):
        raise ValueError("DOT vertex ids must be 0..n-1")
    return WeightedGraph(len(vertices), edges)
