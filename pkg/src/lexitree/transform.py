"""Structure-to-structure transforms: alternative expansion, inheritance
materialization, and table extraction.

All three are pure functions on immutable trees; shared subtrees in the
results are safe because nothing here mutates a node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import (
    FeatureClassRegistry,
    FeatureName,
    Node,
    NodePath,
    UnexpandedAlternatives,
    effective_set,
    enumerate_traversals,
    format_value,
)


def _expand(node: Node) -> list[Node]:
    if node.alt_groups:
        group = node.alt_groups[0]
        rest = node.alt_groups[1:]
        variants: list[Node] = []
        for alternative in group.alternatives:
            # alternative-specific properties first, then the shared ones
            variants.extend(_expand(Node(alternative + node.properties, rest, node.children)))
        return variants
    children: list[Node] = []
    for child in node.children:
        children.extend(_expand(child))
    return [Node(node.properties, (), children)]


def expand_alternatives(root: Node) -> Node:
    """Rewrite alternative groups as explicit sibling partitions.

    A node with one group of k alternatives becomes k siblings; each carries
    its alternative's properties followed by the shared content (common
    properties, later groups, children). Several groups at one node expand to
    their cross-product with the leftmost group varying slowest. A tree
    without groups comes back structurally identical.

    A root that itself carries alternatives has nowhere to put siblings, so
    its variants are attached under a fresh property-less root.
    """
    variants = _expand(root)
    if len(variants) == 1:
        return variants[0]
    return Node(children=variants)


def materialize_inheritance(root: Node, registry: FeatureClassRegistry) -> Node:
    """Rewrite each node so it spells out the features holding there.

    The tree shape is unchanged; every node's property list becomes its
    effective feature set: inherited values are written in ancestor-first
    order ahead of the node's own properties, an overwriting feature keeps a
    locally present value instead of the inherited one, dependency blocking
    applies as in effective_set, and local features stay where they were.
    Running the operation twice changes nothing: re-specified values are
    no-ops and duplicated cumulative values collapse.
    """
    def rebuild(node: Node, path: NodePath) -> Node:
        if node.alt_groups:
            raise UnexpandedAlternatives(path)
        props = effective_set(root, path, registry).entries
        children = tuple(rebuild(child, path + (i,)) for i, child in enumerate(node.children))
        return Node(props, (), children)

    return rebuild(root, ())


@dataclass(frozen=True)
class TableSpec:
    """Columns to extract, one row per full traversal."""

    columns: tuple[FeatureName, ...]
    row_unit: str = "full-traversal"
    format: str = "tsv"

    def __init__(
        self,
        columns: Iterable[FeatureName | str],
        row_unit: str = "full-traversal",
        format: str = "tsv",
    ):
        cols = tuple(FeatureName(c) for c in columns)
        if not cols:
            raise ValueError("a table needs at least one column")
        if row_unit != "full-traversal":
            raise ValueError(f"unsupported row unit {row_unit!r}")
        if format not in ("tsv", "html"):
            raise ValueError(f"unsupported table format {format!r}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "row_unit", row_unit)
        object.__setattr__(self, "format", format)


@dataclass(frozen=True)
class TableRow:
    cells: tuple[str, ...]

    def __init__(self, cells: Iterable[str]):
        object.__setattr__(self, "cells", tuple(cells))


def extract_table(root: Node, spec: TableSpec, registry: FeatureClassRegistry) -> list[TableRow]:
    """One row per full traversal; a cell holds the column feature's value(s)
    in that traversal's effective set, multiple values joined with "; "."""
    rows = []
    for path in enumerate_traversals(root):
        eff = effective_set(root, path, registry)
        cells = []
        for column in spec.columns:
            values = [format_value(p.value) for p in eff.entries if p.feature == column]
            cells.append("; ".join(values))
        rows.append(TableRow(cells))
    return rows


def _escape_html(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_tsv(spec: TableSpec, rows: list[TableRow]) -> str:
    lines = ["\t".join(str(c) for c in spec.columns)]
    lines.extend("\t".join(row.cells) for row in rows)
    return "\n".join(lines) + "\n"


def render_html(spec: TableSpec, rows: list[TableRow]) -> str:
    lines = ["<table>"]
    for column in spec.columns:
        lines.append(f"  <th>{_escape_html(str(column))}</th>")
    for row in rows:
        lines.append("  <tr>")
        for cell in row.cells:
            lines.append(f"    <td>{_escape_html(cell)}</td>")
        lines.append("  </tr>")
    lines.append("</table>")
    return "\n".join(lines) + "\n"


def render_table(spec: TableSpec, rows: list[TableRow]) -> str:
    if spec.format == "html":
        return render_html(spec, rows)
    return render_tsv(spec, rows)
