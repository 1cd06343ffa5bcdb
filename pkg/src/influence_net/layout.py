"""Multi-circle layout and the SVG / DOT / JSON / CSV writers."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .centrality import CentralityResult
from .errors import InconsistentInputError, InvalidParameterError
from .graph import InfluenceGraph
from .ingest import CSV_HEADER, RELATION


@dataclass(frozen=True)
class LayoutParams:
    rings: int = 4
    base_radius_px: float = 60.0
    ring_gap_px: float = 110.0
    size_scale: float = 12.0
    min_radius_px: float = 1.0
    margin_px: float = 40.0

    def __post_init__(self):
        if self.rings < 1:
            raise InvalidParameterError(f"rings must be at least 1, got {self.rings}")
        for name in ("base_radius_px", "ring_gap_px", "size_scale", "min_radius_px"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")


@dataclass(frozen=True)
class NodePlacement:
    node: int
    label: str
    ring: int
    angle: float
    radius_px: float
    x: float
    y: float


@dataclass(frozen=True)
class EdgeShade:
    source: int
    target: int
    weight: float
    shade: float


@dataclass(frozen=True)
class LayoutSpec:
    nodes: tuple[NodePlacement, ...]
    edges: tuple[EdgeShade, ...]
    width: float
    height: float


def ring_assignment(betweenness: np.ndarray, rings: int) -> list[int]:
    """Quantile bands of descending betweenness; tied scores share a band."""
    n = len(betweenness)
    out = [0] * n
    for v in range(n):
        # competition rank: 1 + number of strictly larger scores
        higher = int(np.sum(betweenness > betweenness[v]))
        out[v] = min(rings - 1, (higher * rings) // n)
    return out


def multi_circle_layout(
    graph: InfluenceGraph,
    betweenness: CentralityResult,
    pagerank: CentralityResult,
    params: LayoutParams = LayoutParams(),
) -> LayoutSpec:
    """Place nodes on concentric rings, highest betweenness innermost.

    Within a ring nodes sit at equal angles in label order. Node radius is
    ``size_scale * log(1 + n * pagerank)``; edge shade is weight over the
    maximum weight.
    """
    n = graph.node_count
    bc = np.asarray(betweenness.scores, dtype=float)
    pr = np.asarray(pagerank.scores, dtype=float)
    if len(bc) != n or len(pr) != n:
        raise InconsistentInputError("centrality results do not cover the graph's node set")
    labels = graph.labels
    rings = ring_assignment(bc, params.rings)
    members: dict[int, list[int]] = {}
    for v in sorted(range(n), key=lambda v: labels[v]):
        members.setdefault(rings[v], []).append(v)

    max_size = 0.0
    sizes = [0.0] * n
    for v in range(n):
        sizes[v] = max(params.size_scale * math.log1p(n * max(pr[v], 0.0)), params.min_radius_px)
        max_size = max(max_size, sizes[v])
    outer = params.base_radius_px + (params.rings - 1) * params.ring_gap_px
    half = outer + max_size + params.margin_px
    width = height = 2 * half

    placed = {}
    for ring, group in members.items():
        orbit = params.base_radius_px + ring * params.ring_gap_px
        for i, v in enumerate(group):
            angle = 2 * math.pi * i / len(group)
            placed[v] = NodePlacement(
                v,
                labels[v],
                ring,
                angle,
                sizes[v],
                half + orbit * math.cos(angle),
                half + orbit * math.sin(angle),
            )

    edges = list(graph.edges())
    top = max((e.weight for e in edges), default=1.0)
    shades = tuple(
        EdgeShade(e.source, e.target, e.weight, e.weight / top)
        for e in sorted(edges, key=lambda e: (e.source, e.target))
    )
    return LayoutSpec(tuple(placed[v] for v in range(n)), shades, width, height)


_XML_INVALID = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ufffe\uffff\ud800-\udfff]")


def _xml_text(text: str) -> str:
    return escape(_XML_INVALID.sub("\ufffd", text))


def _num(x: float) -> str:
    return f"{x:.3f}"


def render_svg(layout: LayoutSpec, graph: InfluenceGraph, header: str | None = None) -> str:
    if len(layout.nodes) != graph.node_count:
        raise InconsistentInputError("layout does not cover the graph")
    pos = {p.node: p for p in layout.nodes}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(layout.width)}" '
        f'height="{_num(layout.height)}" viewBox="0 0 {_num(layout.width)} {_num(layout.height)}">',
    ]
    if header:
        out.append(f"<!-- {_xml_text(header).replace('--', '- -').rstrip('-')} -->")
    out.append('<g id="edges" stroke="#1f2d3d" stroke-width="1.2">')
    for e in sorted(layout.edges, key=lambda e: (e.source, e.target)):
        a, b = pos[e.source], pos[e.target]
        out.append(
            f'<line x1="{_num(a.x)}" y1="{_num(a.y)}" x2="{_num(b.x)}" y2="{_num(b.y)}" '
            f'stroke-opacity="{e.shade:.4f}"/>'
        )
    out.append("</g>")
    out.append('<g id="nodes" fill="#4f7cac" stroke="#ffffff" font-family="sans-serif" font-size="10">')
    for p in sorted(layout.nodes, key=lambda p: p.label):
        out.append(f'<circle cx="{_num(p.x)}" cy="{_num(p.y)}" r="{_num(p.radius_px)}"/>')
        out.append(
            f'<text x="{_num(p.x)}" y="{_num(p.y - p.radius_px - 2)}" text-anchor="middle" '
            f'stroke="none" fill="#000000">{_xml_text(p.label)}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_dot(graph: InfluenceGraph, scores: CentralityResult | None = None, header: str | None = None) -> str:
    labels = graph.labels
    out = []
    if header:
        out.append(f"// {header}")
    out.append("digraph influence {")
    for v in sorted(range(graph.node_count), key=lambda v: labels[v]):
        attrs = f" [score={scores.scores[v]:.12g}]" if scores is not None else ""
        out.append(f"  {json.dumps(labels[v])}{attrs};")
    for e in sorted(graph.edges(), key=lambda e: (labels[e.source], labels[e.target])):
        theories = ";".join(str(c) for c in sorted(e.provenance))
        out.append(
            f"  {json.dumps(labels[e.source])} -> {json.dumps(labels[e.target])} "
            f'[weight={e.weight:.12g}, theories="{theories}"];'
        )
    out.append("}")
    return "\n".join(out) + "\n"


def export_json(layout: LayoutSpec, graph: InfluenceGraph, header: str | None = None) -> str:
    labels = graph.labels
    doc = {
        "canvas": {"width": round(layout.width, 3), "height": round(layout.height, 3)},
        "nodes": [
            {
                "id": p.node,
                "label": p.label,
                "ring": p.ring,
                "angle": round(p.angle, 9),
                "x": round(p.x, 3),
                "y": round(p.y, 3),
                "radius": round(p.radius_px, 3),
            }
            for p in sorted(layout.nodes, key=lambda p: p.label)
        ],
        "edges": [
            {
                "source": labels[e.source],
                "target": labels[e.target],
                "weight": e.weight,
                "shade": round(e.shade, 6),
            }
            for e in sorted(layout.edges, key=lambda e: (e.source, e.target))
        ],
    }
    if header:
        doc["provenance"] = header
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_edge_csv(graph: InfluenceGraph) -> str:
    """Serialize to the ingest CSV format, one row per edge.

    Edges without provenance are written as ``weight`` repeated rows so the
    merge rule rebuilds the same weight; such weights must be integers.
    """
    labels = graph.labels
    lines = [",".join(CSV_HEADER)]
    for e in sorted(graph.edges(), key=lambda e: (labels[e.source], labels[e.target])):
        src, dst = _csv_field(labels[e.source]), _csv_field(labels[e.target])
        if e.provenance:
            codes = ";".join(str(c) for c in sorted(e.provenance))
            lines.append(f"{src},{RELATION},{dst},{codes}")
        else:
            if e.weight != int(e.weight):
                raise InvalidParameterError(
                    f"edge {labels[e.source]}->{labels[e.target]} has non-integer weight {e.weight} and no provenance"
                )
            lines.extend([f"{src},{RELATION},{dst}"] * int(e.weight))
    return "\n".join(lines) + "\n"


def _csv_field(text: str) -> str:
    if text != text.strip() or "\n" in text or "\r" in text:
        raise InvalidParameterError(f"label {text!r} cannot be written to the edge CSV format")
    if any(ch in text for ch in ',"'):
        return '"' + text.replace('"', '""') + '"'
    return text
