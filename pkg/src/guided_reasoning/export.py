"""Deterministic renderers: protocol text, Graphviz DOT, and layered SVG.

Every renderer iterates in sorted order so identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import textwrap
from xml.sax.saxutils import escape as xml_escape

from .argmap import ArgumentMap, Valence, validate_map
from .protocol import EventKind, ProtocolEvent, ReasoningProtocol

TRANSITION_LINE = (
    "Now, let's reconsider this step by step, and systematically balance the "
    "different reasons."
)
PRUNED_LINE = (
    "For lack of plausibility, this claim will not be considered when "
    "balancing pros and cons below."
)

SUPPORT_COLOR = "#1a9850"
ATTACK_COLOR = "#d73027"


def _claim_quote(payload: dict) -> str:
    return f"'[{payload['label']}]: {payload['statement']}'"


def _reason_lines(group: list[dict]) -> str:
    if not group:
        return "None."
    return "\n".join(f"[{item['label']}]: {item['statement']}" for item in group)


def _render_event(event: ProtocolEvent) -> str | None:
    p = event.payload
    if event.kind is EventKind.BRAINSTORM:
        return p.get("text", "").strip() or None
    if event.kind is EventKind.LEAF_ASSESSMENT:
        return (
            f"In view of the initial problem description, the claim "
            f"{_claim_quote(p)} is assessed as {p['verdict']}."
        )
    if event.kind is EventKind.CONDITIONAL_ASSESSMENT:
        return (
            f"In view of the above considerations, the claim {_claim_quote(p)} "
            f"is assessed as {p['verdict']}, since it is supported by the "
            f"following plausible reasons:\n{_reason_lines(p.get('pros', []))}\n"
            f"and disconfirmed by the following plausible reasons:\n"
            f"{_reason_lines(p.get('cons', []))}"
        )
    if event.kind is EventKind.PRUNED:
        return PRUNED_LINE
    if event.kind is EventKind.CENTRAL_VERDICT:
        if "text" in p:
            return p["text"]
        return (
            f"So, all in all, the central claim {_claim_quote(p)} is assessed "
            f"as {p['verdict']}."
        )
    if event.kind is EventKind.FAILURE:
        return f"The deliberation failed during the {p['stage']} stage: {p['cause']}"
    # AnswerDraft is delivered separately, not part of the protocol text.
    return None


def render_protocol(protocol: ReasoningProtocol) -> str:
    blocks: list[str] = []
    assessments_started = False
    for event in protocol.events:
        if not assessments_started and event.kind in (
            EventKind.LEAF_ASSESSMENT,
            EventKind.CONDITIONAL_ASSESSMENT,
        ):
            blocks.append(TRANSITION_LINE)
            assessments_started = True
        block = _render_event(event)
        if block is not None:
            blocks.append(block)
    return "\n\n".join(blocks)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _wrap_label(claim_label: str, statement: str, width: int = 40) -> list[str]:
    return textwrap.wrap(f"[{claim_label}]: {statement}", width=width) or [""]


def render_dot(argmap: ArgumentMap) -> str:
    """Graphviz digraph: support edges green, attack edges red, non-tree
    edges dashed, weights as two-decimal labels."""
    problems = validate_map(argmap)
    if problems:
        raise ValueError(f"invalid map: {problems[0]}")
    lines = ["digraph argument_map {", "  rankdir=BT;", '  node [shape=box, style=rounded];']
    for claim in sorted(argmap.claims, key=lambda c: c.id):
        label = _dot_escape("\\n".join(_wrap_label(claim.label, claim.statement)))
        shape = ', penwidth=2' if claim.is_root else ""
        lines.append(f'  "{_dot_escape(claim.id)}" [label="{label}"{shape}];')
    for edge in sorted(argmap.edges, key=lambda e: e.pair):
        color = SUPPORT_COLOR if edge.valence is Valence.SUPPORT else ATTACK_COLOR
        style = "solid" if argmap.is_tree_edge(edge) else "dashed"
        lines.append(
            f'  "{_dot_escape(edge.source)}" -> "{_dot_escape(edge.target)}" '
            f'[color="{color}", style={style}, label="{edge.weight:.2f}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _layer_of(argmap: ArgumentMap) -> dict[str, int]:
    """Roots sit in layer 0; every reason one layer below its tree target."""
    target = {s: t for (s, t) in argmap.tree}
    layer: dict[str, int] = {c.id: 0 for c in argmap.claims if c.is_root}

    def depth(cid: str) -> int:
        if cid in layer:
            return layer[cid]
        layer[cid] = depth(target[cid]) + 1
        return layer[cid]

    for claim in argmap.claims:
        depth(claim.id)
    return layer


NODE_W, NODE_H, GAP_X, GAP_Y, MARGIN = 230, 72, 28, 80, 24


def render_svg(argmap: ArgumentMap) -> str:
    """Self-contained SVG with a layered layout: roots on top, each claim one
    layer below its tree target."""
    problems = validate_map(argmap)
    if problems:
        raise ValueError(f"invalid map: {problems[0]}")
    layer = _layer_of(argmap)
    depth_count = max(layer.values()) + 1
    rows: list[list[str]] = [[] for _ in range(depth_count)]
    for cid in sorted(layer):
        rows[layer[cid]].append(cid)

    widest = max(len(row) for row in rows)
    width = MARGIN * 2 + widest * NODE_W + (widest - 1) * GAP_X
    height = MARGIN * 2 + depth_count * NODE_H + (depth_count - 1) * GAP_Y

    pos: dict[str, tuple[float, float]] = {}
    for d, row in enumerate(rows):
        row_w = len(row) * NODE_W + (len(row) - 1) * GAP_X
        x0 = (width - row_w) / 2
        y = MARGIN + d * (NODE_H + GAP_Y)
        for i, cid in enumerate(row):
            pos[cid] = (x0 + i * (NODE_W + GAP_X), y)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        "<defs>",
        f'<marker id="arrow-support" viewBox="0 0 10 10" refX="9" refY="5" '
        f'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        f'<path d="M 0 0 L 10 5 L 0 10 z" fill="{SUPPORT_COLOR}"/></marker>',
        f'<marker id="arrow-attack" viewBox="0 0 10 10" refX="9" refY="5" '
        f'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        f'<path d="M 0 0 L 10 5 L 0 10 z" fill="{ATTACK_COLOR}"/></marker>',
        "</defs>",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    for edge in sorted(argmap.edges, key=lambda e: e.pair):
        x1, y1 = pos[edge.source]
        x2, y2 = pos[edge.target]
        sx, sy = x1 + NODE_W / 2, y1
        tx, ty = x2 + NODE_W / 2, y2 + NODE_H
        if edge.source in {c.id for c in argmap.roots}:
            # Root-root attacks run between box sides.
            sy, ty = y1 + NODE_H / 2, y2 + NODE_H / 2
            sx = x1 + (NODE_W if x2 > x1 else 0)
            tx = x2 + (0 if x2 > x1 else NODE_W)
        support = edge.valence is Valence.SUPPORT
        color = SUPPORT_COLOR if support else ATTACK_COLOR
        marker = "arrow-support" if support else "arrow-attack"
        dash = "" if argmap.is_tree_edge(edge) else ' stroke-dasharray="6 4"'
        parts.append(
            f'<line x1="{sx:.1f}" y1="{sy:.1f}" x2="{tx:.1f}" y2="{ty:.1f}" '
            f'stroke="{color}" stroke-width="1.6"{dash} marker-end="url(#{marker})"/>'
        )
        mx, my = (sx + tx) / 2, (sy + ty) / 2
        parts.append(
            f'<text x="{mx:.1f}" y="{my:.1f}" fill="{color}" font-size="10" '
            f'text-anchor="middle">{edge.weight:.2f}</text>'
        )

    for cid, (x, y) in sorted(pos.items()):
        claim = argmap.claim_by_id(cid)
        stroke_width = 2.5 if claim.is_root else 1.2
        parts.append(
            f'<g><title>{xml_escape(f"[{claim.label}]: {claim.statement}")}</title>'
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{NODE_W}" height="{NODE_H}" rx="8" '
            f'fill="#f7f7f7" stroke="#333333" stroke-width="{stroke_width}"/>'
        )
        wrapped = _wrap_label(claim.label, claim.statement, width=38)[:3]
        for i, line in enumerate(wrapped):
            weight = ' font-weight="bold"' if i == 0 and claim.is_root else ""
            parts.append(
                f'<text x="{x + NODE_W / 2:.1f}" y="{y + 20 + i * 15:.1f}" '
                f'text-anchor="middle"{weight}>{xml_escape(line)}</text>'
            )
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
