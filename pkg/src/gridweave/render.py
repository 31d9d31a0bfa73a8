"""Deterministic SVG rendering of grid layouts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .model import GridLayout, LayoutError, trace_boundary

# Fixed categorical cycle (tab20-style); assigned to sorted cluster ids.
PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
    "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
    "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)


def palette_for(cluster_ids) -> dict[str, str]:
    return {cid: PALETTE[i % len(PALETTE)] for i, cid in enumerate(sorted(cluster_ids))}


@dataclass(frozen=True)
class RenderStyle:
    cell_px: int = 16
    palette: Optional[Mapping[str, str]] = None
    stroke_width: float = 1.5
    show_ids: bool = False

    def __post_init__(self) -> None:
        if self.cell_px < 4:
            raise LayoutError("cell_px must be at least 4")


def render_svg(layout: GridLayout, style: RenderStyle = RenderStyle()) -> str:
    """One rect per cell (cluster fill, empty cells white), boundaries stroked."""
    spec = layout.spec
    px = style.cell_px
    width, height = spec.width * px, spec.height * px
    colors = dict(style.palette) if style.palette else palette_for(
        {lab for lab in layout.labels if lab is not None}
    )
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')
    sample_of = layout.assignment.sample_of
    for cell in range(spec.capacity):
        cluster = layout.labels[cell]
        if cluster is None:
            continue
        c, r = spec.cell_of_index(cell)
        fill = colors.get(cluster, "#000000")
        out.append(
            f'<rect x="{c * px}" y="{r * px}" width="{px}" height="{px}" fill="{fill}"/>'
        )
    for cluster, cells in sorted(layout.cluster_cells().items()):
        for ring in trace_boundary(cells):
            points = " ".join(f"{x * px},{y * px}" for x, y in ring.vertices)
            out.append(
                f'<polygon points="{points}" fill="none" stroke="#222222" '
                f'stroke-width="{style.stroke_width}"/>'
            )
    if style.show_ids:
        font = max(4, px // 3)
        for cell in range(spec.capacity):
            i = sample_of[cell]
            if i is None:
                continue
            c, r = spec.cell_of_index(cell)
            sid = layout.samples.samples[i].id
            out.append(
                f'<text x="{c * px + px / 2}" y="{r * px + px / 2 + font / 3}" '
                f'font-size="{font}" text-anchor="middle" '
                f'font-family="sans-serif">{_escape(sid)}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
