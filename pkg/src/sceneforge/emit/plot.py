"""Top-down SVG plot of a concrete scene."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

from ..geometry import OrientedRect
from ..scene import ConcreteScene, rect_of
from .fmt import num

PX_PER_M = 60.0
MARGIN_PX = 40.0

STYLE = """
.workspace { fill: none; stroke: #333333; stroke-width: 2; vector-effect: non-scaling-stroke; }
.object { fill: #e74c3c; fill-opacity: 0.6; stroke: #a93226; stroke-width: 1; vector-effect: non-scaling-stroke; }
.object.ego { fill: #2e86de; stroke: #1b4f72; }
.object.wall { fill: #7f8c8d; stroke: #4d5656; }
.object.mission { fill: #f5b041; stroke: #b9770e; }
.heading { stroke: #000000; stroke-width: 1.5; vector-effect: non-scaling-stroke; }
.label { font: 11px sans-serif; fill: #000000; text-anchor: middle; }
"""


def _r(v: float) -> str:
    # fixed precision keeps the file stable and small
    text = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _bounds(rects):
    xs, ys = [], []
    for r in rects:
        for x, y in r.corners():
            xs.append(float(x))
            ys.append(float(y))
    if not xs:
        return -1.0, -1.0, 1.0, 1.0
    return min(xs), min(ys), max(xs), max(ys)


def _classes(o) -> str:
    cls = ["object"]
    if o.is_ego:
        cls.append("ego")
    elif o.is_wall:
        cls.append("wall")
    elif o.mission_only:
        cls.append("mission")
    return " ".join(cls)


def _rect(r: OrientedRect, cls: str, extra: str = "", inner: str = "") -> str:
    w, l = 2 * r.half_width, 2 * r.half_length
    deg = math.degrees(r.heading)
    return (
        f'<g transform="translate({_r(r.cx)} {_r(r.cy)}) rotate({_r(deg)})">'
        f'<rect class="{cls}" x="{_r(-w / 2)}" y="{_r(-l / 2)}" width="{_r(w)}" height="{_r(l)}"{extra}/>'
        f"{inner}</g>"
    )


def emit_plot_svg(scene: ConcreteScene) -> str:
    """SVG 1.1 drawing; +y points up and heading 0 points up."""
    rects = [rect_of(o) for o in scene.objects]
    x0, y0, x1, y1 = _bounds([scene.workspace, *rects])
    s = PX_PER_M
    width = (x1 - x0) * s + 2 * MARGIN_PX
    height = (y1 - y0) * s + 2 * MARGIN_PX
    tx = MARGIN_PX - x0 * s
    ty = MARGIN_PX + y1 * s

    def to_px(x, y):
        return x * s + tx, -y * s + ty

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_r(width)}" height="{_r(height)}" '
        f'viewBox="0 0 {_r(width)} {_r(height)}">',
        f"<style>{STYLE}</style>",
        f'<g id="world" transform="matrix({_r(s)} 0 0 {_r(-s)} {_r(tx)} {_r(ty)})">',
        _rect(scene.workspace, "workspace"),
    ]
    for o, r in zip(scene.objects, rects):
        tick = f'<line class="heading" x1="0" y1="0" x2="0" y2="{_r(r.half_length)}"/>'
        title = f"<title>{escape(o.instance_name)}</title>"
        out.append(_rect(r, _classes(o), f" data-name={quoteattr(o.instance_name)}", tick + title))
    out.append("</g>")
    out.append('<g id="labels">')
    for o in scene.objects:
        px, py = to_px(float(o.position[0]), float(o.position[1]))
        out.append(f'<text class="label" x="{_r(px)}" y="{_r(py - 4)}">{escape(o.instance_name)}</text>')
    out.append("</g>")
    out.append(f"<desc>seed {num(scene.seed)}</desc>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
