"""Oriented rectangles on the ground plane.

Heading convention: 0 points along +y, counterclockwise positive.
``forward(h) = (-sin h, cos h)`` and ``right(h) = (cos h, sin h)``;
half_width runs along ``right``, half_length along ``forward``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TOUCH_EPS = 1e-9


def forward(heading: float) -> tuple[float, float]:
    return (-math.sin(heading), math.cos(heading))


def right(heading: float) -> tuple[float, float]:
    return (math.cos(heading), math.sin(heading))


def rotate(vec, heading: float) -> tuple[float, float]:
    c, s = math.cos(heading), math.sin(heading)
    return (vec[0] * c - vec[1] * s, vec[0] * s + vec[1] * c)


def normalize_heading(h):
    """Map an angle into (-pi, pi]; values already in range are returned untouched."""
    if -math.pi < h <= math.pi:
        return h
    h = math.remainder(float(h), 2 * math.pi)
    return math.pi if h <= -math.pi else h


@dataclass(frozen=True)
class OrientedRect:
    cx: float
    cy: float
    heading: float
    half_width: float
    half_length: float

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)

    def axes(self):
        return right(self.heading), forward(self.heading)

    def corners(self) -> list[tuple[float, float]]:
        (rx, ry), (fx, fy) = self.axes()
        out = []
        for sw, sl in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            out.append(
                (
                    self.cx + sw * self.half_width * rx + sl * self.half_length * fx,
                    self.cy + sw * self.half_width * ry + sl * self.half_length * fy,
                )
            )
        return out

    def radius_along(self, axis) -> float:
        (rx, ry), (fx, fy) = self.axes()
        return self.half_width * abs(rx * axis[0] + ry * axis[1]) + self.half_length * abs(
            fx * axis[0] + fy * axis[1]
        )

    def to_local(self, p) -> tuple[float, float]:
        dx, dy = p[0] - self.cx, p[1] - self.cy
        (rx, ry), (fx, fy) = self.axes()
        return (dx * rx + dy * ry, dx * fx + dy * fy)

    def contains_point(self, p, eps: float = TOUCH_EPS) -> bool:
        u, v = self.to_local(p)
        return abs(u) <= self.half_width + eps and abs(v) <= self.half_length + eps

    def sample_point(self, rng) -> tuple[float, float]:
        u = rng.uniform(-self.half_width, self.half_width)
        v = rng.uniform(-self.half_length, self.half_length)
        (rx, ry), (fx, fy) = self.axes()
        return (self.cx + u * rx + v * fx, self.cy + u * ry + v * fy)


def separation(a: OrientedRect, b: OrientedRect) -> float:
    """Largest gap between the projections over the four edge normals.

    Positive means separated by that distance along some axis; negative
    values give the smallest overlap depth.
    """
    dx, dy = b.cx - a.cx, b.cy - a.cy
    best = -math.inf
    for axis in (*a.axes(), *b.axes()):
        dist = abs(dx * axis[0] + dy * axis[1])
        gap = dist - a.radius_along(axis) - b.radius_along(axis)
        best = max(best, gap)
    return best


def rects_intersect(a: OrientedRect, b: OrientedRect, eps: float = TOUCH_EPS) -> bool:
    """True iff the interiors overlap; touching edges do not count."""
    return separation(a, b) < -eps


def rect_inside(outer: OrientedRect, inner: OrientedRect, eps: float = TOUCH_EPS) -> bool:
    return all(outer.contains_point(c, eps) for c in inner.corners())
