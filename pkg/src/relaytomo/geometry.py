"""Planar scene geometry: baseline frame, departure/arrival angles,
law-of-sines distances, relay regions, and square-cell discretization.

Conventions
-----------
Departure and arrival angles are unsigned interior angles of the
source-relay-destination triangle, both in (0, pi) with their sum < pi.
The network is assumed to lie on one fixed side of the baseline: the
counter-clockwise side of the directed destination->source axis (the upper
half-plane when the destination sits at the origin and the source on the
positive x axis).  `point_from_angles` always returns the point on that
side, which makes it the exact inverse of `angles_from_point` there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateGeometryError, DomainError, EmptyGridError, GeometryError
from .numerics import RngStream

COLLINEAR_TOL = 1e-9  # radians; below double-precision conditioning of the sine ratios


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"point coordinates must be finite, got ({self.x}, {self.y})")


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class Baseline:
    """Source/destination pair spanning the angular reference axis."""

    source: Point
    destination: Point

    def __post_init__(self) -> None:
        if dist(self.source, self.destination) <= 0.0:
            raise GeometryError("source and destination must be distinct points")

    @property
    def length(self) -> float:
        return dist(self.source, self.destination)


@dataclass(frozen=True)
class AnglePair:
    """Departure angle at the source and arrival angle at the destination."""

    aod: float
    aoa: float

    def __post_init__(self) -> None:
        if not (0.0 < self.aod < math.pi and 0.0 < self.aoa < math.pi):
            raise GeometryError(f"angles must lie in (0, pi), got ({self.aod}, {self.aoa})")
        if not (self.aod + self.aoa < math.pi):
            raise GeometryError(
                f"triangle condition violated: aod + aoa = {self.aod + self.aoa} >= pi"
            )


@dataclass(frozen=True)
class RelayRegion:
    """Disc-shaped relay region with a position density over it.

    density is a callable (x, y) -> probability density; None means uniform
    over the disc.  The density must integrate to 1 over the disc; the
    uniform default does by construction, custom callables are the caller's
    responsibility (see tests for a quadrature check).
    """

    center: Point
    radius: float
    density: Callable[[float, float], float] | None = None

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise GeometryError(f"region radius must be positive, got {self.radius}")

    def contains(self, p: Point) -> bool:
        return dist(p, self.center) <= self.radius

    def density_at(self, x: float, y: float) -> float:
        if math.hypot(x - self.center.x, y - self.center.y) > self.radius:
            return 0.0
        if self.density is None:
            return 1.0 / (math.pi * self.radius * self.radius)
        return self.density(x, y)

    def bounding_box(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.radius
        return (c.x - r, c.x + r, c.y - r, c.y + r)

    def sample(self, rng: RngStream | np.random.Generator, n: int) -> list[Point]:
        """n i.i.d. uniform draws from the disc (uniform density only)."""
        if self.density is not None:
            raise GeometryError("sampling is implemented for the uniform density only")
        gen = rng.generator() if isinstance(rng, RngStream) else rng
        radii = self.radius * np.sqrt(gen.random(n))
        theta = 2.0 * math.pi * gen.random(n)
        return [
            Point(float(self.center.x + r * math.cos(t)),
                  float(self.center.y + r * math.sin(t)))
            for r, t in zip(radii, theta)
        ]


@dataclass(frozen=True)
class CellGrid:
    """Row-major ordered centers of square cells covering a region."""

    cells: tuple[Point, ...]
    cell_side: float

    def __post_init__(self) -> None:
        if len(self.cells) < 1:
            raise EmptyGridError("cell grid must contain at least one cell")
        if self.cell_side <= 0.0:
            raise GeometryError(f"cell side must be positive, got {self.cell_side}")


def _unit(dx: float, dy: float) -> tuple[float, float]:
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise GeometryError("zero-length direction vector")
    return dx / norm, dy / norm


def _interior_angle(vx: float, vy: float, wx: float, wy: float) -> float:
    """Unsigned angle between two direction vectors, in [0, pi]."""
    cross = vx * wy - vy * wx
    dot = vx * wx + vy * wy
    return math.atan2(abs(cross), dot)


def signed_angle(vx: float, vy: float, wx: float, wy: float) -> float:
    """Counter-clockwise angle from v to w, in (-pi, pi]."""
    return math.atan2(vx * wy - vy * wx, vx * wx + vy * wy)


def angles_from_point(baseline: Baseline, relay: Point) -> AnglePair:
    """Interior angles at the source and destination subtended by a relay.

    Raises DegenerateGeometryError when the relay is collinear with the
    baseline to within COLLINEAR_TOL radians.
    """
    s, d = baseline.source, baseline.destination
    aod = _interior_angle(d.x - s.x, d.y - s.y, relay.x - s.x, relay.y - s.y)
    aoa = _interior_angle(s.x - d.x, s.y - d.y, relay.x - d.x, relay.y - d.y)
    if min(aod, aoa) < COLLINEAR_TOL or max(aod, aoa) > math.pi - COLLINEAR_TOL:
        raise DegenerateGeometryError(
            f"relay at ({relay.x}, {relay.y}) is collinear with the baseline"
        )
    return AnglePair(aod, aoa)


def _check_triangle(angles: AnglePair) -> None:
    if angles.aod + angles.aoa >= math.pi - COLLINEAR_TOL:
        raise DegenerateGeometryError(
            f"angle sum {angles.aod + angles.aoa} too close to pi"
        )


def point_from_angles(baseline: Baseline, angles: AnglePair) -> Point:
    """Unique point on the network side of the baseline with these angles."""
    _check_triangle(angles)
    s, d = baseline.source, baseline.destination
    ux, uy = _unit(s.x - d.x, s.y - d.y)       # destination -> source axis
    nx, ny = -uy, ux                            # CCW normal: the network side
    r = dist_relay_destination(baseline, angles)
    ca, sa = math.cos(angles.aoa), math.sin(angles.aoa)
    return Point(d.x + r * (ca * ux + sa * nx), d.y + r * (ca * uy + sa * ny))


def dist_relay_destination(baseline: Baseline, angles: AnglePair) -> float:
    """Relay-to-destination distance via the law of sines."""
    _check_triangle(angles)
    return baseline.length * math.sin(angles.aod) / math.sin(angles.aod + angles.aoa)


def dist_source_relay(baseline: Baseline, angles: AnglePair) -> float:
    """Source-to-relay distance via the law of sines."""
    _check_triangle(angles)
    return baseline.length * math.sin(angles.aoa) / math.sin(angles.aod + angles.aoa)


def check_region_clear_of_baseline(region: RelayRegion, baseline: Baseline) -> None:
    """Reject regions touching the baseline axis.

    The angle map is singular on the axis through source and destination, so
    the disc must lie strictly on one side of that whole line (not merely
    avoid the segment); every region point then has a well-defined angle
    pair.
    """
    s, d = baseline.destination, baseline.source
    ux, uy = _unit(d.x - s.x, d.y - s.y)
    # perpendicular distance from the disc center to the infinite line
    off = abs(-uy * (region.center.x - s.x) + ux * (region.center.y - s.y))
    if off <= region.radius:
        raise GeometryError(
            "relay region touches the baseline axis "
            f"(center offset {off:.3f} m <= radius {region.radius:.3f} m)"
        )


def discretize_region(region: RelayRegion, cell_side: float) -> CellGrid:
    """Square-cell centers inside the region, row-major over its bounding box."""
    if cell_side <= 0.0:
        raise DomainError(f"cell side must be positive, got {cell_side}")
    x0, x1, y0, y1 = region.bounding_box()
    nx = max(1, math.ceil((x1 - x0) / cell_side))
    ny = max(1, math.ceil((y1 - y0) / cell_side))
    centers = []
    for iy in range(ny):
        cy = y0 + (iy + 0.5) * cell_side
        for ix in range(nx):
            cx = x0 + (ix + 0.5) * cell_side
            p = Point(cx, cy)
            if region.contains(p):
                centers.append(p)
    if not centers:
        raise EmptyGridError(
            f"cell side {cell_side} m leaves no cell center inside the region"
        )
    return CellGrid(tuple(centers), cell_side)


def angular_span(
    region: RelayRegion,
    node: Point,
    reference: tuple[float, float],
) -> tuple[float, float]:
    """Minimal angle interval subtending the region from an exterior node.

    Angles are measured from the reference ray, oriented so that the region
    center sits at a non-negative angle (for a reference ray pointing at the
    region the span comes out symmetric about zero).  Raises GeometryError
    if the node lies inside the region.
    """
    rx, ry = _unit(*reference)
    d = dist(node, region.center)
    if d <= region.radius:
        raise GeometryError("angular span undefined: node lies inside the region")
    center_angle = signed_angle(rx, ry, region.center.x - node.x, region.center.y - node.y)
    orient = -1.0 if center_angle < 0.0 else 1.0
    half = math.asin(region.radius / d)
    mid = orient * center_angle
    return (mid - half, mid + half)


def span_angle(
    region: RelayRegion,
    node: Point,
    reference: tuple[float, float],
    p: Point,
) -> float:
    """Angle of p seen from the node, in the angular_span orientation."""
    rx, ry = _unit(*reference)
    center_angle = signed_angle(rx, ry, region.center.x - node.x, region.center.y - node.y)
    orient = -1.0 if center_angle < 0.0 else 1.0
    return orient * signed_angle(rx, ry, p.x - node.x, p.y - node.y)


def sample_relays(region: RelayRegion, n: int, rng: RngStream) -> list[Point]:
    """Relay positions drawn from the region density (uniform disc)."""
    if n < 0:
        raise DomainError(f"relay count must be non-negative, got {n}")
    if n == 0:
        return []
    return region.sample(rng, n)
