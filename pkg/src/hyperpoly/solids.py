"""Reference polyhedra in the Minkowski model.

Plane families used throughout the test and acceptance suites: regular
tetrahedra across the compact / ideal / hyperideal range, coordinate
cubes, an orthogonal corner simplex, and a hyperideal pyramid over the
right-angled pentagon.
"""

from __future__ import annotations

import math
from typing import List, Sequence

import numpy as np

from hyperpoly.minkowski import GeometryError, HPlane, MVector, inner
from hyperpoly.polyhedron import _cross4

# Regular tetrahedron direction vectors on the unit sphere.
TETRA_DIRS = np.array([
    (1.0, 1.0, 1.0),
    (1.0, -1.0, -1.0),
    (-1.0, 1.0, -1.0),
    (-1.0, -1.0, 1.0),
]) / math.sqrt(3.0)

# sigma at which the regular tetrahedron's vertices reach the light cone,
# and where its edges stop meeting the hyperbolic ball.
TETRA_IDEAL_SIGMA = 1.0 / (2.0 * math.sqrt(2.0))
TETRA_MAX_SIGMA = 1.0 / math.sqrt(2.0)


def regular_tetrahedron_planes(sigma: float) -> List[HPlane]:
    """Four symmetric planes; sigma < ~0.354 compact, = ideal, < ~0.707
    hyperideal with all edges still meeting the hyperbolic ball."""
    k = math.sqrt(1.0 + sigma * sigma)
    return [HPlane(MVector(-sigma, *(k * u))) for u in TETRA_DIRS]


def ideal_tetrahedron_planes() -> List[HPlane]:
    return regular_tetrahedron_planes(TETRA_IDEAL_SIGMA)


def plane_at(direction: Sequence[float], distance: float) -> HPlane:
    """Hyperbolic plane at the given distance from the base point in the
    given spatial direction, inward normal (half-space holds the base)."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    sh, ch = math.sinh(distance), math.cosh(distance)
    return HPlane(MVector(-sh, *(-ch * d)))


def cube_planes(distance: float = 0.6,
                distances: Sequence[float] | None = None) -> List[HPlane]:
    """Six coordinate planes of a compact hyperbolic cube."""
    dirs = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    if distances is None:
        distances = [distance] * 6
    return [plane_at(d, r) for d, r in zip(dirs, distances)]


def corner_with_cap_planes(distance: float = 0.45) -> List[HPlane]:
    """Three mutually orthogonal planes through the base point plus a cap:
    a compact simplex with one all-right-angled corner.

    Stays compact only for distance < artanh(1/sqrt(3)); beyond that the
    far vertices cross the light cone and the far edges leave the ball.
    """
    planes = [HPlane(MVector(0, 1, 0, 0)), HPlane(MVector(0, 0, 1, 0)),
              HPlane(MVector(0, 0, 0, 1))]
    planes.append(plane_at((1, 1, 1), distance))
    return planes


def right_angled_pentagon_radius() -> float:
    """Circumradius of the regular pentagon with five right angles.

    From the right triangle (center, corner, edge midpoint):
    cosh r = cot(pi/4) cot(pi/5).
    """
    return math.acosh(1.0 / math.tan(math.pi / 5.0))


def plane_through(points: Sequence[MVector], interior: MVector) -> HPlane:
    """Unit spacelike normal orthogonal to three given directions, oriented
    so the interior point is on the nonnegative side."""
    j = np.diag([-1.0, 1.0, 1.0, 1.0])
    w = _cross4(*(j @ p.array() for p in points))
    n = MVector.from_array(w)
    q = inner(n, n)
    if q <= 0.0:
        raise GeometryError("three directions do not span a spacelike-normal plane")
    n = n / math.sqrt(q)
    if inner(interior, n) < 0.0:
        n = -n
    return HPlane(n)


def hyperideal_pentagon_pyramid_planes(radius: float | None = None) -> List[HPlane]:
    """Pentagon pyramid with a hyperideal apex and all base vertices ideal:
    the cap distance is tuned so the base corners land on the light cone."""
    if radius is None:
        radius = right_angled_pentagon_radius()
    cap = math.atanh(1.0 / math.cosh(radius))
    return pentagon_pyramid_planes(cap_distance=cap, radius=radius)


def pentagon_pyramid_planes(cap_distance: float = 0.8,
                            radius: float | None = None) -> List[HPlane]:
    """Hyperideal-apex pyramid over a regular pentagon.

    Five side planes pass through the pole of the equatorial plane and
    consecutive pentagon corners; a cap closes the solid (base vertices
    finite for small cap distances).  With the default radius the pentagon
    is right-angled, so the five edges through the apex have dihedral
    angle pi/2.
    """
    if radius is None:
        radius = right_angled_pentagon_radius()
    apex = MVector(0, 0, 0, 1)
    base = MVector(1, 0, 0, 0)
    corners = []
    for k in range(5):
        t = 2.0 * math.pi * k / 5.0
        corners.append(MVector(math.cosh(radius),
                               math.sinh(radius) * math.cos(t),
                               math.sinh(radius) * math.sin(t), 0.0))
    planes = []
    for k in range(5):
        planes.append(plane_through(
            [corners[k], corners[(k + 1) % 5], apex], base))
    planes.append(plane_at((0, 0, -1), cap_distance))
    return planes
