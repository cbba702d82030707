"""De Sitter dual of a compact or semi-ideal polyhedron, and its induced
cone-spherical metric.

Dual vertices are the face normals, dual edge lengths are exterior
dihedral angles, and the dual polygon at each primal vertex has corner
angles complementary to the primal face angles there.  Gluing the dual
polygons along matching edges yields a cone-spherical surface whose cone
points sit at the dual vertices, one per primal face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from hyperpoly.minkowski import (
    DSPoint,
    GeometryError,
    MVector,
    desitter_distance,
    inner,
)
from hyperpoly.polyhedron import (
    Combinatorics,
    ProjectivePolyhedron,
    corner_angle,
    exterior_angle,
    face_area,
)
from hyperpoly.conemetric import (
    ConeSphericalMetric,
    Piece,
    assemble_complex,
    fan_piece,
    hemisphere_cap,
)

EDGE_DUALITY_TOL = 1e-9
CORNER_DUALITY_TOL = 1e-8


@dataclass(frozen=True)
class SphericalPolygonData:
    """Boundary data of one dual polygon: cyclic side lengths and the
    corner angle before each side."""

    sides: Tuple[float, ...]
    corners: Tuple[float, ...]


@dataclass(frozen=True)
class DualPolyhedron:
    vertices: Dict[int, DSPoint]                 # one per primal face
    combinatorics: Combinatorics                 # transpose of the primal
    edge_lengths: Dict[Tuple[int, int], float]   # keyed by primal edge
    face_polygons: Dict[int, SphericalPolygonData]  # one per primal vertex


def _polygon_corner_from_points(prev_pt: MVector, at: MVector,
                                next_pt: MVector) -> float:
    """Corner angle of the dual polygon at ``at`` via ambient tangents,
    equivalently the spherical law of cosines on three consecutive dual
    vertices."""
    tu = prev_pt - inner(prev_pt, at) * at
    tw = next_pt - inner(next_pt, at) * at
    den = math.sqrt(inner(tu, tu) * inner(tw, tw))
    return math.acos(max(-1.0, min(1.0, inner(tu, tw) / den)))


def dual(poly: ProjectivePolyhedron) -> DualPolyhedron:
    """Dual polyhedron of a compact or semi-ideal polyhedron.

    Validates both duality identities: every dual edge length equals the
    exterior dihedral angle of its primal edge, and every dual polygon
    corner is complementary to the primal face angle at that corner.
    """
    if any(c == "hyperideal" for c in poly.vertex_class.values()):
        raise GeometryError("truncate first: polyhedron has hyperideal vertices")
    comb = poly.combinatorics
    verts = {f: DSPoint(poly.planes[f].n) for f in range(comb.num_faces)}

    lengths: Dict[Tuple[int, int], float] = {}
    for e in comb.edges():
        ell = desitter_distance(verts[e.faces[0]], verts[e.faces[1]])
        theta = exterior_angle(poly, e)
        if abs(ell - theta) > EDGE_DUALITY_TOL:
            raise GeometryError(
                f"dual edge length {ell} does not match exterior angle "
                f"{theta} on edge {e.vertices}")
        lengths[e.vertices] = ell

    polygons: Dict[int, SphericalPolygonData] = {}
    for v in comb.vertex_ids:
        fan = comb.vertex_fan(v)
        k = len(fan)
        sides = []
        for i, (_, w) in enumerate(fan):
            key = (min(v, w), max(v, w))
            sides.append(lengths[key])
        corners = []
        for i in range(k):
            f = fan[i][0]
            if poly.vertex_class[v] == "ideal":
                corners.append(math.pi)
                continue
            prev_f = fan[(i - 1) % k][0]
            next_f = fan[(i + 1) % k][0]
            ang = _polygon_corner_from_points(
                verts[prev_f].v, verts[f].v, verts[next_f].v)
            expected = math.pi - corner_angle(poly, f, v)
            if abs(ang - expected) > CORNER_DUALITY_TOL:
                raise GeometryError(
                    f"dual corner {ang} at face {f}, vertex {v} does not "
                    f"complement the primal angle ({expected})")
            corners.append(ang)
        polygons[v] = SphericalPolygonData(tuple(sides), tuple(corners))

    return DualPolyhedron(verts, comb.transpose(), lengths, polygons)


def _embedded_polygon(poly: ProjectivePolyhedron, v: int,
                      fan) -> List[np.ndarray]:
    """Dual polygon vertex coordinates on the unit 2-sphere orthogonal to
    the (finite) primal vertex."""
    p = poly.vertex_coords[v]
    basis = []
    for seed in (MVector(0, 1, 0, 0), MVector(0, 0, 1, 0),
                 MVector(0, 0, 0, 1), MVector(1, 0, 0, 0)):
        b = seed + inner(seed, p) * p  # remove the component along p
        for prev in basis:
            b = b - inner(b, prev) * prev
        q = inner(b, b)
        if q > 1e-8:
            basis.append(b / math.sqrt(q))
        if len(basis) == 3:
            break
    pts = []
    for f, _ in fan:
        n = poly.planes[f].n
        x = np.array([inner(n, basis[0]), inner(n, basis[1]),
                      inner(n, basis[2])])
        pts.append(x / np.linalg.norm(x))
    if len(pts) >= 3 and np.linalg.det(np.stack(pts[:3])) < 0.0:
        pts = [x * np.array([1.0, 1.0, -1.0]) for x in pts]
    return pts


def _acos(x: float) -> float:
    return math.acos(max(-1.0, min(1.0, x)))


def dual_piece(poly: ProjectivePolyhedron, v: int) -> Piece:
    """Triangulated dual polygon of one primal vertex."""
    comb = poly.combinatorics
    fan = comb.vertex_fan(v)
    dualp = getattr(poly, "_dual_cache", None)
    if poly.vertex_class[v] == "ideal":
        sides = []
        for (_, w) in fan:
            e = next(e for e in comb.edges()
                     if set(e.vertices) == {v, w})
            sides.append(exterior_angle(poly, e))
        return hemisphere_cap(sum(sides), sides)
    pts = _embedded_polygon(poly, v, fan)
    k = len(pts)
    sides = [_acos(float(pts[i] @ pts[(i + 1) % k])) for i in range(k)]
    corners = []
    for i in range(k):
        a = pts[(i - 1) % k]
        b = pts[i]
        c = pts[(i + 1) % k]
        ta = a - (a @ b) * b
        tc = c - (c @ b) * b
        corners.append(_acos(float(
            (ta @ tc) / math.sqrt((ta @ ta) * (tc @ tc)))))
    diagonals = [_acos(float(pts[0] @ pts[i + 1])) for i in range(k - 1)]
    return fan_piece(sides, corners, diagonals)


def dual_metric(poly: ProjectivePolyhedron,
                face_kinds: Optional[Dict[int, str]] = None,
                face_labels: Optional[Dict[int, str]] = None,
                ) -> ConeSphericalMetric:
    """Glue the dual polygons into a cone-spherical metric.

    Cone points sit at the dual vertices, one per primal face; pass
    ``face_kinds``/``face_labels`` to relabel truncation faces as apex
    ("h") points when the polyhedron is a truncation.
    """
    if any(c == "hyperideal" for c in poly.vertex_class.values()):
        raise GeometryError("truncate first: polyhedron has hyperideal vertices")
    comb = poly.combinatorics
    pieces = {v: dual_piece(poly, v) for v in comb.vertex_ids}
    labels = {f: f"f:{f}" for f in range(comb.num_faces)}
    kinds = {f: "f" for f in range(comb.num_faces)}
    if face_labels:
        labels.update(face_labels)
    if face_kinds:
        kinds.update(face_kinds)
    return assemble_complex(comb, pieces, labels, kinds)


@dataclass(frozen=True)
class ConeAngleEntry:
    cone_angle: float
    area: float

    @property
    def residual(self) -> float:
        return abs(self.cone_angle - 2.0 * math.pi - self.area)


def cone_angle_report(poly: ProjectivePolyhedron) -> Dict[int, ConeAngleEntry]:
    """Cone angle at each dual vertex against 2*pi plus the face area.

    The two numbers are computed independently (angle sums in the glued
    dual metric vs the angle-defect area of the primal face); their match
    is the negative-curvature bookkeeping identity.
    """
    metric = dual_metric(poly)
    angles = {cp.label: cp.angle for cp in metric.cone_points}
    out = {}
    for f in range(poly.combinatorics.num_faces):
        out[f] = ConeAngleEntry(cone_angle=angles[f"f:{f}"],
                                area=face_area(poly, f))
    return out
