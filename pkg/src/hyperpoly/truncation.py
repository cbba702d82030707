"""Truncation of hyperideal vertices by their polar planes, and its
inverse.

Each strictly hyperideal vertex determines the hyperbolic plane orthogonal
to all lines through it; cutting with these planes produces a semi-ideal
polyhedron whose new faces meet all their neighbors at right angles.  The
inverse removes such faces and recovers the poles as vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from hyperpoly.minkowski import DSPoint, GeometryError, HPlane, MVector, inner
from hyperpoly.polyhedron import (
    ProjectivePolyhedron,
    dihedral_angle,
    from_planes,
)
from hyperpoly.angles import WeightedDualGraph, edge_key

PERP_TOL = 1e-8
DISJOINT_TOL = 1e-9


def polar_plane(x: DSPoint) -> HPlane:
    """Plane orthogonal to every line through the spacelike point x,
    oriented so the half-space excludes x itself."""
    return HPlane(-x.v)


@dataclass(frozen=True)
class Truncation:
    polyhedron: ProjectivePolyhedron
    face_of_vertex: Dict[int, int]  # original hyperideal vertex id -> new face id


def truncate(poly: ProjectivePolyhedron) -> Truncation:
    """Cut every strictly hyperideal vertex by its polar plane.

    Verifies the three structural facts that make the truncation valid:
    the polar planes are pairwise disjoint hyperbolic planes, every
    truncation face is perpendicular to all faces it meets, and each
    truncated vertex is replaced by a face whose cycle matches the
    vertex's edge fan.
    """
    hyper = sorted(v for v, c in poly.vertex_class.items()
                   if c == "hyperideal")
    if not hyper:
        raise GeometryError("polyhedron has no hyperideal vertices")
    poles = {v: poly.vertex_coords[v] for v in hyper}

    for i, v in enumerate(hyper):
        for w in hyper[i + 1:]:
            c = inner(poles[v], poles[w])
            if c > -(1.0 - DISJOINT_TOL):
                raise GeometryError(
                    f"polar planes of vertices {v} and {w} are not disjoint "
                    f"(<x,x'> = {c})")

    planes = list(poly.planes)
    face_of_vertex = {}
    for v in hyper:
        face_of_vertex[v] = len(planes)
        planes.append(polar_plane(DSPoint(poles[v])))

    cut = from_planes(planes)

    n_orig = len(poly.planes)
    incident = {v: sorted(f for f, cyc in
                          enumerate(poly.combinatorics.face_cycles)
                          if v in cyc) for v in hyper}
    for v in hyper:
        tf = face_of_vertex[v]
        n_t = cut.planes[tf].n
        neighbors = set()
        for e in cut.edges():
            if tf in e.faces:
                other = e.faces[0] if e.faces[1] == tf else e.faces[1]
                neighbors.add(other)
                if abs(inner(n_t, cut.planes[other].n)) > PERP_TOL:
                    raise GeometryError(
                        f"truncation face {tf} not perpendicular to face "
                        f"{other}")
        if neighbors != set(incident[v]):
            raise GeometryError(
                f"truncation face {tf} replaces vertex {v} but its "
                f"neighbors {sorted(neighbors)} differ from the vertex's "
                f"faces {incident[v]}")
        cyc = cut.combinatorics.face_cycles[tf]
        if len(cyc) != len(incident[v]):
            raise GeometryError(
                f"truncation face cycle length {len(cyc)} != vertex degree")
    if any(c == "hyperideal" for c in cut.vertex_class.values()):
        raise GeometryError("truncation left a hyperideal vertex")
    return Truncation(cut, face_of_vertex)


def untruncate(poly: ProjectivePolyhedron,
               truncation_faces: Tuple[int, ...]) -> ProjectivePolyhedron:
    """Remove truncation faces and recover their poles as vertices.

    Preconditions checked: the listed faces are pairwise non-adjacent,
    carry all finite vertices, and meet every adjacent face at a right
    angle.
    """
    tset = set(truncation_faces)
    if not tset:
        raise GeometryError("no truncation faces given")
    for f in tset:
        if not (0 <= f < len(poly.planes)):
            raise GeometryError(f"face {f} out of range")

    edges = poly.edges()
    for e in edges:
        if e.faces[0] in tset and e.faces[1] in tset:
            raise GeometryError(
                f"not a truncation: faces {e.faces} are adjacent")
    for e in edges:
        a, b = e.faces
        if (a in tset) != (b in tset):
            t, other = (a, b) if a in tset else (b, a)
            if abs(inner(poly.planes[t].n, poly.planes[other].n)) > PERP_TOL:
                raise GeometryError(
                    f"not a truncation: face {t} meets face {other} at a "
                    "non-right angle")
    for v, cls in poly.vertex_class.items():
        if cls != "finite":
            continue
        on_listed = any(v in poly.combinatorics.face_cycles[f] for f in tset)
        if not on_listed:
            raise GeometryError(
                f"not a truncation: finite vertex {v} lies on no listed face")

    remaining = [p for f, p in enumerate(poly.planes) if f not in tset]
    restored = from_planes(remaining)

    # the poles of the removed planes must reappear as hyperideal vertices
    for f in sorted(tset):
        pole = -poly.planes[f].n
        found = any(
            cls == "hyperideal" and
            max(abs(t) for t in (poly_coords - pole)) < 1e-7
            for vid, poly_coords in restored.vertex_coords.items()
            for cls in (restored.vertex_class[vid],))
        if not found:
            raise GeometryError(
                f"not a truncation: pole of face {f} is not a vertex of the "
                "restored polyhedron")
    return restored


def hyperideal_angles(poly: ProjectivePolyhedron) -> WeightedDualGraph:
    """Exterior dihedral angles of a hyperideal polyhedron on its dual
    graph, with the vertex kinds declared from the causal classes."""
    kinds = {}
    for v, cls in poly.vertex_class.items():
        if cls == "finite":
            raise GeometryError("not hyperideal: polyhedron has finite vertices")
        kinds[v] = cls
    weights = {}
    for e in poly.edges():
        weights[edge_key(*e.vertices)] = math.pi - dihedral_angle(poly, e)
    return WeightedDualGraph(poly.combinatorics, weights, kinds)