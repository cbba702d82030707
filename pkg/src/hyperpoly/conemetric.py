"""Cone-spherical surfaces: curvature +1 complexes glued from spherical
triangles, with labeled cone points.

The central constructors are ``hemisphere_cap`` (a disk of doubly-right
triangles around an apex, boundary at distance pi/2 from it) and
``build_cap_complex`` (one cap per primal vertex of a weighted dual graph,
boundaries glued along shared edges).  Dual metrics of polyhedra are
assembled through the same machinery by ``hyperpoly.duality``.

Conventions: triangle corners 0,1,2 are positively oriented; side i joins
corners (i+1, i+2) and has length ``sides[i]``; a gluing identifies the
first endpoint of one side with the second endpoint of the other, so the
glued surface is oriented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from hyperpoly.minkowski import GeometryError

SIDE_MATCH_TOL = 1e-8
ANGLE_SUM_TOL = 1e-8
TRIANGLE_TOL = 1e-9


def _acos(x: float) -> float:
    return math.acos(max(-1.0, min(1.0, x)))


@dataclass(frozen=True)
class SphericalTriangle:
    """Spherical triangle; sides in (0, pi], angles in (0, pi]."""

    sides: Tuple[float, float, float]
    angles: Tuple[float, float, float]

    @staticmethod
    def from_sides(a: float, b: float, c: float) -> "SphericalTriangle":
        sides = (a, b, c)
        for s in sides:
            if not (0.0 < s <= math.pi):
                raise GeometryError(f"side {s} outside (0, pi]")
        if a >= b + c or b >= a + c or c >= a + b or a + b + c >= 2 * math.pi:
            raise GeometryError(f"sides {sides} violate the triangle bounds")
        angles = []
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            num = math.cos(x) - math.cos(y) * math.cos(z)
            den = math.sin(y) * math.sin(z)
            angles.append(_acos(num / den))
        return SphericalTriangle(sides, tuple(angles))

    @staticmethod
    def doubly_right(apex: float) -> "SphericalTriangle":
        """Two sides of length pi/2; base length equals the apex angle."""
        if not (0.0 < apex < math.pi):
            raise GeometryError("subdivide partition: apex angle must be in (0, pi)")
        h = math.pi / 2.0
        return SphericalTriangle((apex, h, h), (apex, h, h))

    def validate(self, tol: float = TRIANGLE_TOL) -> None:
        a, b, c = self.sides
        A, B, C = self.angles
        for (x, y, z, X) in ((a, b, c, A), (b, c, a, B), (c, a, b, C)):
            lhs = math.cos(x)
            rhs = math.cos(y) * math.cos(z) + math.sin(y) * math.sin(z) * math.cos(X)
            if abs(lhs - rhs) > tol:
                raise GeometryError(
                    f"law of cosines violated: {lhs} vs {rhs}")
        if self.area() <= 0.0:
            raise GeometryError("non-positive triangle area")

    def area(self) -> float:
        return sum(self.angles) - math.pi


@dataclass(frozen=True)
class ConePoint:
    label: str
    kind: str  # "h" | "f"
    angle: float


@dataclass(frozen=True)
class MarkedEdge:
    """One geodesic seam of the marked graph, with a reference side."""

    nodes: Tuple[str, str]
    length: float
    kind: str  # "seam" | "radial"
    key: Tuple
    side: Tuple[int, int]  # (triangle, side) lying on this seam


@dataclass(frozen=True)
class MarkedGraph:
    edges: Tuple[MarkedEdge, ...]

    def seam_lengths(self) -> Dict[Tuple, float]:
        return {e.key: e.length for e in self.edges if e.kind == "seam"}

    def labeled_multiset(self, tol_decimals: int = 9):
        """Canonical comparable form: sorted (node pair, rounded length)."""
        return sorted((tuple(sorted(e.nodes)), round(e.length, tol_decimals))
                      for e in self.edges)


class ConeSphericalMetric:
    """Closed (or bordered) oriented surface glued from spherical triangles."""

    def __init__(self, triangles: Sequence[SphericalTriangle],
                 gluings: Sequence[Tuple[Tuple[int, int], Tuple[int, int]]],
                 cone_points: Sequence[ConePoint] = (),
                 marked: Optional[MarkedGraph] = None,
                 cone_classes: Optional[Dict[str, Tuple[int, int]]] = None,
                 smooth_marks: Optional[Dict[str, Tuple[int, int]]] = None,
                 validate: bool = True):
        self.triangles = tuple(triangles)
        self.gluings = tuple((tuple(a), tuple(b)) for a, b in gluings)
        self.cone_points = tuple(cone_points)
        self.marked = marked
        # representative corner per labeled cone point / smooth mark
        self._cone_corner = dict(cone_classes or {})
        self.smooth_marks = dict(smooth_marks or {})
        self._build_tables()
        if validate:
            self._validate()

    # -- structure tables ---------------------------------------------------

    def _build_tables(self):
        n = len(self.triangles)
        self.glue_map: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for (a, b) in self.gluings:
            for side in (a, b):
                t, s = side
                if not (0 <= t < n and 0 <= s < 3):
                    raise GeometryError(f"gluing references missing side {side}")
                if side in self.glue_map:
                    raise GeometryError(f"side {side} glued twice")
            self.glue_map[a] = b
            self.glue_map[b] = a

        # union-find over corners; a gluing of side s1 to side s2 identifies
        # (t1, s1+1) ~ (t2, s2+2) and (t1, s1+2) ~ (t2, s2+1)
        parent: Dict[Tuple[int, int], Tuple[int, int]] = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        for t in range(n):
            for k in range(3):
                parent[(t, k)] = (t, k)
        for (t1, s1), (t2, s2) in self.gluings:
            union((t1, (s1 + 1) % 3), (t2, (s2 + 2) % 3))
            union((t1, (s1 + 2) % 3), (t2, (s2 + 1) % 3))
        self.corner_class: Dict[Tuple[int, int], Tuple[int, int]] = {
            c: find(c) for c in parent}
        self.class_angle: Dict[Tuple[int, int], float] = {}
        for (t, k), root in self.corner_class.items():
            self.class_angle[root] = self.class_angle.get(root, 0.0) + \
                self.triangles[t].angles[k]

        self.boundary_sides = tuple(
            (t, s) for t in range(n) for s in range(3)
            if (t, s) not in self.glue_map)

    @property
    def closed(self) -> bool:
        return not self.boundary_sides

    def side_length(self, t: int, s: int) -> float:
        return self.triangles[t].sides[s]

    def cone_class_of(self, label: str) -> Tuple[int, int]:
        return self.corner_class[self._cone_corner[label]]

    def total_area(self) -> float:
        return sum(t.area() for t in self.triangles)

    def gauss_bonnet_residual(self) -> float:
        """|total area - 4*pi - sum(cone angle - 2*pi)| for closed surfaces."""
        excess = sum(cp.angle - 2.0 * math.pi for cp in self.cone_points)
        return abs(self.total_area() - 4.0 * math.pi - excess)

    # -- validation -----------------------------------------------------

    def _validate(self):
        for tri in self.triangles:
            tri.validate()
        for (t1, s1), (t2, s2) in self.gluings:
            l1 = self.side_length(t1, s1)
            l2 = self.side_length(t2, s2)
            if abs(l1 - l2) > SIDE_MATCH_TOL:
                raise GeometryError(
                    f"gluing length mismatch: {l1} vs {l2} at {(t1, s1)}")
        declared = {}
        for cp in self.cone_points:
            root = self.cone_class_of(cp.label)
            if root in declared:
                raise GeometryError(f"two cone labels on one point: {cp.label}")
            declared[root] = cp
            if abs(self.class_angle[root] - cp.angle) > ANGLE_SUM_TOL:
                raise GeometryError(
                    f"cone point {cp.label}: declared angle {cp.angle} but "
                    f"corners sum to {self.class_angle[root]}")
        if self.closed:
            boundary_classes = set()
        else:
            boundary_classes = {self.corner_class[(t, (s + 1) % 3)]
                                for t, s in self.boundary_sides}
            boundary_classes |= {self.corner_class[(t, (s + 2) % 3)]
                                 for t, s in self.boundary_sides}
        for root, total in self.class_angle.items():
            if root in declared or root in boundary_classes:
                continue
            if abs(total - 2.0 * math.pi) > ANGLE_SUM_TOL:
                raise GeometryError(
                    f"undeclared singular point at {root}: angle {total}")
        if self.closed:
            V = len(set(self.corner_class.values()))
            E = len(self.gluings)
            F = len(self.triangles)
            if V - E + F != 2:
                raise GeometryError(
                    f"Euler characteristic {V - E + F} != 2")
            if self.gauss_bonnet_residual() > 1e-7:
                raise GeometryError(
                    f"area bookkeeping violates the total-curvature identity "
                    f"by {self.gauss_bonnet_residual()}")

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "triangles": [{"sides": list(t.sides), "angles": list(t.angles)}
                          for t in self.triangles],
            "gluings": [[list(a), list(b)] for a, b in self.gluings],
            "cone_points": [{"label": c.label, "kind": c.kind,
                             "angle": c.angle,
                             "corner": list(self._cone_corner[c.label])}
                            for c in self.cone_points],
        }
        if self.smooth_marks:
            out["smooth_marks"] = {k: list(v) for k, v in
                                   sorted(self.smooth_marks.items())}
        if self.marked is not None:
            out["marked_edges"] = [
                {"nodes": list(e.nodes), "length": e.length, "kind": e.kind,
                 "key": list(e.key), "side": list(e.side)}
                for e in self.marked.edges]
        return out

    @staticmethod
    def from_dict(data: dict) -> "ConeSphericalMetric":
        tris = [SphericalTriangle(tuple(t["sides"]), tuple(t["angles"]))
                for t in data["triangles"]]
        gluings = [(tuple(a), tuple(b)) for a, b in data["gluings"]]
        cones = [ConePoint(c["label"], c["kind"], c["angle"])
                 for c in data["cone_points"]]
        classes = {c["label"]: tuple(c["corner"]) for c in data["cone_points"]}
        smooth = {k: tuple(v) for k, v in data.get("smooth_marks", {}).items()}
        marked = None
        if "marked_edges" in data:
            marked = MarkedGraph(tuple(
                MarkedEdge(tuple(e["nodes"]), e["length"], e["kind"],
                           tuple(e["key"]), tuple(e["side"]))
                for e in data["marked_edges"]))
        return ConeSphericalMetric(tris, gluings, cones, marked,
                                   cone_classes=classes, smooth_marks=smooth)


# -- building blocks ----------------------------------------------------


@dataclass
class Piece:
    """A triangulated disk contributed by one primal vertex.

    ``boundary[i]`` is the (local triangle, side) realizing the i-th
    boundary arc, in fan order; the marked point before arc i belongs to
    the i-th face of the vertex fan.  ``radial_marks`` lists, per marked
    point index, a (local triangle, side) on the radial seam from the apex
    when the piece is a cap.
    """

    triangles: List[SphericalTriangle]
    gluings: List[Tuple[Tuple[int, int], Tuple[int, int]]]
    boundary: List[Tuple[int, int]]
    boundary_lengths: List[float]
    marked_corners: List[Tuple[int, int]]  # corner at marked point i
    apex_corner: Optional[Tuple[int, int]] = None
    apex_angle: float = 0.0
    radial_marks: Optional[List[Tuple[int, int]]] = None


def hemisphere_cap(apex_angle: float, partition: Sequence[float]) -> Piece:
    """Disk of doubly-right triangles: apex cone angle = sum(partition),
    boundary arcs have the partition lengths at distance pi/2 from the apex.
    """
    partition = [float(a) for a in partition]
    if not partition:
        raise GeometryError("empty partition")
    for a in partition:
        if not (0.0 < a < math.pi):
            raise GeometryError(
                "subdivide partition: arcs must lie strictly inside (0, pi)")
    total = sum(partition)
    if abs(total - apex_angle) > 1e-9:
        raise GeometryError(
            f"partition sums to {total}, apex angle is {apex_angle}")
    n = len(partition)
    tris = [SphericalTriangle.doubly_right(a) for a in partition]
    gluings = []
    for i in range(n):
        j = (i + 1) % n
        if n == 1:
            gluings.append(((0, 1), (0, 2)))
            break
        gluings.append(((i, 1), (j, 2)))
    boundary = [(i, 0) for i in range(n)]
    marked = [(i, 1) for i in range(n)]  # corner 1 of tri i: start of arc i
    radial = [(i, 2) for i in range(n)]  # side 2 of tri i: radial before arc i
    return Piece(triangles=tris, gluings=gluings, boundary=boundary,
                 boundary_lengths=partition, marked_corners=marked,
                 apex_corner=(0, 0), apex_angle=total, radial_marks=radial)


def fan_piece(sides: Sequence[float], corners: Sequence[float],
              diagonals: Sequence[float]) -> Piece:
    """Fan triangulation of a convex spherical polygon from its boundary
    data plus the diagonal lengths (vertex 0 to vertex i).

    The supplied corner angles are cross-checked against the triangle
    angle sums; a mismatch flags inconsistent polygon data (usually an
    orientation slip) before anything is glued.
    """
    k = len(sides)
    if k < 3 or len(corners) != k or len(diagonals) != k - 3 + 2:
        raise GeometryError("inconsistent polygon data")
    # diagonals[i] = distance from vertex 0 to vertex i+1, i = 0..k-2;
    # diagonals[0] = sides[0], diagonals[k-2] = sides[k-1]
    tris = []
    for i in range(1, k - 1):
        tris.append(SphericalTriangle.from_sides(
            sides[i], diagonals[i], diagonals[i - 1]))
    gluings = [((i - 1, 1), (i, 2)) for i in range(1, k - 2)]

    corner_sums = [0.0] * k
    corner_sums[0] = sum(t.angles[0] for t in tris)
    corner_sums[1] = tris[0].angles[1]
    corner_sums[k - 1] = tris[k - 3].angles[2]
    for j in range(2, k - 1):
        corner_sums[j] = tris[j - 1].angles[1] + tris[j - 2].angles[2]
    for j in range(k):
        if abs(corner_sums[j] - corners[j]) > 1e-8:
            raise GeometryError(
                f"polygon corner {j}: declared {corners[j]}, triangulation "
                f"gives {corner_sums[j]}")
    boundary = []
    for j in range(k):
        if j == 0:
            boundary.append((0, 2))
        elif j == k - 1:
            boundary.append((k - 3, 1))
        else:
            boundary.append((j - 1, 0))
    marked = []
    for j in range(k):
        if j == 0:
            marked.append((0, 0))
        else:
            marked.append((j - 1, 1) if j <= k - 2 else (k - 3, 2))
    lengths = [tris[0].sides[2]] + [tris[j - 1].sides[0] for j in range(1, k - 1)] \
        + [tris[k - 3].sides[1]]
    return Piece(triangles=tris, gluings=gluings, boundary=boundary,
                 boundary_lengths=lengths, marked_corners=marked)


def piece_to_metric(piece: Piece, apex_label: str = "apex") -> ConeSphericalMetric:
    """A standalone bordered surface from one piece (used for tracing on a
    single cap)."""
    cones = []
    classes = {}
    if piece.apex_corner is not None and piece.apex_angle > 0:
        cones.append(ConePoint(apex_label, "h", piece.apex_angle))
        classes[apex_label] = piece.apex_corner
    return ConeSphericalMetric(piece.triangles, piece.gluings, cones,
                               cone_classes=classes)


def assemble_complex(comb, pieces: Dict[int, Piece],
                     face_labels: Dict[int, str],
                     face_kinds: Dict[int, str],
                     apex_labels: Optional[Dict[int, str]] = None) -> ConeSphericalMetric:
    """Glue one piece per primal vertex along the primal edges.

    Boundary arc i of the piece at v crosses the edge between v and the
    i-th fan neighbor; the matching arc on the neighbor piece is glued
    orientation-reversing.  Cone points are labeled per face, plus one per
    strict cap apex.
    """
    apex_labels = apex_labels or {}
    offset: Dict[int, int] = {}
    tris: List[SphericalTriangle] = []
    gluings: List[Tuple[Tuple[int, int], Tuple[int, int]]] = []
    for v in sorted(pieces):
        offset[v] = len(tris)
        piece = pieces[v]
        tris.extend(piece.triangles)
        for (a, b) in piece.gluings:
            gluings.append(((a[0] + offset[v], a[1]),
                            (b[0] + offset[v], b[1])))

    fans = {v: comb.vertex_fan(v) for v in pieces}

    def fan_position(v: int, w: int) -> int:
        for i, (_, nxt) in enumerate(fans[v]):
            if nxt == w:
                return i
        raise GeometryError(f"edge {v}-{w} absent from the fan of {v}")

    marked_edges: List[MarkedEdge] = []
    done = set()
    for e in comb.edges():
        u, v = e.vertices
        iu = fan_position(u, v)
        iv = fan_position(v, u)
        pu, pv = pieces[u], pieces[v]
        lu = pu.boundary_lengths[iu]
        lv = pv.boundary_lengths[iv]
        if abs(lu - lv) > SIDE_MATCH_TOL:
            raise GeometryError(
                f"gluing length mismatch across edge {e.vertices}: {lu} vs {lv}")
        su = (pu.boundary[iu][0] + offset[u], pu.boundary[iu][1])
        sv = (pv.boundary[iv][0] + offset[v], pv.boundary[iv][1])
        gluings.append((su, sv))
        key = ("seam",) + tuple(e.vertices)
        if key not in done:
            done.add(key)
            fa, fb = e.faces
            marked_edges.append(MarkedEdge(
                (face_labels[fa], face_labels[fb]), lu, "seam",
                key, su))

    # cone points: one per face, plus strict cap apexes
    cones: List[ConePoint] = []
    classes: Dict[str, Tuple[int, int]] = {}
    smooth: Dict[str, Tuple[int, int]] = {}

    probe = ConeSphericalMetric(tris, gluings, validate=False)
    for f in range(comb.num_faces):
        # find a marked corner on this face from any incident vertex
        label = face_labels[f]
        corner = None
        for v, fan in fans.items():
            for i, (ff, _) in enumerate(fan):
                if ff == f:
                    lt, lk = pieces[v].marked_corners[i]
                    corner = (lt + offset[v], lk)
                    break
            if corner is not None:
                break
        if corner is None:
            raise GeometryError(f"face {f} has no incident piece")
        angle = probe.class_angle[probe.corner_class[corner]]
        cones.append(ConePoint(label, face_kinds[f], angle))
        classes[label] = corner

    for v in sorted(pieces):
        piece = pieces[v]
        if piece.apex_corner is None:
            continue
        corner = (piece.apex_corner[0] + offset[v], piece.apex_corner[1])
        angle = probe.class_angle[probe.corner_class[corner]]
        label = apex_labels.get(v, f"h:{v}")
        if abs(angle - 2.0 * math.pi) <= ANGLE_SUM_TOL:
            smooth[label] = corner
        else:
            cones.append(ConePoint(label, "h", angle))
            classes[label] = corner
            if piece.radial_marks is not None:
                for i, (lt, ls) in enumerate(piece.radial_marks):
                    face = fans[v][i][0]
                    marked_edges.append(MarkedEdge(
                        (label, face_labels[face]),
                        piece.triangles[lt].sides[ls], "radial",
                        ("radial", v, face), (lt + offset[v], ls)))

    marked = MarkedGraph(tuple(marked_edges))
    return ConeSphericalMetric(tris, gluings, cones, marked,
                               cone_classes=classes, smooth_marks=smooth)


def build_cap_complex(g, check_sums: bool = True) -> ConeSphericalMetric:
    """One (possibly singular) hemisphere cap per primal vertex, boundaries
    glued along the primal edges with the given exterior-angle weights.

    Preconditions on the weights: strictly above 2*pi around hyperideal
    vertices, exactly 2*pi around ideal ones.  ``check_sums=False`` skips
    the check so admissibility counterexamples can still be built and
    searched.
    """
    comb = g.combinatorics
    kinds = g.effective_kinds()
    pieces: Dict[int, Piece] = {}
    for v in comb.vertex_ids:
        fan = comb.vertex_fan(v)
        partition = []
        for i, (_, w) in enumerate(fan):
            partition.append(g.weights[tuple(sorted((v, w)))])
        total = sum(partition)
        if check_sums:
            if kinds.get(v) == "ideal":
                if abs(total - 2.0 * math.pi) > 1e-8:
                    raise GeometryError(
                        f"vertex {v} declared ideal but weights sum to {total}")
            else:
                if total <= 2.0 * math.pi:
                    raise GeometryError(
                        f"vertex {v}: weights sum to {total}, need more than "
                        f"2*pi around a hyperideal vertex")
        pieces[v] = hemisphere_cap(total, partition)
    face_labels = {f: f"f:{f}" for f in range(comb.num_faces)}
    face_kinds = {f: "f" for f in range(comb.num_faces)}
    apex_labels = {v: f"h:{v}" for v in comb.vertex_ids}
    return assemble_complex(comb, pieces, face_labels, face_kinds, apex_labels)


def metric_to_lengths(m: ConeSphericalMetric) -> Dict[Tuple[int, int], float]:
    """Seam lengths keyed by primal edge, read off the marked graph."""
    if m.marked is None:
        raise GeometryError("unmarked metric: no seam graph to read")
    out = {}
    for e in m.marked.edges:
        if e.kind == "seam":
            out[(e.key[1], e.key[2])] = e.length
    return out


def length_vector(m: ConeSphericalMetric) -> Tuple[float, ...]:
    """Seam lengths in canonical (sorted vertex pair) edge order."""
    d = metric_to_lengths(m)
    return tuple(d[k] for k in sorted(d))


# -- geodesics ----------------------------------------------------------------

from hyperpoly.tracing import (  # noqa: E402  (import placed after the type
    KERNEL_BACKEND,              # definitions the tracer operates on)
    CycleWitness,
    FalsifierResult,
    GeodesicPath,
    find_short_closed_geodesic,
    geodesic_trace,
    path_self_intersects,
    saddle_connections,
    trace_from_corner,
)
from hyperpoly import tracing as _tracing


@dataclass(frozen=True)
class RecoveredEdge:
    nodes: Tuple[str, str]
    length: float
    kind: str  # "seam" | "radial"


@dataclass(frozen=True)
class RecoveredGraph:
    edges: Tuple[RecoveredEdge, ...]

    def seam_multiset(self, decimals: int = 7):
        return sorted((tuple(sorted(e.nodes)), round(e.length, decimals))
                      for e in self.edges if e.kind == "seam")

    def full_multiset(self, decimals: int = 7):
        return sorted((tuple(sorted(e.nodes)), round(e.length, decimals))
                      for e in self.edges)


def recover_combinatorics(metric: ConeSphericalMetric,
                          depth: int = 8) -> RecoveredGraph:
    """Re-read the seam graph from the bare geometry.

    Seeds with every cone-to-cone geodesic shorter than pi (in a glued-cap
    complex these are exactly the seams and the apex radials), then extends
    through the boundary cone points at direction offsets that are
    multiples of pi until no new segment appears.  Raises when the metric
    does not behave like a glued-cap complex.
    """
    tables = _tracing.tables_for(metric)
    fans = _tracing.fans_for(metric)
    kind_of = {cp.label: cp.kind for cp in metric.cone_points}

    segs: List[Tuple[int, float, int, float, float]] = []
    dirs_at: Dict[int, List[float]] = {}
    queue: List[Tuple[int, float]] = []

    def dir_close(cls: int, a: float, b: float, tol: float = 1e-6) -> bool:
        total = tables.class_angle[cls]
        return abs((a - b + total / 2.0) % total - total / 2.0) < tol

    def known_direction(cls: int, d: float) -> bool:
        return any(dir_close(cls, d, e, 1e-7) for e in dirs_at.get(cls, ()))

    def add_segment(src: int, dsrc: float, dst: int, ddst: float,
                    length: float) -> None:
        for (s0, d0, s1, d1, l0) in segs:
            if abs(l0 - length) > 1e-9:
                continue
            if (s0 == src and s1 == dst and dir_close(src, d0, dsrc)
                    and dir_close(dst, d1, ddst)):
                return
            if (s0 == dst and s1 == src and dir_close(dst, d0, ddst)
                    and dir_close(src, d1, dsrc)):
                return
        segs.append((src, dsrc, dst, ddst, length))
        for cls, d in ((src, dsrc), (dst, ddst)):
            dirs_at.setdefault(cls, []).append(d)
            queue.append((cls, d))

    raw = saddle_connections(metric, depth=depth,
                             length_bound=math.pi - 1e-9)
    for c in _tracing.verified_connections(metric, raw):
        if not c.flexible:
            add_segment(c.src, c.dir_src, c.dst, c.dir_dst, c.length)
    if not segs:
        raise GeometryError(
            "not a glued-cap metric: no short cone-to-cone geodesics")

    while queue:
        cls, d = queue.pop()
        label = tables.class_label[cls]
        if kind_of.get(label) != "f":
            continue
        total = tables.class_angle[cls]
        m = int(round(total / math.pi))
        if abs(total - m * math.pi) > 1e-6:
            raise GeometryError(
                f"not a glued-cap metric: cone angle {total} at {label} is "
                "not a multiple of pi")
        for k in range(1, m):
            nd = (d + k * math.pi) % total
            if known_direction(cls, nd):
                continue
            corner, beta = fans.corner_for_direction(cls, nd)
            path = trace_from_corner(metric, corner, beta,
                                     max_length=math.pi + 1e-6)
            if path.termination != "cone_point":
                raise GeometryError(
                    "not a glued-cap metric: a seam extension escaped "
                    f"({path.termination})")
            arr = _tracing._arrival_direction(tables, fans, path)
            if arr is None:
                raise GeometryError("not a glued-cap metric: lost arrival")
            add_segment(cls, nd, path.end_class, arr, path.total_length)

    f_labels = {cp.label for cp in metric.cone_points if cp.kind == "f"}
    named = [(tables.class_label[s0], tables.class_label[s1], l)
             for (s0, _, s1, _, l) in segs]
    touched = {la for la, _, _ in named} | {lb for _, lb, _ in named}
    if not f_labels <= touched:
        raise GeometryError(
            f"not a glued-cap metric: missed cone points {f_labels - touched}")

    edges = []
    for la, lb, length in named:
        kind = "seam" if (la in f_labels and lb in f_labels) else "radial"
        edges.append(RecoveredEdge((la, lb), length, kind))
    edges.sort(key=lambda e: (sorted(e.nodes), e.length))
    graph = RecoveredGraph(tuple(edges))

    # the seam part of the recovered graph must be connected over f-points
    parent = {l: l for l in f_labels}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in graph.edges:
        if e.kind == "seam":
            ra, rb = find(e.nodes[0]), find(e.nodes[1])
            if ra != rb:
                parent[ra] = rb
    roots = {find(l) for l in f_labels}
    if len(roots) > 1:
        raise GeometryError("not a glued-cap metric: seam graph disconnected")
    return graph
