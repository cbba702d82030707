"""Convex projective polyhedra in the Minkowski model.

A polyhedron is built from oriented face planes by brute-force triple
intersection (O(n^3), intended for desk-scale inputs).  Vertices are kept
as projective representatives normalized per causal class; combinatorics
is stored as consistently oriented face cycles from which vertex fans and
the dual (transposed) combinatorics are derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from hyperpoly.minkowski import (
    CausalClass,
    GeometryError,
    HPlane,
    MVector,
    classify,
    inner,
)

VERTEX_DEDUPE_TOL = 1e-7
INCIDENCE_TOL = 1e-8
EDGE_SIGNATURE_TOL = 1e-10


@dataclass(frozen=True)
class Edge:
    """Edge between two faces, carrying its two endpoint vertex ids."""

    faces: Tuple[int, int]
    vertices: Tuple[int, int]


@dataclass(frozen=True)
class Combinatorics:
    """Cell decomposition of a polyhedral sphere.

    ``face_cycles[f]`` lists vertex ids around face ``f``; orientations are
    consistent (each undirected edge is traversed once in each direction).
    """

    face_cycles: Tuple[Tuple[int, ...], ...]

    @property
    def num_faces(self) -> int:
        return len(self.face_cycles)

    @property
    def vertex_ids(self) -> Tuple[int, ...]:
        out = set()
        for cyc in self.face_cycles:
            out.update(cyc)
        return tuple(sorted(out))

    def edges(self) -> Tuple[Edge, ...]:
        """Edges in canonical order, sorted by vertex id pair."""
        directed: Dict[Tuple[int, int], int] = {}
        for f, cyc in enumerate(self.face_cycles):
            k = len(cyc)
            for i in range(k):
                directed[(cyc[i], cyc[(i + 1) % k])] = f
        out = []
        seen = set()
        for (u, v), f in directed.items():
            if (v, u) not in directed:
                raise GeometryError(f"edge {u}-{v} traversed only once")
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            g = directed[(v, u)]
            if f == g:
                raise GeometryError(f"edge {u}-{v} bounds a single face")
            out.append(Edge(faces=(directed[key], directed[(key[1], key[0])]),
                            vertices=key))
        return tuple(sorted(out, key=lambda e: e.vertices))

    def validate(self) -> None:
        edges = self.edges()
        V = len(self.vertex_ids)
        E = len(edges)
        F = self.num_faces
        if V - E + F != 2:
            raise GeometryError(f"Euler characteristic {V - E + F} != 2")
        for cyc in self.face_cycles:
            if len(cyc) < 3 or len(set(cyc)) != len(cyc):
                raise GeometryError(f"face cycle {cyc} is not simple")

    def vertex_fan(self, v: int) -> Tuple[Tuple[int, int], ...]:
        """Cyclic (face, next-vertex) pairs around vertex v.

        Entry (f, w) means: within face f the cycle runs ... v -> w ...;
        the next entry's face shares the edge {v, w} with f.
        """
        succ: Dict[int, Tuple[int, int]] = {}
        by_in: Dict[int, Tuple[int, int]] = {}
        for f, cyc in enumerate(self.face_cycles):
            k = len(cyc)
            for i in range(k):
                if cyc[i] == v:
                    succ[f] = (f, cyc[(i + 1) % k])
                    by_in[cyc[(i - 1) % k]] = (f, cyc[(i + 1) % k])
        if not succ:
            raise GeometryError(f"vertex {v} not in combinatorics")
        f0, w0 = min(succ.values())
        fan = [(f0, w0)]
        while True:
            f, w = fan[-1]
            nxt = by_in.get(w)
            if nxt is None:
                raise GeometryError(f"broken fan at vertex {v}")
            if nxt == fan[0]:
                break
            fan.append(nxt)
            if len(fan) > len(succ):
                raise GeometryError(f"fan at vertex {v} does not close")
        return tuple(fan)

    def transpose(self) -> "Combinatorics":
        """Dual combinatorics: faces become vertices and vice versa."""
        vids = self.vertex_ids
        cycles = []
        for v in vids:
            fan = self.vertex_fan(v)
            cycles.append(tuple(f for f, _ in fan))
        return Combinatorics(tuple(cycles))

    @staticmethod
    def from_cycles(cycles: Sequence[Sequence[int]]) -> "Combinatorics":
        """Build from unoriented cycles, making orientations consistent."""
        cycles = [tuple(c) for c in cycles]
        oriented: List[Tuple[int, ...] | None] = [None] * len(cycles)
        edge_faces: Dict[Tuple[int, int], List[int]] = {}
        for f, cyc in enumerate(cycles):
            k = len(cyc)
            for i in range(k):
                key = tuple(sorted((cyc[i], cyc[(i + 1) % k])))
                edge_faces.setdefault(key, []).append(f)
        for key, fs in edge_faces.items():
            if len(fs) != 2:
                raise GeometryError(f"edge {key} lies in {len(fs)} faces")
        oriented[0] = cycles[0]
        stack = [0]
        while stack:
            f = stack.pop()
            cyc = oriented[f]
            k = len(cyc)
            for i in range(k):
                u, v = cyc[i], cyc[(i + 1) % k]
                key = (min(u, v), max(u, v))
                g = next(x for x in edge_faces[key] if x != f)
                gc = cycles[g]
                if oriented[g] is not None:
                    continue
                # g must traverse v -> u; flip if it traverses u -> v
                kg = len(gc)
                forward = any(gc[j] == u and gc[(j + 1) % kg] == v
                              for j in range(kg))
                oriented[g] = tuple(reversed(gc)) if forward else gc
                stack.append(g)
        if any(c is None for c in oriented):
            raise GeometryError("face adjacency graph is not connected")
        out = Combinatorics(tuple(oriented))
        out.validate()
        return out

    @staticmethod
    def tetrahedron() -> "Combinatorics":
        return Combinatorics.from_cycles(
            [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])

    @staticmethod
    def cube() -> "Combinatorics":
        # vertex v = x + 2y + 4z over {0,1}^3
        return Combinatorics.from_cycles([
            (0, 1, 3, 2), (4, 6, 7, 5),
            (0, 4, 5, 1), (2, 3, 7, 6),
            (0, 2, 6, 4), (1, 5, 7, 3)])

    @staticmethod
    def octahedron() -> "Combinatorics":
        return Combinatorics.cube().transpose()

    @staticmethod
    def icosahedron() -> "Combinatorics":
        return Combinatorics.from_cycles([
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)])

    @staticmethod
    def dodecahedron() -> "Combinatorics":
        return Combinatorics.icosahedron().transpose()


VertexClass = str  # "finite" | "ideal" | "hyperideal"


@dataclass(frozen=True)
class ProjectivePolyhedron:
    planes: Tuple[HPlane, ...]
    combinatorics: Combinatorics
    vertex_coords: Dict[int, MVector] = field(compare=False)
    vertex_class: Dict[int, VertexClass] = field(compare=False)

    def edges(self) -> Tuple[Edge, ...]:
        return self.combinatorics.edges()

    def edge_between(self, f: int, g: int) -> Edge:
        for e in self.edges():
            if set(e.faces) == {f, g}:
                return e
        raise GeometryError(f"no edge between faces {f} and {g}")

    def interior_point(self) -> MVector:
        acc = np.zeros(4)
        for v in self.vertex_coords.values():
            a = v.array()
            acc += a / np.linalg.norm(a)
        return MVector.from_array(acc)


def _cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector Euclidean-orthogonal to a, b, c in R^4 (Levi-Civita cofactors)."""
    m = np.stack([a, b, c])
    out = np.empty(4)
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[i] = ((-1.0) ** i) * np.linalg.det(m[:, cols])
    return out


def _normalize_candidate(v: np.ndarray) -> Tuple[MVector, VertexClass]:
    mv = MVector.from_array(v)
    cls = classify(mv)
    if cls is CausalClass.TIMELIKE:
        rep = mv / math.sqrt(-inner(mv, mv))
        return rep, "finite"
    if cls is CausalClass.SPACELIKE:
        rep = mv / math.sqrt(inner(mv, mv))
        return rep, "hyperideal"
    if abs(mv.x0) < 1e-30:
        raise GeometryError("degenerate lightlike candidate")
    return mv / mv.x0, "ideal"


def from_planes(planes: Sequence[HPlane]) -> ProjectivePolyhedron:
    """Intersect half-spaces {<x, n_f> >= 0} into a projective polyhedron.

    Enumerates all plane triples, solves for candidate vertices, keeps the
    ones satisfying every constraint, dedupes projectively, then assembles
    incidences, oriented face cycles and causal vertex classes.
    """
    if len(planes) < 4:
        raise GeometryError("need at least 4 planes")
    normals = [p.n for p in planes]
    jn = [np.array([-n.x0, n.x1, n.x2, n.x3]) for n in normals]
    n = len(planes)

    reps: List[MVector] = []
    classes: List[VertexClass] = []
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                w = _cross4(jn[a], jn[b], jn[c])
                scale = np.max(np.abs(w))
                if scale < 1e-12:
                    continue  # triple shares a pencil, no isolated point
                w = w / scale
                try:
                    rep, cls = _normalize_candidate(w)
                except GeometryError:
                    continue
                ok_plus = all(inner(rep, m) >= -INCIDENCE_TOL for m in normals)
                neg = -rep
                ok_minus = all(inner(neg, m) >= -INCIDENCE_TOL for m in normals)
                if ok_plus and ok_minus:
                    raise GeometryError("non-polyhedral: constraint cone contains a line")
                if cls == "finite":
                    # upper sheet only; the mirrored representative is the
                    # valid one when the raw cross product points down
                    if ok_plus and rep.x0 <= 0.0:
                        ok_plus = False
                    if ok_minus and neg.x0 <= 0.0:
                        ok_minus = False
                if cls == "ideal":
                    if ok_plus and rep.x0 <= 0.0:
                        ok_plus = False
                    if ok_minus and neg.x0 <= 0.0:
                        ok_minus = False
                if ok_plus:
                    reps.append(rep)
                    classes.append(cls)
                elif ok_minus:
                    reps.append(neg if cls != "ideal" else neg / neg.x0)
                    classes.append(cls)

    if not reps:
        raise GeometryError("non-polyhedral: no vertices found")

    # projective dedupe on euclidean-normalized representatives
    uniq: List[MVector] = []
    uniq_cls: List[VertexClass] = []
    for rep, cls in zip(reps, classes):
        a = rep.array()
        a = a / np.linalg.norm(a)
        dup = False
        for u in uniq:
            b = u.array()
            b = b / np.linalg.norm(b)
            if np.linalg.norm(a - b) < VERTEX_DEDUPE_TOL:
                dup = True
                break
        if not dup:
            uniq.append(rep)
            uniq_cls.append(cls)

    order = sorted(range(len(uniq)),
                   key=lambda i: tuple(np.round(uniq[i].array(), 9)))
    verts = [uniq[i] for i in order]
    vclasses = [uniq_cls[i] for i in order]

    incident: List[List[int]] = []
    for v in verts:
        faces = [f for f, m in enumerate(normals)
                 if abs(inner(v, m)) <= INCIDENCE_TOL * max(1.0, v.scale())]
        if len(faces) < 3:
            raise GeometryError("non-polyhedral: vertex with fewer than 3 faces")
        incident.append(faces)

    face_verts: List[List[int]] = [[] for _ in range(n)]
    for vid, faces in enumerate(incident):
        for f in faces:
            face_verts[f].append(vid)
    for f, fv in enumerate(face_verts):
        if len(fv) < 3:
            raise GeometryError(f"redundant plane: face {f} supports no polygon")

    # edges from face pairs sharing exactly two vertices
    raw_edges: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for f in range(n):
        for g in range(f + 1, n):
            shared = sorted(set(face_verts[f]) & set(face_verts[g]))
            if len(shared) > 2:
                raise GeometryError(
                    f"coincident or tangent planes: faces {f},{g} share "
                    f"{len(shared)} vertices")
            if len(shared) == 2:
                raw_edges[(f, g)] = (shared[0], shared[1])

    # walk face cycles through shared edges
    cycles: List[Tuple[int, ...]] = []
    for f in range(n):
        adj: Dict[int, List[int]] = {v: [] for v in face_verts[f]}
        for (a, b), (u, v) in raw_edges.items():
            if f in (a, b):
                adj[u].append(v)
                adj[v].append(u)
        for v, nb in adj.items():
            if len(nb) != 2:
                raise GeometryError(
                    f"non-polyhedral: face {f} is not a simple cycle at vertex {v}")
        start = min(adj)
        cyc = [start, adj[start][0]]
        while True:
            prev, cur = cyc[-2], cyc[-1]
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            if nxt == start:
                break
            cyc.append(nxt)
            if len(cyc) > len(adj):
                raise GeometryError(f"face {f} cycle does not close")
        if len(cyc) != len(adj):
            raise GeometryError(f"face {f} is not a single simple cycle")
        cycles.append(tuple(cyc))

    comb = Combinatorics.from_cycles(cycles)
    coords = {vid: verts[vid] for vid in range(len(verts))}
    vclass = {vid: vclasses[vid] for vid in range(len(verts))}

    # fix the global orientation geometrically: around each vertex the fan
    # must wind positively with respect to the interior
    interior = np.zeros(4)
    for v in coords.values():
        a = v.array()
        interior += a / np.linalg.norm(a)
    c = MVector.from_array(interior)
    for m in normals:
        if inner(c, m) <= 0.0:
            raise GeometryError("non-polyhedral: no interior point")
    f0 = comb.face_cycles[0]
    u, v = coords[f0[0]], coords[f0[1]]
    n0 = normals[0]
    det = np.linalg.det(np.stack([u.array(), v.array(), n0.array(), c.array()]))
    if det < 0.0:
        comb = Combinatorics(tuple(tuple(reversed(cyc)) for cyc in comb.face_cycles))

    poly = ProjectivePolyhedron(tuple(planes), comb, coords, vclass)
    _check_edges_meet_h3(poly)
    return poly


def _check_edges_meet_h3(poly: ProjectivePolyhedron) -> None:
    for e in poly.edges():
        u = poly.vertex_coords[e.vertices[0]]
        v = poly.vertex_coords[e.vertices[1]]
        g11, g22, g12 = inner(u, u), inner(v, v), inner(u, v)
        det = g11 * g22 - g12 * g12
        if det >= -EDGE_SIGNATURE_TOL:
            raise GeometryError(
                f"edge misses H3: vertices {e.vertices} span a plane of "
                f"signature with Gram determinant {det}")


def dihedral_angle(poly: ProjectivePolyhedron, edge: Edge) -> float:
    """Interior dihedral angle arccos(-<n_a, n_b>) along an edge."""
    na = poly.planes[edge.faces[0]].n
    nb = poly.planes[edge.faces[1]].n
    c = inner(na, nb)
    if abs(c) > 1.0 + 1e-9:
        raise GeometryError("faces do not meet along a hyperbolic edge")
    return math.acos(max(-1.0, min(1.0, -c)))


def exterior_angle(poly: ProjectivePolyhedron, edge: Edge) -> float:
    return math.pi - dihedral_angle(poly, edge)


def corner_angle(poly: ProjectivePolyhedron, face: int, v: int) -> float:
    """Interior angle of the face polygon at vertex v (0 at ideal corners)."""
    if poly.vertex_class[v] == "hyperideal":
        raise GeometryError("truncate first: face touches a hyperideal vertex")
    if poly.vertex_class[v] == "ideal":
        return 0.0
    cyc = poly.combinatorics.face_cycles[face]
    k = len(cyc)
    i = cyc.index(v)
    u = poly.vertex_coords[cyc[(i - 1) % k]]
    w = poly.vertex_coords[cyc[(i + 1) % k]]
    p = poly.vertex_coords[v]
    tu = u + inner(u, p) * p
    tw = w + inner(w, p) * p
    num = inner(tu, tw)
    den = math.sqrt(inner(tu, tu) * inner(tw, tw))
    return math.acos(max(-1.0, min(1.0, num / den)))


def face_area(poly: ProjectivePolyhedron, face: int) -> float:
    """Hyperbolic polygon area by angle defect, (k-2)pi - sum of corners."""
    cyc = poly.combinatorics.face_cycles[face]
    total = 0.0
    for v in cyc:
        total += corner_angle(poly, face, v)
    return (len(cyc) - 2) * math.pi - total


@dataclass
class ValidationReport:
    passed: bool
    failures: List[Tuple[str, str]]

    def add(self, code: str, detail: str):
        self.passed = False
        self.failures.append((code, detail))


def validate(poly: ProjectivePolyhedron) -> ValidationReport:
    """Re-check every structural invariant, collecting failures."""
    report = ValidationReport(passed=True, failures=[])
    comb = poly.combinatorics
    try:
        comb.validate()
    except GeometryError as exc:
        report.add("combinatorics", str(exc))
    try:
        edges = comb.edges()
    except GeometryError as exc:
        report.add("edges", str(exc))
        return report

    for vid, v in poly.vertex_coords.items():
        cls = poly.vertex_class[vid]
        fresh = {CausalClass.TIMELIKE: "finite", CausalClass.SPACELIKE:
                 "hyperideal", CausalClass.LIGHTLIKE: "ideal"}[classify(v)]
        if fresh != cls:
            report.add("classification",
                       f"vertex {vid} stored as {cls} but classifies as {fresh}")

    for f, cyc in enumerate(comb.face_cycles):
        m = poly.planes[f].n
        for v in cyc:
            val = inner(poly.vertex_coords[v], m)
            if abs(val) > INCIDENCE_TOL * max(1.0, poly.vertex_coords[v].scale()):
                report.add("incidence",
                           f"vertex {v} off its face plane {f}: <v,n> = {val}")

    for vid, v in poly.vertex_coords.items():
        for f, pl in enumerate(poly.planes):
            val = inner(v, pl.n)
            if val < -INCIDENCE_TOL * max(1.0, v.scale()):
                report.add("convexity",
                           f"vertex {vid} violates half-space of plane {f}: {val}")

    for e in edges:
        u = poly.vertex_coords[e.vertices[0]]
        v = poly.vertex_coords[e.vertices[1]]
        det = inner(u, u) * inner(v, v) - inner(u, v) ** 2
        if det >= -EDGE_SIGNATURE_TOL:
            report.add("edge_misses_h3", f"edge {e.vertices}: Gram det {det}")
    return report
