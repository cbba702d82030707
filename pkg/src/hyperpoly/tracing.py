"""Geodesic tracing, saddle connections and the closed-geodesic search.

The per-crossing development step runs in a compiled kernel when the
extension built from ``_trace_cy.pyx`` is available, otherwise in the
pure-Python twin ``_trace_py``; both implement the same step loop and the
selection happens at import time.  Everything above the step loop
(connection enumeration, cycle concatenation, verification, shooting)
is ordinary Python.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperpoly.minkowski import GeometryError
from hyperpoly import _trace_py

try:
    from hyperpoly import _trace_cy  # type: ignore

    _kernel = _trace_cy.run_trace
    KERNEL_BACKEND = "compiled"
except ImportError:
    _kernel = _trace_py.run_trace
    KERNEL_BACKEND = "python"

CONE_TOL = 1e-9
CLOSURE_POS_TOL = 1e-7
CLOSURE_ANG_TOL = 1e-7
JUNCTION_TOL = 1e-9

T_MAXLEN = _trace_py.T_MAXLEN
T_CONE = _trace_py.T_CONE
T_CLOSED = _trace_py.T_CLOSED
T_BOUNDARY = _trace_py.T_BOUNDARY
T_SMOOTH = _trace_py.T_SMOOTH
T_CAP = _trace_py.T_CAP

_TERMINATION_NAMES = {
    T_MAXLEN: "max_length",
    T_CONE: "cone_point",
    T_CLOSED: "closed",
    T_BOUNDARY: "boundary",
    T_SMOOTH: "smooth_vertex",
    T_CAP: "crossing_cap",
}


class TraceTables:
    """Flat tables of a complex, in both python and array flavors."""

    def __init__(self, metric):
        self.metric = metric
        n = len(metric.triangles)
        self.sides = tuple(t.sides for t in metric.triangles)
        self.angles = tuple(t.angles for t in metric.triangles)
        glue_tri = [[-1, -1, -1] for _ in range(n)]
        glue_side = [[-1, -1, -1] for _ in range(n)]
        for (t1, s1), (t2, s2) in metric.gluings:
            glue_tri[t1][s1] = t2
            glue_side[t1][s1] = s2
            glue_tri[t2][s2] = t1
            glue_side[t2][s2] = s1
        self.glue_tri = tuple(tuple(r) for r in glue_tri)
        self.glue_side = tuple(tuple(r) for r in glue_side)

        roots = sorted(set(metric.corner_class.values()))
        self.class_index = {root: i for i, root in enumerate(roots)}
        self.class_roots = roots
        corner_class = [[0, 0, 0] for _ in range(n)]
        for (t, k), root in metric.corner_class.items():
            corner_class[t][k] = self.class_index[root]
        self.corner_class = tuple(tuple(r) for r in corner_class)

        label_of_root = {}
        for cp in metric.cone_points:
            label_of_root[metric.cone_class_of(cp.label)] = (cp.label, 1)
        for label, corner in metric.smooth_marks.items():
            label_of_root[metric.corner_class[corner]] = (label, 2)
        kinds = []
        labels = []
        for root in roots:
            label, kind = label_of_root.get(root, (None, 0))
            kinds.append(kind if kind == 1 else 0)
            labels.append(label)
        self.class_kind = tuple(kinds)
        self.class_label = tuple(labels)
        self.class_angle = tuple(metric.class_angle[root] for root in roots)

        # array flavor for the compiled kernel
        self.sides_arr = np.array(self.sides, dtype=np.float64)
        self.angles_arr = np.array(self.angles, dtype=np.float64)
        self.glue_tri_arr = np.array(self.glue_tri, dtype=np.int32)
        self.glue_side_arr = np.array(self.glue_side, dtype=np.int32)
        self.corner_class_arr = np.array(self.corner_class, dtype=np.int32)
        self.class_kind_arr = np.array(self.class_kind, dtype=np.int32)

    def label_class(self, label: str) -> int:
        root = self.metric.cone_class_of(label)
        return self.class_index[root]


def tables_for(metric) -> TraceTables:
    cached = getattr(metric, "_trace_tables", None)
    if cached is None:
        cached = TraceTables(metric)
        metric._trace_tables = cached
    return cached


@dataclass(frozen=True)
class Segment:
    triangle: int
    entry_side: int
    entry_pos: float
    exit_side: int
    exit_pos: float
    length: float


@dataclass(frozen=True)
class GeodesicPath:
    """One traced geodesic: triangle passages plus termination data."""

    segments: Tuple[Segment, ...]
    total_length: float
    termination: str
    end_label: Optional[str] = None
    end_class: int = -1
    end_corner: Tuple[int, int] = (-1, -1)
    end_wedge_angle: float = float("nan")
    start: Tuple = ()


def _run(tables: TraceTables, start_mode, start_tri, start_index, start_pos,
         start_angle, max_length, max_crossings, record_path):
    if KERNEL_BACKEND == "compiled":
        return _kernel(tables.sides_arr, tables.angles_arr,
                       tables.glue_tri_arr, tables.glue_side_arr,
                       tables.corner_class_arr, tables.class_kind_arr,
                       start_mode, start_tri, start_index, start_pos,
                       start_angle, max_length, max_crossings, CONE_TOL,
                       CLOSURE_POS_TOL, CLOSURE_ANG_TOL, record_path)
    return _kernel(tables.sides, tables.angles, tables.glue_tri,
                   tables.glue_side, tables.corner_class, tables.class_kind,
                   start_mode, start_tri, start_index, start_pos, start_angle,
                   max_length, max_crossings, CONE_TOL, CLOSURE_POS_TOL,
                   CLOSURE_ANG_TOL, record_path)


def _to_path(tables: TraceTables, result, start) -> GeodesicPath:
    code, total, t_end, idx_end, segments, beta = result
    end_label = None
    end_class = -1
    end_corner = (-1, -1)
    if code in (T_CONE, T_SMOOTH):
        end_class = tables.corner_class[t_end][idx_end]
        end_label = tables.class_label[end_class]
        end_corner = (t_end, idx_end)
    return GeodesicPath(
        segments=tuple(Segment(*s) for s in segments),
        total_length=total,
        termination=_TERMINATION_NAMES[code],
        end_label=end_label,
        end_class=end_class,
        end_corner=end_corner,
        end_wedge_angle=beta,
        start=start,
    )


def geodesic_trace(metric, start: Tuple[int, int, float], direction: float,
                   max_length: float, max_crossings: int = 4096,
                   record_path: bool = True) -> GeodesicPath:
    """Trace from a point on a side: start = (triangle, side, arc position),
    direction measured from the side's forward tangent into the triangle."""
    t, s, pos = start
    tables = tables_for(metric)
    L = tables.sides[t][s]
    if not (0.0 < pos < L):
        raise GeometryError("start position outside the side")
    if not (0.0 < direction < math.pi):
        raise GeometryError("start direction must point into the triangle")
    result = _run(tables, 0, t, s, pos, direction, max_length, max_crossings,
                  record_path)
    return _to_path(tables, result, ("side", t, s, pos, direction))


def trace_from_corner(metric, corner: Tuple[int, int], wedge_angle: float,
                      max_length: float, max_crossings: int = 4096,
                      record_path: bool = True) -> GeodesicPath:
    """Trace from a triangle corner into its wedge."""
    t, k = corner
    tables = tables_for(metric)
    result = _run(tables, 1, t, k, 0.0, wedge_angle, max_length,
                  max_crossings, record_path)
    return _to_path(tables, result, ("corner", t, k, wedge_angle))


# -- rotation fans around vertex classes -------------------------------------


class VertexFans:
    """Cyclic corner order and cumulative angle offsets around each class."""

    def __init__(self, tables: TraceTables):
        self.tables = tables
        self.fan: Dict[int, List[Tuple[int, int]]] = {}
        self.offset: Dict[Tuple[int, int], float] = {}
        self.cyclic: Dict[int, bool] = {}
        n = len(tables.sides)
        corners_by_class: Dict[int, List[Tuple[int, int]]] = {}
        for t in range(n):
            for k in range(3):
                corners_by_class.setdefault(
                    tables.corner_class[t][k], []).append((t, k))
        for cls, corners in corners_by_class.items():
            start = min(corners)
            # walk clockwise to a boundary (or around the full fan)
            cur = start
            steps = 0
            cyclic = True
            while True:
                prev = self._prev(cur)
                if prev is None:
                    cyclic = False
                    break
                cur = prev
                steps += 1
                if cur == start and steps:
                    break
                if steps > len(corners):
                    raise GeometryError("broken rotation fan")
            first = cur if not cyclic else start
            fan = [first]
            total = 0.0
            self.offset[first] = 0.0
            cur = first
            while True:
                t, k = cur
                total += tables.angles[t][k]
                nxt = self._next(cur)
                if nxt is None or nxt == first:
                    break
                fan.append(nxt)
                self.offset[nxt] = total
                cur = nxt
                if len(fan) > len(corners):
                    raise GeometryError("broken rotation fan")
            self.fan[cls] = fan
            self.cyclic[cls] = cyclic

    def _next(self, corner):
        """Counterclockwise neighbor: cross the side toward corner+2."""
        t, k = corner
        s = (k + 1) % 3
        t2 = self.tables.glue_tri[t][s]
        if t2 < 0:
            return None
        s2 = self.tables.glue_side[t][s]
        return (t2, (s2 + 1) % 3)

    def _prev(self, corner):
        """Clockwise neighbor: cross the side toward corner+1."""
        t, k = corner
        s = (k + 2) % 3
        t2 = self.tables.glue_tri[t][s]
        if t2 < 0:
            return None
        s2 = self.tables.glue_side[t][s]
        return (t2, (s2 + 2) % 3)

    def total_angle(self, cls: int) -> float:
        return self.tables.class_angle[cls]

    def global_direction(self, corner: Tuple[int, int], beta: float) -> float:
        return self.offset[corner] + beta

    def corner_for_direction(self, cls: int, direction: float):
        """(corner, in-wedge angle) realizing a global direction."""
        total = self.total_angle(cls)
        direction = direction % total if self.cyclic[cls] else direction
        for corner in self.fan[cls]:
            t, k = corner
            a = self.tables.angles[t][k]
            off = self.offset[corner]
            if off - 1e-12 <= direction <= off + a + 1e-12:
                return corner, min(max(direction - off, 0.0), a)
        raise GeometryError("direction outside the fan range")


def fans_for(metric) -> VertexFans:
    cached = getattr(metric, "_vertex_fans", None)
    if cached is None:
        cached = VertexFans(tables_for(metric))
        metric._vertex_fans = cached
    return cached


# -- saddle connections -------------------------------------------------------


@dataclass(frozen=True)
class SaddleConnection:
    """Straight cone-to-cone geodesic segment.

    Directions are global angular coordinates around the endpoint classes.
    ``flexible`` marks an antipodal family: the whole direction interval
    realizes a length-pi connection to the same target point.
    """

    src: int
    dst: int
    length: float
    dir_src: float
    dir_dst: float
    flexible: bool = False
    dir_src_range: Tuple[float, float] = (0.0, 0.0)


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross3(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _unit3(a):
    n = math.sqrt(_dot3(a, a))
    return (a[0] / n, a[1] / n, a[2] / n)


def _acos(x):
    return math.acos(max(-1.0, min(1.0, x)))


def saddle_connections(metric, depth: int = 12,
                       length_bound: float = 2.0 * math.pi + 1e-6,
                       ) -> List[SaddleConnection]:
    """Cone-to-cone straight segments up to the crossing-depth budget.

    Wedge development from every cone corner: keep a corridor of developed
    triangles with the interval of directions that stay inside it; record
    a connection whenever a cone-class vertex image falls inside the
    corridor.  Target images antipodal to the source produce flexible
    (direction-interval) connections of length pi.
    """
    tables = tables_for(metric)
    fans = fans_for(metric)
    out: List[SaddleConnection] = []
    seen = set()
    pole = (0.0, 0.0, 1.0)
    single_cap = min(math.pi + 1e-9, length_bound)

    cone_classes = [i for i, k in enumerate(tables.class_kind) if k == 1]
    for src in cone_classes:
        for t0, k0 in fans.fan[src]:
            verts0 = _trace_py._place_initial(tables.sides, tables.angles,
                                              t0, k0)
            base = fans.offset[(t0, k0)]
            wedge = tables.angles[t0][k0]
            stack = [(t0, verts0, 0.0, wedge, -1, depth)]
            while stack:
                t, verts, lo, hi, entry, left = stack.pop()
                for j in range(3):
                    if t == t0 and j == k0 and entry == -1:
                        continue
                    cls = tables.corner_class[t][j]
                    if tables.class_kind[cls] != 1:
                        continue
                    X = verts[j]
                    ell = _acos(X[2])
                    if ell < 1e-9 or ell > single_cap:
                        continue
                    if ell > math.pi - 1e-6:
                        # development drift leaves antipodal images a few
                        # 1e-8 short of pi, hence the loose band
                        # antipodal: length-pi family over the whole corridor
                        key = (src, cls, round(base + lo, 9),
                               round(base + hi, 9), "flex")
                        if key in seen or hi - lo < 1e-9:
                            continue
                        seen.add(key)
                        mid = 0.5 * (lo + hi)
                        out.append(SaddleConnection(
                            src, cls, math.pi, base + mid, float("nan"),
                            flexible=True,
                            dir_src_range=(base + lo, base + hi)))
                        continue
                    theta = math.atan2(X[1], X[0])
                    if theta < lo - 1e-9 or theta > hi + 1e-9:
                        continue
                    # arrival direction inside the wedge of corner (t, j)
                    r0 = _unit3((verts[(j + 1) % 3][0] - _dot3(verts[(j + 1) % 3], X) * X[0],
                                 verts[(j + 1) % 3][1] - _dot3(verts[(j + 1) % 3], X) * X[1],
                                 verts[(j + 1) % 3][2] - _dot3(verts[(j + 1) % 3], X) * X[2]))
                    back = _unit3((pole[0] - X[2] * X[0],
                                   pole[1] - X[2] * X[1],
                                   pole[2] - X[2] * X[2]))
                    beta = math.atan2(_dot3(_cross3(r0, back), X),
                                      _dot3(r0, back))
                    if beta < -1e-9:
                        continue
                    beta = max(beta, 0.0)
                    if beta > tables.angles[t][j] + 1e-9:
                        continue
                    dir_dst = fans.offset[(t, j)] + beta
                    key = (src, cls, round(ell, 11), round(base + theta, 11))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(SaddleConnection(src, cls, ell, base + theta,
                                                dir_dst))
                if left == 0:
                    continue
                for s in range(3):
                    if s == entry:
                        continue
                    A = verts[(s + 1) % 3]
                    B = verts[(s + 2) % 3]
                    if entry == -1 and (abs(A[2] - 1.0) < 1e-12
                                        or abs(B[2] - 1.0) < 1e-12):
                        continue  # sides through the source corner
                    thA = math.atan2(A[1], A[0])
                    thB = math.atan2(B[1], B[0])
                    sub_lo = max(lo, min(thA, thB))
                    sub_hi = min(hi, max(thA, thB))
                    if sub_hi - sub_lo < 1e-12:
                        continue
                    if min(_acos(A[2]), _acos(B[2])) > single_cap + 0.2:
                        continue
                    t2 = tables.glue_tri[t][s]
                    if t2 < 0:
                        continue
                    s2 = tables.glue_side[t][s]
                    w2 = _trace_py._develop_neighbor(tables.sides, verts, s,
                                                     t2, s2)
                    w2 = [_unit3(v) for v in w2]
                    stack.append((t2, w2, sub_lo, sub_hi, s2, left - 1))
    out.sort(key=lambda c: (c.length, c.src, c.dst, c.dir_src))
    return out


# -- concatenation into closed geodesics --------------------------------------


@dataclass(frozen=True)
class CycleWitness:
    """Verified closed geodesic through cone points."""

    classes: Tuple[int, ...]
    labels: Tuple[str, ...]
    lengths: Tuple[float, ...]
    total_length: float
    paths: Tuple[GeodesicPath, ...]
    max_length_error: float


def _gap_ok(arrive: float, depart: float, total: float, tol: float) -> bool:
    g = (depart - arrive) % total
    return min(g, total - g) >= math.pi - tol


def verified_connections(metric, conns: Sequence[SaddleConnection],
                         length_tol: float = 1e-9) -> List[SaddleConnection]:
    """Drop connections that do not re-trace onto their target cone point.

    The wedge development over-claims near corridor corners; a quick
    kernel re-trace of every candidate keeps the connection list small and
    exact before cycles are assembled from it.
    """
    tables = tables_for(metric)
    fans = fans_for(metric)
    out = []
    seen_flex = set()
    for c in conns:
        if c.flexible:
            # one representative per direction corridor: distinct corridors
            # give genuinely different junction options downstream
            lo, hi = c.dir_src_range
            key = (c.src, c.dst, round(lo, 6), round(hi, 6))
            if key in seen_flex:
                continue
            dep = 0.5 * (lo + hi)
            tol = 1e-7
        else:
            dep = c.dir_src
            tol = length_tol
        try:
            corner, beta = fans.corner_for_direction(c.src, dep)
        except GeometryError:
            continue
        beta = min(max(beta, 0.0), tables.angles[corner[0]][corner[1]])
        path = trace_from_corner(metric, corner, beta,
                                 max_length=c.length + 1e-6,
                                 record_path=False)
        if path.termination != "cone_point" or path.end_class != c.dst:
            continue
        if abs(path.total_length - c.length) > tol:
            continue
        if c.flexible:
            seen_flex.add(key)
        out.append(c)
    return out


@dataclass(frozen=True)
class _Directed:
    src: int
    dst: int
    length: float
    dep: Optional[float]        # departure direction at src (None = flexible)
    arr: Optional[float]        # arrival direction at dst (None = flexible)
    dep_range: Tuple[float, float]
    conn_id: int


def _directed_connections(conns: Sequence[SaddleConnection]) -> List[_Directed]:
    out = []
    for i, c in enumerate(conns):
        if c.flexible:
            out.append(_Directed(c.src, c.dst, c.length, None, None,
                                 c.dir_src_range, i))
            out.append(_Directed(c.dst, c.src, c.length, None, None,
                                 (float("nan"), float("nan")), i))
        else:
            out.append(_Directed(c.src, c.dst, c.length, c.dir_src, c.dir_dst,
                                 (c.dir_src, c.dir_src), i))
            out.append(_Directed(c.dst, c.src, c.length, c.dir_dst, c.dir_src,
                                 (c.dir_dst, c.dir_dst), i))
    return out


def _candidate_cycles(tables: TraceTables, conns: Sequence[SaddleConnection],
                      length_bound: float, search_tol: float = 1e-6,
                      max_edges: int = 12, max_candidates: int = 4000,
                      max_steps: int = 2_000_000):
    directed = _directed_connections(conns)
    by_src: Dict[int, List[_Directed]] = {}
    for d in directed:
        by_src.setdefault(d.src, []).append(d)
    for lst in by_src.values():
        lst.sort(key=lambda d: (d.length, d.dst, d.conn_id))

    candidates: List[Tuple[_Directed, ...]] = []
    seen = set()
    steps = 0

    def junction(prev: _Directed, nxt: _Directed) -> bool:
        if prev.arr is None or nxt.dep is None:
            return True
        total = tables.class_angle[prev.dst]
        return _gap_ok(prev.arr, nxt.dep, total, search_tol)

    def dfs(start: int, path: List[_Directed], total: float, used):
        nonlocal steps
        steps += 1
        if steps > max_steps or len(candidates) >= max_candidates:
            return
        cur = path[-1].dst
        if cur == start and junction(path[-1], path[0]):
            # dedupe rotations/reflections but keep distinct connection
            # objects apart (different corridors offer different junctions)
            key = (round(total, 9), tuple(sorted(d.conn_id for d in path)))
            if key not in seen:
                seen.add(key)
                candidates.append(tuple(path))
        if len(path) >= max_edges:
            return
        for nxt in by_src.get(cur, ()):
            if total + nxt.length > length_bound + 1e-9:
                continue
            if nxt.conn_id == path[-1].conn_id:
                continue  # immediate backtrack is never geodesic
            if used.get(nxt.conn_id, 0) >= 2:
                continue
            if not junction(path[-1], nxt):
                continue
            used[nxt.conn_id] = used.get(nxt.conn_id, 0) + 1
            path.append(nxt)
            dfs(start, path, total + nxt.length, used)
            path.pop()
            used[nxt.conn_id] -= 1

    for start in sorted(by_src):
        for first in by_src[start]:
            if first.length > length_bound + 1e-9:
                continue
            dfs(start, [first], first.length, {first.conn_id: 1})
    return candidates


def verify_cycle(metric, cycle: Sequence[_Directed],
                 junction_tol: float = JUNCTION_TOL,
                 length_tol: float = 1e-9,
                 max_combinations: int = 27) -> Optional[CycleWitness]:
    """Re-trace a candidate through the development kernel.

    Every segment must land on its predicted cone point at its predicted
    length; every junction must leave at least a straight angle on both
    sides.  Flexible (direction-interval) segments are sampled, and the
    junction check runs over the product of the per-segment samples, since
    the feasible choices couple across a cycle.  Returns None when no
    combination passes.
    """
    tables = tables_for(metric)
    fans = fans_for(metric)

    per_edge: List[List[Tuple[float, GeodesicPath, float]]] = []
    for d in cycle:
        if d.dep is not None:
            samples = [d.dep]
        else:
            lo, hi = d.dep_range
            if math.isnan(lo):
                return None  # reversed flexible edges lack direction data
            samples = [0.5 * (lo + hi),
                       lo + 0.15 * (hi - lo), lo + 0.85 * (hi - lo)]
        options = []
        for dep in samples:
            try:
                corner, beta = fans.corner_for_direction(d.src, dep)
            except GeometryError:
                continue
            beta = min(max(beta, 0.0), tables.angles[corner[0]][corner[1]])
            path = trace_from_corner(metric, corner, beta,
                                     max_length=d.length + 1e-6)
            if path.termination != "cone_point":
                continue
            if path.end_class != d.dst:
                continue
            if abs(path.total_length - d.length) > length_tol:
                continue
            arr = _arrival_direction(tables, fans, path)
            if arr is None:
                continue
            options.append((dep, path, arr))
        if not options:
            return None
        per_edge.append(options)

    n = len(cycle)
    combos = 1
    for options in per_edge:
        combos *= len(options)
    if combos > max_combinations:
        per_edge = [opts[:1] if len(opts) > 1 else opts for opts in per_edge]

    for chosen in itertools.product(*per_edge):
        ok = True
        for i in range(n):
            _, _, arr_global = chosen[i]
            dep_global = chosen[(i + 1) % n][0]
            total = tables.class_angle[cycle[i].dst]
            if not _gap_ok(arr_global, dep_global, total, junction_tol):
                ok = False
                break
        if not ok:
            continue
        paths = [c[1] for c in chosen]
        max_err = max(abs(p.total_length - d.length)
                      for p, d in zip(paths, cycle))
        labels = tuple(tables.class_label[d.src] or f"class:{d.src}"
                       for d in cycle)
        return CycleWitness(
            classes=tuple(d.src for d in cycle),
            labels=labels,
            lengths=tuple(p.total_length for p in paths),
            total_length=sum(p.total_length for p in paths),
            paths=tuple(paths),
            max_length_error=max_err,
        )
    return None


def _arrival_direction(tables: TraceTables, fans: VertexFans,
                       path: GeodesicPath) -> Optional[float]:
    """Global fan coordinate of the arrival direction of a cone-hit trace."""
    if path.termination != "cone_point" or path.end_corner[0] < 0:
        return None
    return fans.offset[path.end_corner] + path.end_wedge_angle


# -- seeded shooting ----------------------------------------------------------


def _shot_parameters(tables: TraceTables, rng: np.random.Generator):
    glued = [(t, s) for t in range(len(tables.sides)) for s in range(3)
             if tables.glue_tri[t][s] >= 0]
    glued.sort()
    while True:
        t, s = glued[int(rng.integers(len(glued)))]
        L = tables.sides[t][s]
        pos = float(rng.uniform(0.05, 0.95)) * L
        ang = float(rng.uniform(0.05, 0.95)) * math.pi
        yield t, s, pos, ang


def _start_record(tables: TraceTables, t: int, s: int, pos: float,
                  ang: float):
    """Canonical (side, position, angle) of a shot's start crossing."""
    gt = tables.glue_tri[t][s]
    gs = tables.glue_side[t][s]
    if gt < 0:
        return None
    L = tables.sides[t][s]
    if (t, s) <= (gt, gs):
        return ((t, s), pos, ang)
    return ((gt, gs), L - pos, ang - math.pi)


def _crossing_records(tables: TraceTables, path: GeodesicPath):
    """Canonical records of the internal crossings of a recorded path."""
    out = []
    segs = path.segments
    for i in range(len(segs) - 1):
        nxt = segs[i + 1]
        t2, s2 = nxt.triangle, nxt.entry_side
        t1, s1 = segs[i].triangle, segs[i].exit_side
        if s1 < 0 or s2 < 0:
            continue
        # entry angle inside the next triangle, from its reference placement
        verts = _trace_py._place_initial(tables.sides, tables.angles, t2, 0)
        a = _point_on_side(tables, verts, t2, s2, nxt.entry_pos)
        if nxt.exit_side >= 0:
            b = _point_on_side(tables, verts, t2, nxt.exit_side, nxt.exit_pos)
        else:
            continue
        D = _unit3((b[0] - _dot3(b, a) * a[0], b[1] - _dot3(b, a) * a[1],
                    b[2] - _dot3(b, a) * a[2]))
        P = verts[(s2 + 1) % 3]
        Q = verts[(s2 + 2) % 3]
        m = _unit3(_cross3(P, Q))
        T = _unit3(_cross3(m, a))
        ang = math.atan2(_dot3(_cross3(T, D), a), _dot3(T, D))
        L = tables.sides[t2][s2]
        if (t2, s2) <= (t1, s1):
            out.append((i, (t2, s2), nxt.entry_pos, ang))
        else:
            out.append((i, (t1, s1), L - nxt.entry_pos, ang - math.pi))
    return out


def _closure_defect(metric, tables, t, s, pos, ang, length_bound,
                    coarse: float = 0.08):
    """Signed position defect at the first near-return to the start side."""
    start = _start_record(tables, t, s, pos, ang)
    if start is None:
        return None
    path = geodesic_trace(metric, (t, s, pos), ang,
                          max_length=length_bound + 1e-3)
    if path.termination == "closed":
        return 0.0
    if path.termination not in ("max_length",):
        return None
    for _, key, cpos, cang in _crossing_records(tables, path):
        if key != start[0]:
            continue
        dpos = cpos - start[1]
        dang = cang - start[2]
        if abs(dpos) < coarse and abs(dang) < coarse:
            return dpos
    return None


def refine_shot_direction(metric, t: int, s: int, pos: float, ang: float,
                          length_bound: float,
                          max_iter: int = 40) -> Optional[GeodesicPath]:
    """Secant iteration on the start direction to close a near-miss shot.

    Drives the position defect of the first near-return to zero; succeeds
    only when the kernel then confirms closure at the tight tolerances.
    """
    tables = tables_for(metric)
    lo, hi = 0.02 * math.pi, 0.98 * math.pi

    def defect(a):
        if not (lo < a < hi):
            return None
        return _closure_defect(metric, tables, t, s, pos, a, length_bound)

    a0, a1 = ang, min(max(ang + 1e-3, lo), hi)
    d0 = defect(a0)
    if d0 is None:
        return None
    if d0 == 0.0:
        a1 = a0
    else:
        d1 = defect(a1)
        for _ in range(max_iter):
            if d1 is None or d1 == d0:
                return None
            a2 = a1 - d1 * (a1 - a0) / (d1 - d0)
            if not (lo < a2 < hi):
                return None
            a0, d0 = a1, d1
            a1 = a2
            d1 = defect(a1)
            if d1 is not None and abs(d1) < 1e-10:
                break
        else:
            return None
    result = _run(tables, 0, t, s, pos, a1, length_bound + 1e-3, 4096, False)
    if result[0] == T_CLOSED and result[1] <= length_bound + 1e-9:
        path = geodesic_trace(metric, (t, s, pos), a1,
                              max_length=length_bound + 1e-3)
        if path.termination == "closed":
            return path
    return None


def shoot_for_closure(metric, seed: int, shots: int, length_bound: float,
                      refine: int = 48) -> List[GeodesicPath]:
    """Random side shots; returns re-traced closed geodesics within bound.

    Exact closures are kept directly; the first ``refine`` shot
    configurations also get a secant refinement of the direction so
    isolated closed geodesics near a shot are pulled in.
    """
    tables = tables_for(metric)
    rng = np.random.default_rng(seed)
    gen = _shot_parameters(tables, rng)
    hits: List[GeodesicPath] = []
    to_refine = []
    for i in range(shots):
        t, s, pos, ang = next(gen)
        result = _run(tables, 0, t, s, pos, ang, length_bound + 1e-3, 4096,
                      False)
        code, total = result[0], result[1]
        if code == T_CLOSED and total <= length_bound + 1e-9:
            path = geodesic_trace(metric, (t, s, pos), ang,
                                  max_length=length_bound + 1e-3)
            if path.termination == "closed":
                hits.append(path)
        elif code == T_MAXLEN and len(to_refine) < refine:
            to_refine.append((t, s, pos, ang))
    if not hits:
        for t, s, pos, ang in to_refine:
            path = refine_shot_direction(metric, t, s, pos, ang, length_bound)
            if path is not None:
                hits.append(path)
    hits.sort(key=lambda p: p.total_length)
    return hits


@dataclass
class FalsifierResult:
    witness: object
    length: Optional[float]
    kind: Optional[str]
    hemisphere_boundary: bool
    boundary_vertex: Optional[int]
    budget_exhausted: bool


def _hemisphere_flag(metric, witness: CycleWitness):
    """A cycle of seams around one primal vertex is a cap boundary."""
    if metric.marked is None:
        return False, None
    seams = {}
    for e in metric.marked.edges:
        if e.kind == "seam":
            seams[tuple(sorted(e.nodes))] = e
    keys = []
    n = len(witness.classes)
    for i in range(n):
        a = witness.labels[i]
        b = witness.labels[(i + 1) % n]
        e = seams.get(tuple(sorted((a, b))))
        if e is None or abs(e.length - witness.lengths[i]) > 1e-7:
            return False, None
        keys.append(e.key)
    common = set(keys[0][1:])
    for k in keys[1:]:
        common &= set(k[1:])
    if len(common) != 1:
        return False, None
    return True, next(iter(common))


def find_short_closed_geodesic(metric, seed: int = 0, depth: int = 12,
                               shots: int = 10000,
                               length_bound: float = 2.0 * math.pi + 1e-6,
                               ) -> FalsifierResult:
    """Budgeted search for a closed geodesic of length <= length_bound.

    Part one enumerates cone-to-cone saddle connections by wedge
    development and concatenates angle-compatible cycles; part two shoots
    seeded rays and keeps detected closures.  Every candidate is re-traced
    before being reported.  A None result is not a proof of absence.
    """
    conns = saddle_connections(metric, depth=depth, length_bound=length_bound)
    conns = verified_connections(metric, conns)
    tables = tables_for(metric)
    witnesses: List[Tuple[float, int, object, str]] = []
    for cand in _candidate_cycles(tables, conns, length_bound):
        w = verify_cycle(metric, cand)
        if w is not None and w.total_length <= length_bound + 1e-9:
            witnesses.append((w.total_length, len(witnesses), w,
                              "saddle_cycle"))
    for path in shoot_for_closure(metric, seed, shots, length_bound):
        witnesses.append((path.total_length, len(witnesses), path, "shot"))

    if not witnesses:
        return FalsifierResult(None, None, None, False, None, True)
    witnesses.sort(key=lambda w: (round(w[0], 12), w[1]))
    length, _, best, kind = witnesses[0]
    hemi, vertex = (False, None)
    if isinstance(best, CycleWitness):
        hemi, vertex = _hemisphere_flag(metric, best)
    return FalsifierResult(best, length, kind, hemi, vertex, False)


# -- path utilities -----------------------------------------------------------


def _point_on_side(tables: TraceTables, verts, t: int, s: int, pos: float):
    P = verts[(s + 1) % 3]
    Q = verts[(s + 2) % 3]
    m = _unit3(_cross3(P, Q))
    tP = _cross3(m, P)
    return _unit3((math.cos(pos) * P[0] + math.sin(pos) * tP[0],
                   math.cos(pos) * P[1] + math.sin(pos) * tP[1],
                   math.cos(pos) * P[2] + math.sin(pos) * tP[2]))


def path_self_intersects(metric, path: GeodesicPath, tol: float = 1e-9) -> bool:
    """Check transverse self-crossings by comparing chords inside each
    triangle in a reference development."""
    tables = tables_for(metric)
    by_tri: Dict[int, List[Tuple]] = {}
    for seg in path.segments:
        if seg.entry_side < 0 or seg.exit_side < 0:
            continue
        by_tri.setdefault(seg.triangle, []).append(seg)
    for t, segs in by_tri.items():
        if len(segs) < 2:
            continue
        verts = _trace_py._place_initial(tables.sides, tables.angles, t, 0)
        chords = []
        for seg in segs:
            a = _point_on_side(tables, verts, t, seg.entry_side,
                               seg.entry_pos)
            b = _point_on_side(tables, verts, t, seg.exit_side, seg.exit_pos)
            chords.append((a, b))
        for i in range(len(chords)):
            for j in range(i + 1, len(chords)):
                if _arcs_cross(chords[i], chords[j], tol):
                    return True
    return False


def _arcs_cross(c1, c2, tol: float) -> bool:
    a1, b1 = c1
    a2, b2 = c2
    n1 = _cross3(a1, b1)
    n2 = _cross3(a2, b2)
    axis = _cross3(n1, n2)
    nn = math.sqrt(_dot3(axis, axis))
    if nn < 1e-14:
        return False  # same great circle: overlapping, not transverse
    axis = (axis[0] / nn, axis[1] / nn, axis[2] / nn)
    for sign in (1.0, -1.0):
        x = (sign * axis[0], sign * axis[1], sign * axis[2])
        if _strictly_inside_arc(a1, b1, x, tol) and \
                _strictly_inside_arc(a2, b2, x, tol):
            return True
    return False


def _strictly_inside_arc(a, b, x, tol: float) -> bool:
    L = _acos(_dot3(a, b))
    if L < 2 * tol:
        return False
    da = _acos(_dot3(a, x))
    db = _acos(_dot3(b, x))
    return da > tol and db > tol and abs(da + db - L) < 1e-9
