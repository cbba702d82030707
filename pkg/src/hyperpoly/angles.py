"""Exterior dihedral-angle assignments on the dual graph and the decision
procedure for admissibility.

The dual graph has one node per face of the primal combinatorics and one
edge per primal edge.  An assignment of weights in (0, pi) is admissible
when every embedded cycle of the dual graph sums to at least 2*pi with
equality exactly on the face cycles of declared ideal vertices, and every
path between two nodes of a common dual face that leaves that face's
boundary sums to more than pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from hyperpoly.minkowski import GeometryError
from hyperpoly.polyhedron import Combinatorics

EQUALITY_TOL = 1e-8

EdgeKey = Tuple[int, int]


def edge_key(u: int, v: int) -> EdgeKey:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class WeightedDualGraph:
    """Primal combinatorics plus one weight per primal edge.

    ``weights`` is keyed by the sorted primal vertex pair of each edge.
    ``vertex_kind`` optionally declares each primal vertex "ideal" or
    "hyperideal"; when omitted the kind is inferred from the weight sums.
    """

    combinatorics: Combinatorics
    weights: Dict[EdgeKey, float] = field(compare=False)
    vertex_kind: Optional[Dict[int, str]] = field(default=None, compare=False)

    def __post_init__(self):
        keys = {edge_key(*e.vertices) for e in self.combinatorics.edges()}
        given = set(self.weights)
        if keys != given:
            missing = keys - given
            extra = given - keys
            raise GeometryError(
                f"weights do not match edges (missing {sorted(missing)}, "
                f"extra {sorted(extra)})")
        if self.vertex_kind is not None:
            for v, kind in self.vertex_kind.items():
                if kind not in ("ideal", "hyperideal"):
                    raise GeometryError(f"unknown vertex kind {kind!r}")

    # -- dual graph structure -------------------------------------------

    def dual_nodes(self) -> Tuple[int, ...]:
        return tuple(range(self.combinatorics.num_faces))

    def dual_edges(self) -> Dict[Tuple[int, int], EdgeKey]:
        """Map sorted face pair -> primal edge key."""
        out: Dict[Tuple[int, int], EdgeKey] = {}
        for e in self.combinatorics.edges():
            fp = (min(e.faces), max(e.faces))
            if fp in out:
                raise GeometryError(f"dual graph has a double edge {fp}")
            out[fp] = edge_key(*e.vertices)
        return out

    def dual_weight(self, f: int, g: int) -> float:
        return self.weights[self.dual_edges()[(min(f, g), max(f, g))]]

    def dual_face_cycles(self) -> Dict[int, Tuple[int, ...]]:
        """Face cycles of the dual graph, keyed by primal vertex id."""
        out = {}
        for v in self.combinatorics.vertex_ids:
            fan = self.combinatorics.vertex_fan(v)
            out[v] = tuple(f for f, _ in fan)
        return out

    def vertex_weight_sum(self, v: int) -> float:
        cyc = self.dual_face_cycles()[v]
        k = len(cyc)
        return sum(self.dual_weight(cyc[i], cyc[(i + 1) % k]) for i in range(k))

    def effective_kinds(self, tol: float = EQUALITY_TOL) -> Dict[int, str]:
        """Declared kinds, or kinds inferred from the local weight sums."""
        if self.vertex_kind is not None:
            return dict(self.vertex_kind)
        out = {}
        for v in self.combinatorics.vertex_ids:
            s = self.vertex_weight_sum(v)
            out[v] = "ideal" if abs(s - 2.0 * math.pi) <= tol else "hyperideal"
        return out

    def ordered_edge_keys(self) -> Tuple[EdgeKey, ...]:
        return tuple(edge_key(*e.vertices) for e in self.combinatorics.edges())

    def weight_vector(self) -> Tuple[float, ...]:
        return tuple(self.weights[k] for k in self.ordered_edge_keys())


@dataclass
class Violation:
    kind: str
    nodes: Tuple[int, ...]
    total: float
    detail: str


@dataclass
class CheckReport:
    passed: bool
    violations: List[Violation]
    ideal_vertices: Tuple[int, ...] = ()

    def add(self, kind: str, nodes: Sequence[int], total: float, detail: str):
        self.passed = False
        self.violations.append(Violation(kind, tuple(nodes), total, detail))


def _adjacency(g: WeightedDualGraph) -> Dict[int, List[Tuple[int, float]]]:
    adj: Dict[int, List[Tuple[int, float]]] = {n: [] for n in g.dual_nodes()}
    for (f, h), key in g.dual_edges().items():
        w = g.weights[key]
        adj[f].append((h, w))
        adj[h].append((f, w))
    for n in adj:
        adj[n].sort()
    return adj


def enumerate_simple_cycles(g: WeightedDualGraph,
                            sum_bound: Optional[float] = None):
    """All simple cycles of the dual graph as (node tuple, weight sum).

    With ``sum_bound`` set, extension stops once the partial sum exceeds
    the bound (weights are positive, so no cycle at or below the bound is
    lost); the enumeration is then complete only up to the bound.
    """
    adj = _adjacency(g)
    out = []

    def extend(root, path, used, total):
        last = path[-1]
        for nxt, w in adj[last]:
            if nxt == root and len(path) >= 3:
                if path[1] < path[-1] and (sum_bound is None
                                           or total + w <= sum_bound):
                    out.append((tuple(path), total + w))
                continue
            if nxt <= root or nxt in used:
                continue
            t = total + w
            if sum_bound is not None and t > sum_bound:
                continue
            used.add(nxt)
            path.append(nxt)
            extend(root, path, used, t)
            path.pop()
            used.discard(nxt)

    for root in sorted(adj):
        extend(root, [root], {root}, 0.0)
    return out


def enumerate_simple_paths(g: WeightedDualGraph, a: int, b: int,
                           sum_bound: Optional[float] = None):
    """Simple paths from a to b as (node tuple, weight sum), bounded."""
    adj = _adjacency(g)
    out = []

    def extend(path, used, total):
        last = path[-1]
        for nxt, w in adj[last]:
            t = total + w
            if sum_bound is not None and t > sum_bound:
                continue
            if nxt == b:
                out.append((tuple(path) + (b,), t))
                continue
            if nxt in used:
                continue
            used.add(nxt)
            path.append(nxt)
            extend(path, used, t)
            path.pop()
            used.discard(nxt)

    extend([a], {a}, 0.0)
    return out


def _cycle_edge_set(nodes: Tuple[int, ...]) -> FrozenSet[Tuple[int, int]]:
    k = len(nodes)
    return frozenset((min(nodes[i], nodes[(i + 1) % k]),
                      max(nodes[i], nodes[(i + 1) % k])) for i in range(k))


def check_cycle_condition(g: WeightedDualGraph,
                          tol: float = EQUALITY_TOL) -> CheckReport:
    """Every embedded cycle sums to >= 2*pi, equality exactly on the face
    cycles of ideal vertices."""
    report = CheckReport(passed=True, violations=[])
    kinds = g.effective_kinds(tol)
    face_cycles = {v: _cycle_edge_set(cyc)
                   for v, cyc in g.dual_face_cycles().items()}
    ideal = []
    target = 2.0 * math.pi
    seen_face_vertices = set()
    for nodes, total in enumerate_simple_cycles(g, sum_bound=target + tol):
        eset = _cycle_edge_set(nodes)
        face_vertex = next((v for v, fs in face_cycles.items() if fs == eset),
                           None)
        if total < target - tol:
            report.add("cycle_below_2pi", nodes, total,
                       f"cycle sums to {total}")
            continue
        # remaining cycles are in the equality band
        if face_vertex is None:
            report.add("equality_on_non_face_cycle", nodes, total,
                       "non-face cycle sums to 2*pi")
        elif kinds.get(face_vertex) != "ideal":
            report.add("ambiguous_near_equality", nodes, total,
                       f"face cycle of vertex {face_vertex} sums to 2*pi "
                       "but the vertex is not declared ideal")
        else:
            ideal.append(face_vertex)
            seen_face_vertices.add(face_vertex)
    # declared-ideal vertices must actually sit in the equality band
    for v, kind in kinds.items():
        if kind == "ideal" and v not in seen_face_vertices:
            s = g.vertex_weight_sum(v)
            report.add("ideal_face_not_at_equality",
                       g.dual_face_cycles()[v], s,
                       f"vertex {v} declared ideal but its face cycle sums "
                       f"to {s}")
    report.ideal_vertices = tuple(sorted(ideal))
    return report


def check_path_condition(g: WeightedDualGraph,
                         tol: float = EQUALITY_TOL) -> CheckReport:
    """Paths joining two nodes of a common dual face, not contained in that
    face's boundary, must sum to more than pi."""
    report = CheckReport(passed=True, violations=[])
    target = math.pi
    seen = set()
    for v, cyc in g.dual_face_cycles().items():
        boundary = _cycle_edge_set(cyc)
        nodes = sorted(set(cyc))
        for i, a in enumerate(nodes):
            for b in nodes[i + 1:]:
                for path, total in enumerate_simple_paths(
                        g, a, b, sum_bound=target + tol):
                    k = len(path)
                    edges = {(min(path[j], path[j + 1]),
                              max(path[j], path[j + 1]))
                             for j in range(k - 1)}
                    if edges <= boundary:
                        continue
                    mark = (path, v)
                    if mark in seen:
                        continue
                    seen.add(mark)
                    report.add("path_not_above_pi", path, total,
                               f"path between nodes of the face of vertex "
                               f"{v} sums to {total} <= pi")
    return report


@dataclass
class AdmissibilityVerdict:
    member: bool
    ideal_vertices: Tuple[int, ...]
    hyperideal_vertices: Tuple[int, ...]
    violations: List[Violation]


def check_angle_admissibility(g: WeightedDualGraph,
                              tol: float = EQUALITY_TOL) -> AdmissibilityVerdict:
    """Range check plus both combinatorial conditions."""
    violations: List[Violation] = []
    for key, w in sorted(g.weights.items()):
        if not (0.0 < w < math.pi):
            violations.append(Violation("weight_out_of_range", key, w,
                                        f"weight {w} outside (0, pi)"))
    c1 = check_cycle_condition(g, tol)
    c2 = check_path_condition(g, tol)
    violations.extend(c1.violations)
    violations.extend(c2.violations)
    member = not violations
    kinds = g.effective_kinds(tol)
    ideal = tuple(sorted(v for v, k in kinds.items() if k == "ideal"))
    hyper = tuple(sorted(v for v, k in kinds.items() if k == "hyperideal"))
    return AdmissibilityVerdict(member, ideal, hyper, violations)


def consistency_with_metric(g: WeightedDualGraph, seed: int = 0,
                            depth: int = 12, shots: int = 2000,
                            tol: float = EQUALITY_TOL) -> dict:
    """Cross-check the combinatorial verdict against the geodesic search.

    Builds the glued-hemisphere metric (forcing construction when the local
    sums fail, so that non-members can be searched too) and runs the
    closed-geodesic falsifier.  A member with a genuine short-geodesic
    witness is a hard inconsistency; the converse direction is only as
    strong as the search budget.
    """
    from hyperpoly.conemetric import build_cap_complex, find_short_closed_geodesic

    verdict = check_angle_admissibility(g, tol)
    metric = build_cap_complex(g, check_sums=False)
    result = find_short_closed_geodesic(metric, seed=seed, depth=depth,
                                        shots=shots)
    witness_is_violation = False
    if result.witness is not None:
        if result.hemisphere_boundary:
            # an exactly-2*pi hemisphere boundary is admissible only when
            # its vertex is declared ideal
            v = result.boundary_vertex
            witness_is_violation = g.effective_kinds(tol).get(v) != "ideal" \
                or abs(result.length - 2.0 * math.pi) > tol
        else:
            witness_is_violation = result.length < 2.0 * math.pi + tol
    agree = verdict.member == (not witness_is_violation)
    sound = not (verdict.member and witness_is_violation)
    return {
        "member": verdict.member,
        "witness_found": result.witness is not None,
        "witness_length": result.length if result.witness else None,
        "witness_is_violation": witness_is_violation,
        "agree": agree,
        "sound": sound,
        "budget_exhausted": result.budget_exhausted,
    }


def graph_from_json(data: dict) -> WeightedDualGraph:
    """Parse {"faces": [[vertex ids]...], "weights": {"u-v": theta},
    "vertex_kind": {"id": "ideal"|"hyperideal"}} into a weighted graph."""
    comb = Combinatorics.from_cycles([tuple(c) for c in data["faces"]])
    weights = {}
    for key, val in data["weights"].items():
        u, v = key.split("-")
        weights[edge_key(int(u), int(v))] = float(val)
    kinds = None
    if "vertex_kind" in data and data["vertex_kind"] is not None:
        kinds = {int(k): str(v) for k, v in data["vertex_kind"].items()}
    return WeightedDualGraph(comb, weights, kinds)


def graph_to_json(g: WeightedDualGraph) -> dict:
    out = {
        "faces": [list(c) for c in g.combinatorics.face_cycles],
        "weights": {f"{u}-{v}": w for (u, v), w in sorted(g.weights.items())},
    }
    if g.vertex_kind is not None:
        out["vertex_kind"] = {str(k): v for k, v in sorted(g.vertex_kind.items())}
    return out


def uniform_weights(comb: Combinatorics, theta: float,
                    vertex_kind: Optional[Dict[int, str]] = None) -> WeightedDualGraph:
    weights = {edge_key(*e.vertices): theta for e in comb.edges()}
    return WeightedDualGraph(comb, weights, vertex_kind)
