"""Command-line interface: JSON in, canonical JSON report out.

Subcommands cover polyhedron validation, dualization, truncation, angle
extraction and admissibility checking, cap-complex construction, the
closed-geodesic search, the Pogorelov self-test and OBJ export.  Exit
codes: 0 pass/member, 1 fail/non-member, 2 malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import Dict, Optional

from hyperpoly.minkowski import (
    DSPoint,
    GeometryError,
    HPlane,
    MVector,
    ProjectiveCenter,
    inner,
    projective_map,
)
from hyperpoly import angles as angles_mod
from hyperpoly import conemetric, duality, pogorelov, truncation
from hyperpoly.polyhedron import from_planes, validate

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def canonical_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(report: dict, out: Optional[str]) -> None:
    text = canonical_json(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _declared_polyhedron(planes, faces):
    """Build a polyhedron with the given face cycles taken on faith.

    Vertex coordinates are solved from each vertex's first three declared
    faces; ``validate`` can then report exactly where the declaration
    breaks (convexity, incidence, classification).
    """
    import numpy as np

    from hyperpoly.minkowski import CausalClass, classify
    from hyperpoly.polyhedron import (
        Combinatorics,
        ProjectivePolyhedron,
        _cross4,
        _normalize_candidate,
    )

    comb = Combinatorics.from_cycles([tuple(c) for c in faces])
    coords = {}
    classes = {}
    for v in comb.vertex_ids:
        incident = [f for f, cyc in enumerate(comb.face_cycles) if v in cyc]
        if len(incident) < 3:
            raise GeometryError(f"vertex {v} lies on fewer than 3 faces")
        rows = [np.array([-planes[f].n.x0, planes[f].n.x1,
                          planes[f].n.x2, planes[f].n.x3])
                for f in incident[:3]]
        w = _cross4(*rows)
        if np.max(np.abs(w)) < 1e-12:
            raise GeometryError(f"declared faces of vertex {v} share a pencil")
        rep, cls = _normalize_candidate(w / np.max(np.abs(w)))
        best = None
        for cand in (rep, -rep):
            score = sum(1 for p in planes if inner(cand, p.n) >= -1e-8)
            key = (score, tuple(cand))
            if best is None or key > best[0]:
                best = (key, cand)
        coords[v] = best[1] if cls != "ideal" else best[1] / best[1].x0
        classes[v] = cls
    return ProjectivePolyhedron(tuple(planes), comb, coords, classes)


def polyhedron_from_json(data: dict):
    planes = [HPlane(MVector(*[float(x) for x in row]))
              for row in data["planes"]]
    if "combinatorics" in data and data["combinatorics"] is not None:
        return _declared_polyhedron(planes, data["combinatorics"]["faces"])
    return from_planes(planes)


def _edge_payload(poly) -> Dict[str, float]:
    from hyperpoly.polyhedron import dihedral_angle
    out = {}
    for e in poly.edges():
        out[f"{e.vertices[0]}-{e.vertices[1]}"] = dihedral_angle(poly, e)
    return out


def cmd_validate(args) -> int:
    raw = _read_input(args.input)
    poly = polyhedron_from_json(json.loads(raw))
    report = validate(poly)
    _emit({
        "command": "validate",
        "input_digest": _digest(raw),
        "passed": report.passed,
        "failures": [{"code": c, "detail": d} for c, d in report.failures],
        "vertex_classes": {str(v): c for v, c in
                           sorted(poly.vertex_class.items())},
        "counts": {"vertices": len(poly.vertex_coords),
                   "edges": len(poly.edges()),
                   "faces": len(poly.planes)},
    }, args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_dual(args) -> int:
    raw = _read_input(args.input)
    poly = polyhedron_from_json(json.loads(raw))
    D = duality.dual(poly)
    metric = duality.dual_metric(poly)
    rep = duality.cone_angle_report(poly)
    _emit({
        "command": "dual",
        "input_digest": _digest(raw),
        "edge_lengths": {f"{u}-{v}": l
                         for (u, v), l in sorted(D.edge_lengths.items())},
        "cone_angles": {str(f): e.cone_angle for f, e in sorted(rep.items())},
        "face_areas": {str(f): e.area for f, e in sorted(rep.items())},
        "cone_identity_max_residual": max(e.residual for e in rep.values()),
        "metric": metric.to_dict(),
    }, args.out)
    return EXIT_PASS


def cmd_truncate(args) -> int:
    raw = _read_input(args.input)
    poly = polyhedron_from_json(json.loads(raw))
    tr = truncation.truncate(poly)
    _emit({
        "command": "truncate",
        "input_digest": _digest(raw),
        "planes": [list(p.n) for p in tr.polyhedron.planes],
        "truncation_faces": {str(v): f
                             for v, f in sorted(tr.face_of_vertex.items())},
    }, args.out)
    return EXIT_PASS


def cmd_untruncate(args) -> int:
    raw = _read_input(args.input)
    data = json.loads(raw)
    poly = polyhedron_from_json(data)
    faces = tuple(int(f) for f in data["truncation_faces"])
    restored = truncation.untruncate(poly, faces)
    _emit({
        "command": "untruncate",
        "input_digest": _digest(raw),
        "planes": [list(p.n) for p in restored.planes],
        "vertex_classes": {str(v): c for v, c in
                           sorted(restored.vertex_class.items())},
    }, args.out)
    return EXIT_PASS


def cmd_angles(args) -> int:
    raw = _read_input(args.input)
    poly = polyhedron_from_json(json.loads(raw))
    g = truncation.hyperideal_angles(poly)
    _emit({
        "command": "angles",
        "input_digest": _digest(raw),
        "graph": angles_mod.graph_to_json(g),
    }, args.out)
    return EXIT_PASS


def cmd_check_angles(args) -> int:
    raw = _read_input(args.input)
    g = angles_mod.graph_from_json(json.loads(raw))
    verdict = angles_mod.check_angle_admissibility(g, tol=args.tol_eq)
    _emit({
        "command": "check-angles",
        "input_digest": _digest(raw),
        "member": verdict.member,
        "ideal_vertices": list(verdict.ideal_vertices),
        "hyperideal_vertices": list(verdict.hyperideal_vertices),
        "violations": [{"kind": v.kind, "nodes": list(v.nodes),
                        "total": v.total, "detail": v.detail}
                       for v in verdict.violations],
    }, args.out)
    return EXIT_PASS if verdict.member else EXIT_FAIL


def cmd_metric(args) -> int:
    raw = _read_input(args.input)
    g = angles_mod.graph_from_json(json.loads(raw))
    m = conemetric.build_cap_complex(g)
    _emit({
        "command": "metric",
        "input_digest": _digest(raw),
        "gauss_bonnet_residual": m.gauss_bonnet_residual(),
        "total_area": m.total_area(),
        "cone_points": [{"label": c.label, "kind": c.kind, "angle": c.angle}
                        for c in m.cone_points],
        "metric": m.to_dict(),
    }, args.out)
    return EXIT_PASS


def cmd_geodesic_search(args) -> int:
    raw = _read_input(args.input)
    data = json.loads(raw)
    if "triangles" in data:
        m = conemetric.ConeSphericalMetric.from_dict(data)
        kinds = None
    else:
        g = angles_mod.graph_from_json(data)
        kinds = g.effective_kinds(args.tol_eq)
        m = conemetric.build_cap_complex(g, check_sums=False)
    res = conemetric.find_short_closed_geodesic(
        m, seed=args.seed, depth=args.budget_depth, shots=args.budget_shots)
    violation = False
    if res.witness is not None:
        if res.hemisphere_boundary and kinds is not None:
            violation = kinds.get(res.boundary_vertex) != "ideal" or \
                abs(res.length - 2.0 * math.pi) > args.tol_eq
        else:
            violation = res.length < 2.0 * math.pi + args.tol_eq
    payload = {
        "command": "geodesic-search",
        "input_digest": _digest(raw),
        "seed": args.seed,
        "budget": {"depth": args.budget_depth, "shots": args.budget_shots},
        "witness_found": res.witness is not None,
        "witness_length": res.length,
        "hemisphere_boundary": res.hemisphere_boundary,
        "boundary_vertex": res.boundary_vertex,
        "is_violation": violation,
        "budget_exhausted": res.budget_exhausted,
    }
    if res.kind == "saddle_cycle":
        payload["witness"] = {
            "kind": "saddle_cycle",
            "labels": list(res.witness.labels),
            "lengths": list(res.witness.lengths),
            "max_length_error": res.witness.max_length_error,
        }
    elif res.kind == "shot":
        payload["witness"] = {
            "kind": "shot",
            "length": res.witness.total_length,
            "crossings": len(res.witness.segments),
        }
    _emit(payload, args.out)
    return EXIT_FAIL if violation else EXIT_PASS


def cmd_pogorelov_selftest(args) -> int:
    report = pogorelov.selftest(seed=args.seed, samples=args.samples)
    thresholds = {
        "round_trip_max": 1e-12,
        "norm_difference_max": 1e-6,
        "commutation_max": 1e-8,
        "infinitesimal_consistency_max": 1e-5,
    }
    passed = all(max(report[key].values()) < bound
                 for key, bound in thresholds.items())
    report = dict(report)
    report["command"] = "pogorelov-selftest"
    report["passed"] = passed
    report["thresholds"] = thresholds
    _emit(report, args.out)
    return EXIT_PASS if passed else EXIT_FAIL


def export_obj(poly) -> str:
    """Klein-model OBJ text; hyperideal inputs export their truncation."""
    if any(c == "hyperideal" for c in poly.vertex_class.values()):
        poly = truncation.truncate(poly).polyhedron
    center = ProjectiveCenter(MVector(1, 0, 0, 0), mu=-1)
    lines = ["# klein-model polyhedron"]
    index = {}
    for vid in sorted(poly.vertex_coords):
        v = poly.vertex_coords[vid]
        if poly.vertex_class[vid] == "ideal":
            x = v / v.x0
            coords = (x.x1, x.x2, x.x3)
        else:
            y = projective_map(center, v)
            coords = (y.x1, y.x2, y.x3)
        index[vid] = len(index) + 1
        lines.append("v {!r} {!r} {!r}".format(*coords))
    for cyc in poly.combinatorics.face_cycles:
        lines.append("f " + " ".join(str(index[v]) for v in cyc))
    return "\n".join(lines) + "\n"


def cmd_export_obj(args) -> int:
    raw = _read_input(args.input)
    poly = polyhedron_from_json(json.loads(raw))
    text = export_obj(poly)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hyperpoly",
        description="hyperbolic polyhedra, de Sitter duals and "
                    "dihedral-angle admissibility")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="input JSON file, or - for stdin")
        p.add_argument("--out", default=None, help="write the report here")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-depth", type=int, default=12)
        p.add_argument("--budget-shots", type=int, default=10000)
        p.add_argument("--tol-eq", type=float, default=1e-8)

    for name, fn in (
            ("validate", cmd_validate), ("dual", cmd_dual),
            ("truncate", cmd_truncate), ("untruncate", cmd_untruncate),
            ("angles", cmd_angles), ("check-angles", cmd_check_angles),
            ("metric", cmd_metric), ("geodesic-search", cmd_geodesic_search),
            ("export-obj", cmd_export_obj)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("pogorelov-selftest")
    common(p, needs_input=False)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_pogorelov_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GeometryError as exc:
        sys.stdout.write(canonical_json({
            "command": args.command, "error": str(exc)}))
        return EXIT_FAIL
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
