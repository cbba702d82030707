"""Tests for combinatorics and polyhedron construction from face planes."""

import math

import numpy as np
import pytest

from hyperpoly.minkowski import GeometryError, HPlane, MVector, inner
from hyperpoly.polyhedron import (
    Combinatorics,
    ProjectivePolyhedron,
    corner_angle,
    dihedral_angle,
    exterior_angle,
    face_area,
    from_planes,
    validate,
)
from hyperpoly.sampling import random_lorentz
from hyperpoly.solids import (
    TETRA_IDEAL_SIGMA,
    corner_with_cap_planes,
    cube_planes,
    ideal_tetrahedron_planes,
    pentagon_pyramid_planes,
    plane_at,
    regular_tetrahedron_planes,
)

from helpers import mv


def canon_cycle(cyc):
    i = cyc.index(min(cyc))
    return cyc[i:] + cyc[:i]


class TestCombinatorics:
    @pytest.mark.parametrize("comb,V,E,F", [
        (Combinatorics.tetrahedron(), 4, 6, 4),
        (Combinatorics.cube(), 8, 12, 6),
        (Combinatorics.octahedron(), 6, 12, 8),
        (Combinatorics.icosahedron(), 12, 30, 20),
        (Combinatorics.dodecahedron(), 20, 30, 12),
    ])
    def test_euler(self, comb, V, E, F):
        comb.validate()
        assert len(comb.vertex_ids) == V
        assert len(comb.edges()) == E
        assert comb.num_faces == F

    def test_transpose_involution(self):
        for comb in (Combinatorics.tetrahedron(), Combinatorics.cube(),
                     Combinatorics.dodecahedron()):
            back = comb.transpose().transpose()
            orig = [canon_cycle(c) for c in comb.face_cycles]
            twice = [canon_cycle(c) for c in back.face_cycles]
            assert orig == twice

    def test_edges_have_two_faces_two_vertices(self):
        comb = Combinatorics.cube()
        for e in comb.edges():
            assert len(set(e.faces)) == 2
            assert len(set(e.vertices)) == 2

    def test_cube_transpose_is_octahedron(self):
        dual = Combinatorics.cube().transpose()
        assert sorted(len(c) for c in dual.face_cycles) == [3] * 8


class TestFromPlanes:
    def test_compact_cube(self):
        P = from_planes(cube_planes(0.6))
        assert len(P.vertex_coords) == 8
        assert len(P.edges()) == 12
        assert P.combinatorics.num_faces == 6
        assert set(P.vertex_class.values()) == {"finite"}
        assert validate(P).passed

    def test_ideal_tetrahedron(self):
        P = from_planes(ideal_tetrahedron_planes())
        assert len(P.vertex_coords) == 4
        assert set(P.vertex_class.values()) == {"ideal"}
        for e in P.edges():
            assert dihedral_angle(P, e) == pytest.approx(math.pi / 3, abs=1e-9)
            assert exterior_angle(P, e) == pytest.approx(2 * math.pi / 3, abs=1e-9)
        # ideal vertices are the four lightlike tetrahedron directions
        for v in P.vertex_coords.values():
            assert abs(inner(v, v)) < 1e-9
            assert v.x0 == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_corner(self):
        P = from_planes(corner_with_cap_planes())
        corner = next(v for v, c in P.vertex_coords.items()
                      if abs(c.x0 - 1.0) < 1e-9)
        for e in P.edges():
            if corner in e.vertices:
                assert dihedral_angle(P, e) == pytest.approx(math.pi / 2, abs=1e-12)
        assert validate(P).passed

    def test_hyperideal_tetrahedron(self):
        P = from_planes(regular_tetrahedron_planes(0.5))
        assert set(P.vertex_class.values()) == {"hyperideal"}
        assert validate(P).passed

    def test_too_few_planes(self):
        with pytest.raises(GeometryError, match="at least 4"):
            from_planes(cube_planes()[:3])

    def test_redundant_plane(self):
        planes = cube_planes(0.6) + [plane_at((1, 0, 0), 2.0)]
        with pytest.raises(GeometryError, match="redundant plane"):
            from_planes(planes)

    def test_edge_missing_h3(self):
        with pytest.raises(GeometryError, match="edge misses H3"):
            from_planes(corner_with_cap_planes(1.2))

    def test_fuzz_perturbed_cubes_and_simplices(self):
        rng = np.random.default_rng(99)
        built = 0
        for _ in range(25):
            if rng.uniform() < 0.5:
                planes = cube_planes(float(rng.uniform(0.35, 0.8)))
            else:
                planes = regular_tetrahedron_planes(float(rng.uniform(0.1, 0.3)))
            jittered = []
            for p in planes:
                L = random_lorentz(rng, scale=0.01)
                n = MVector.from_array(L @ p.n.array())
                jittered.append(HPlane(n / math.sqrt(inner(n, n))))
            try:
                P = from_planes(jittered)
            except GeometryError:
                continue
            built += 1
            assert validate(P).passed
        assert built >= 15

    def test_classification_isometry_invariant(self):
        rng = np.random.default_rng(17)
        for sigma in (0.25, TETRA_IDEAL_SIGMA, 0.5):
            planes = regular_tetrahedron_planes(sigma)
            P = from_planes(planes)
            ref = sorted(P.vertex_class.values())
            for _ in range(5):
                L = random_lorentz(rng, scale=0.4)
                moved = []
                for p in planes:
                    n = MVector.from_array(L @ p.n.array())
                    moved.append(HPlane(n / math.sqrt(inner(n, n))))
                Q = from_planes(moved)
                assert sorted(Q.vertex_class.values()) == ref


class TestDihedral:
    def test_symmetric_across_cube_edges(self):
        P = from_planes(cube_planes(0.6))
        angles = [dihedral_angle(P, e) for e in P.edges()]
        assert max(angles) - min(angles) < 1e-9

    def test_formula_symmetry_in_faces(self):
        P = from_planes(cube_planes(0.5))
        for e in P.edges():
            a = -inner(P.planes[e.faces[0]].n, P.planes[e.faces[1]].n)
            b = -inner(P.planes[e.faces[1]].n, P.planes[e.faces[0]].n)
            assert a == b

    def test_disjoint_faces_rejected(self):
        P = from_planes(cube_planes(0.6))
        from hyperpoly.polyhedron import Edge
        fake = Edge(faces=(0, 1), vertices=(0, 1))  # opposite cube faces
        with pytest.raises(GeometryError, match="hyperbolic edge"):
            dihedral_angle(P, fake)


def triangulation_area_oracle(P, face):
    """Fan triangulation + angles from side lengths (hyperbolic law of
    cosines); independent of the tangent-vector corner computation."""
    from hyperpoly.minkowski import HPoint, hyperbolic_distance

    cyc = P.combinatorics.face_cycles[face]
    pts = [HPoint(P.vertex_coords[v]) for v in cyc]
    total = 0.0
    for i in range(1, len(cyc) - 1):
        a = hyperbolic_distance(pts[0], pts[i])
        b = hyperbolic_distance(pts[i], pts[i + 1])
        c = hyperbolic_distance(pts[0], pts[i + 1])
        angles = []
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            val = (math.cosh(x) * math.cosh(y) - math.cosh(z)) / (
                math.sinh(x) * math.sinh(y))
            angles.append(math.acos(max(-1.0, min(1.0, val))))
        total += math.pi - sum(angles)
    return total


class TestFaceArea:
    def test_ideal_triangle(self):
        P = from_planes(ideal_tetrahedron_planes())
        for f in range(4):
            assert face_area(P, f) == pytest.approx(math.pi, abs=1e-12)

    def test_right_angled_pentagon(self):
        planes = pentagon_pyramid_planes()
        # truncate the apex by hand: its polar plane is the equatorial plane
        planes = planes + [HPlane(mv(0, 0, 0, -1))]
        P = from_planes(planes)
        pentagon = 6  # the appended truncation face
        cyc = P.combinatorics.face_cycles[pentagon]
        assert len(cyc) == 5
        assert face_area(P, pentagon) == pytest.approx(math.pi / 2, abs=1e-9)

    def test_doubly_right_quadrilateral(self):
        planes = pentagon_pyramid_planes() + [HPlane(mv(0, 0, 0, -1))]
        P = from_planes(planes)
        # side faces of the truncated pyramid are quadrilaterals with two
        # right angles at the truncation edge
        for f in range(5):
            cyc = P.combinatorics.face_cycles[f]
            if len(cyc) != 4:
                continue
            angles = [corner_angle(P, f, v) for v in cyc]
            rights = [a for a in angles if abs(a - math.pi / 2) < 1e-9]
            betas = [a for a in angles if abs(a - math.pi / 2) >= 1e-9]
            assert len(rights) == 2
            area = face_area(P, f)
            assert area == pytest.approx(math.pi - sum(betas), abs=1e-9)

    def test_matches_triangulation_oracle(self):
        for planes in (cube_planes(0.6), corner_with_cap_planes(),
                       regular_tetrahedron_planes(0.3)):
            P = from_planes(planes)
            for f in range(len(P.planes)):
                assert face_area(P, f) == pytest.approx(
                    triangulation_area_oracle(P, f), abs=1e-8)
                assert face_area(P, f) >= 0.0

    def test_hyperideal_face_rejected(self):
        P = from_planes(regular_tetrahedron_planes(0.5))
        with pytest.raises(GeometryError, match="truncate first"):
            face_area(P, 0)


class TestValidateNegative:
    def test_flipped_normal_reports_convexity(self):
        P = from_planes(cube_planes(0.6))
        flipped = list(P.planes)
        flipped[0] = HPlane(-flipped[0].n)
        bad = ProjectivePolyhedron(tuple(flipped), P.combinatorics,
                                   P.vertex_coords, P.vertex_class)
        report = validate(bad)
        assert not report.passed
        assert any(code == "convexity" and "plane 0" in detail
                   for code, detail in report.failures)

    def test_vertex_pushed_across_light_cone(self):
        P = from_planes(ideal_tetrahedron_planes())
        coords = dict(P.vertex_coords)
        v0 = coords[0]
        coords[0] = MVector(v0.x0, 1.1 * v0.x1, 1.1 * v0.x2, 1.1 * v0.x3)
        bad = ProjectivePolyhedron(P.planes, P.combinatorics, coords,
                                   dict(P.vertex_class))
        report = validate(bad)
        assert not report.passed
        assert any(code == "classification" for code, _ in report.failures)
