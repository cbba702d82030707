"""Tests for the de Sitter dual and the glued dual metric."""

import math

import numpy as np
import pytest

from hyperpoly.minkowski import GeometryError, HPlane, MVector, inner
from hyperpoly.polyhedron import (
    dihedral_angle,
    exterior_angle,
    face_area,
    from_planes,
)
from hyperpoly.duality import cone_angle_report, dual, dual_metric
from hyperpoly.sampling import random_lorentz
from hyperpoly.solids import (
    corner_with_cap_planes,
    cube_planes,
    ideal_tetrahedron_planes,
    regular_tetrahedron_planes,
)


class TestDual:
    def test_cube_dual_is_octahedral(self):
        P = from_planes(cube_planes(0.6))
        D = dual(P)
        assert sorted(len(c) for c in D.combinatorics.face_cycles) == [3] * 8
        assert len(D.edge_lengths) == 12

    def test_edge_lengths_are_exterior_angles(self):
        P = from_planes(cube_planes(0.55))
        D = dual(P)
        for e in P.edges():
            assert D.edge_lengths[e.vertices] == pytest.approx(
                math.pi - dihedral_angle(P, e), abs=1e-9)

    def test_ideal_tetrahedron_lengths(self):
        P = from_planes(ideal_tetrahedron_planes())
        D = dual(P)
        for ell in D.edge_lengths.values():
            assert ell == pytest.approx(2 * math.pi / 3, abs=1e-9)

    def test_orthogonal_corner_gives_octant_triangle(self):
        P = from_planes(corner_with_cap_planes())
        D = dual(P)
        corner = next(v for v, c in P.vertex_coords.items()
                      if abs(c.x0 - 1.0) < 1e-9)
        pg = D.face_polygons[corner]
        assert all(s == pytest.approx(math.pi / 2, abs=1e-9) for s in pg.sides)
        assert all(c == pytest.approx(math.pi / 2, abs=1e-9) for c in pg.corners)

    def test_hyperideal_rejected(self):
        P = from_planes(regular_tetrahedron_planes(0.5))
        with pytest.raises(GeometryError, match="truncate first"):
            dual(P)

    def test_ideal_vertex_polygon_is_a_hemisphere_boundary(self):
        # at an ideal vertex the primal face angles vanish, so every dual
        # polygon corner is flat: the polygon degenerates to a hemisphere
        # boundary with marked points
        from hyperpoly.solids import hyperideal_pentagon_pyramid_planes
        from hyperpoly.truncation import truncate
        P = from_planes(hyperideal_pentagon_pyramid_planes())
        Q = truncate(P).polyhedron
        D = dual(Q)
        ideal = [v for v, c in Q.vertex_class.items() if c == "ideal"]
        assert ideal
        for v in ideal:
            pg = D.face_polygons[v]
            assert all(c == math.pi for c in pg.corners)
            assert sum(pg.sides) == pytest.approx(2 * math.pi, abs=1e-9)

    def test_transpose_involution_on_data(self):
        P = from_planes(cube_planes(0.6))
        D = dual(P)
        back = D.combinatorics.transpose()
        def canon(cyc):
            i = cyc.index(min(cyc))
            return cyc[i:] + cyc[:i]
        assert [canon(c) for c in back.face_cycles] == \
            [canon(c) for c in P.combinatorics.face_cycles]

    def test_isometry_equivariance(self):
        rng = np.random.default_rng(31)
        planes = cube_planes(0.6)
        P = from_planes(planes)
        ref_lengths = sorted(dual(P).edge_lengths.values())
        ref_cones = sorted(e.cone_angle for e in cone_angle_report(P).values())
        for _ in range(5):
            L = random_lorentz(rng, scale=0.4)
            moved = []
            for p in planes:
                n = MVector.from_array(L @ p.n.array())
                moved.append(HPlane(n / math.sqrt(inner(n, n))))
            Q = from_planes(moved)
            assert np.allclose(sorted(dual(Q).edge_lengths.values()),
                               ref_lengths, atol=1e-9)
            cones = sorted(e.cone_angle for e in cone_angle_report(Q).values())
            assert np.allclose(cones, ref_cones, atol=1e-9)


class TestDualMetric:
    def test_ideal_tetrahedron_assembly(self):
        P = from_planes(ideal_tetrahedron_planes())
        m = dual_metric(P)
        assert m.closed
        assert m.total_area() == pytest.approx(8 * math.pi, abs=1e-9)
        for cp in m.cone_points:
            assert cp.angle == pytest.approx(3 * math.pi, abs=1e-9)
        assert m.gauss_bonnet_residual() < 1e-10

    def test_cube_dual_metric_counts(self):
        P = from_planes(cube_planes(0.6))
        m = dual_metric(P)
        assert len(m.triangles) == 8  # one spherical triangle per cube vertex
        assert len(m.cone_points) == 6
        assert m.gauss_bonnet_residual() < 1e-10

    def test_cone_points_sum_incident_corners(self):
        P = from_planes(corner_with_cap_planes())
        m = dual_metric(P)
        for cp in m.cone_points:
            root = m.cone_class_of(cp.label)
            assert m.class_angle[root] == pytest.approx(cp.angle, abs=1e-10)


class TestConeAngleReport:
    def test_identity_on_cubes(self):
        P = from_planes(cube_planes(0.6))
        for entry in cone_angle_report(P).values():
            assert entry.residual < 1e-8
            assert entry.cone_angle > 2 * math.pi

    def test_shrinking_faces_approach_flat(self):
        # smaller cubes have smaller faces and cone angles closer to 2*pi
        excesses = []
        for d in (0.5, 0.3, 0.15, 0.07):
            P = from_planes(cube_planes(d))
            rep = cone_angle_report(P)
            excesses.append(max(e.cone_angle - 2 * math.pi
                                for e in rep.values()))
        assert all(a > b for a, b in zip(excesses, excesses[1:]))
        assert excesses[-1] > 0.0

    def test_pentagon_face_cone_angle(self):
        from hyperpoly.solids import pentagon_pyramid_planes
        planes = pentagon_pyramid_planes() + [HPlane(MVector(0, 0, 0, -1))]
        P = from_planes(planes)
        rep = cone_angle_report(P)
        assert rep[6].cone_angle == pytest.approx(2 * math.pi + math.pi / 2,
                                                  abs=1e-9)

    def test_total_curvature_identity(self):
        for planes in (cube_planes(0.6), corner_with_cap_planes(),
                       regular_tetrahedron_planes(0.3)):
            P = from_planes(planes)
            m = dual_metric(P)
            excess = sum(cp.angle - 2 * math.pi for cp in m.cone_points)
            assert m.total_area() == pytest.approx(4 * math.pi + excess,
                                                   abs=1e-7)
