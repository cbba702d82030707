"""Tests for the global/infinitesimal pair transformations and the
supporting-hyperplane search."""

import math

import numpy as np
import pytest

from hyperpoly.minkowski import (
    DSPoint,
    GeometryError,
    MVector,
    ProjectiveCenter,
    inner,
    projective_map,
)
from hyperpoly.pogorelov import (
    DeformationField,
    PogorelovContext,
    apply_matrix,
    conjugated_isometry_map,
    discrete_lie_residual,
    global_map,
    infinitesimal_map,
    isotropy_element,
    isotropy_generator,
    norm_difference_residual,
    pushforward_field,
    selftest,
    supporting_center,
)
from hyperpoly.sampling import domain_point, tangent_at

from helpers import mv


E0 = mv(1, 0, 0, 0)
CTX_H = PogorelovContext(ProjectiveCenter(E0, mu=-1))
CTX_DS = PogorelovContext(ProjectiveCenter(E0, mu=+1))


def all_contexts():
    return [
        PogorelovContext(ProjectiveCenter(E0, mu=-1)),
        PogorelovContext(ProjectiveCenter(E0, mu=+1)),
        PogorelovContext(ProjectiveCenter(mv(0, 0, 0, 1), mu=-1)),
        PogorelovContext(ProjectiveCenter(mv(0, 0, 0, 1), mu=+1)),
    ]


class TestGlobalMap:
    def test_diagonal_is_projective_map_bitwise(self):
        rng = np.random.default_rng(42)
        for ctx in all_contexts():
            for _ in range(50):
                x = domain_point(rng, ctx.center)
                a, b = global_map(ctx, x, x)
                y = projective_map(ctx.center, x)
                assert a == y and b == y

    def test_diagonal_boost_example(self):
        x = mv(math.cosh(1), math.sinh(1), 0, 0)
        a, b = global_map(CTX_H, x, x)
        assert a.x1 == pytest.approx(0.7615942, abs=1e-7)
        assert a == b

    def test_horizon_pair_rejected(self):
        u = mv(0, 1, 0, 0)
        w = mv(0, 0, 1, 0)
        with pytest.raises(GeometryError, match="pair on horizon"):
            global_map(CTX_DS, u, w)


class TestNormDifferenceIdentity:
    def test_zero_fields(self):
        rng = np.random.default_rng(0)
        x = domain_point(rng, CTX_H.center)
        xp = domain_point(rng, CTX_H.center)
        zero = mv(0, 0, 0, 0)
        assert norm_difference_residual(CTX_H, x, xp, zero, zero) < 1e-12

    def test_equal_norm_pairs_map_to_equal_norm(self):
        # |X| = |X'| must give equal-norm image derivatives (property 1)
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(50):
            x = domain_point(rng, CTX_H.center)
            xp = domain_point(rng, CTX_H.center)
            X = tangent_at(rng, x, -1)
            Xp = tangent_at(rng, xp, -1)
            # rescale Xp to match the norm of X (both spacelike on H^3)
            nX = math.sqrt(inner(X, X))
            nXp = math.sqrt(inner(Xp, Xp))
            Xp = (nX / nXp) * Xp
            resid = norm_difference_residual(CTX_H, x, xp, X, Xp)
            assert resid < 1e-6

    def test_random_residuals_both_quadrics(self):
        rng = np.random.default_rng(2)
        for ctx in (CTX_H, CTX_DS):
            for _ in range(100):
                x = domain_point(rng, ctx.center, margin=0.2)
                xp = domain_point(rng, ctx.center, margin=0.2)
                X = tangent_at(rng, x, ctx.mu)
                Xp = tangent_at(rng, xp, ctx.mu)
                assert norm_difference_residual(ctx, x, xp, X, Xp) < 1e-6

    def test_non_tangent_rejected(self):
        with pytest.raises(GeometryError, match="tangent"):
            norm_difference_residual(CTX_H, E0, E0, E0, E0)


class TestInfinitesimalMap:
    def test_zero_velocity(self):
        rng = np.random.default_rng(3)
        x = domain_point(rng, CTX_H.center)
        y, w = infinitesimal_map(CTX_H, x, mv(0, 0, 0, 0))
        assert y == projective_map(CTX_H.center, x)
        assert max(abs(t) for t in w) == 0.0

    def test_identity_at_center(self):
        # at the center the map is the identity on tangent vectors
        y, w = infinitesimal_map(CTX_H, E0, mv(0, 1, 0, 0))
        assert max(abs(t) for t in y) == 0.0
        assert w == mv(0, 1, 0, 0)

    def test_killing_field_maps_to_flat_killing_field(self):
        # pushforward of an ambient isometry generator is a flat Killing
        # field: first variation of flat distances between image pairs is 0
        rng = np.random.default_rng(4)
        for ctx in (CTX_H, CTX_DS):
            A = isotropy_generator(rng, ctx.x0) * 0.0
            A = isotropy_generator(rng, ctx.x0)  # need not fix x0? it must.
            pts = [domain_point(rng, ctx.center) for _ in range(8)]
            vels = [apply_matrix(A, p) for p in pts]
            field = DeformationField(tuple(pts), tuple(vels))
            pushed = pushforward_field(ctx, field)
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    d = pushed.base[i] - pushed.base[j]
                    dv = pushed.velocity[i] - pushed.velocity[j]
                    assert abs(inner(d, dv)) < 1e-9 * max(1.0, d.scale()) ** 2

    def test_non_tangent_rejected(self):
        with pytest.raises(GeometryError, match="tangent"):
            infinitesimal_map(CTX_H, E0, mv(1, 0, 0, 0))


class TestIsometryCommutation:
    def test_commutation_all_regimes(self):
        rng = np.random.default_rng(5)
        for ctx in all_contexts():
            for _ in range(20):
                rho = isotropy_element(rng, ctx.x0)
                tilde = conjugated_isometry_map(ctx, rho)
                x = domain_point(rng, ctx.center)
                xp = domain_point(rng, ctx.center)
                if abs(inner(x + xp, ctx.x0)) < 1e-3:
                    continue
                a, b = global_map(ctx, x, xp)
                ra, rb = global_map(ctx, apply_matrix(rho, x),
                                    apply_matrix(rho, xp))
                assert max(abs(t) for t in (ra - tilde(a))) < 1e-9
                assert max(abs(t) for t in (rb - tilde(b))) < 1e-9


def octahedron_on_hyperboloid(r=0.8):
    pts = []
    for axis in range(3):
        for sgn in (1.0, -1.0):
            u = [0.0, 0.0, 0.0]
            u[axis] = sgn
            pts.append(mv(math.cosh(r), *(math.sinh(r) * np.array(u))))
    edges = [(i, j) for i in range(6) for j in range(i + 1, 6)
             if abs(inner(pts[i], pts[j]) + 1.0) > 1e-12]
    # drop antipodal pairs (they are the 3 "long diagonals")
    edges = [(i, j) for (i, j) in edges
             if not (i // 2 == j // 2)]
    return pts, edges


class TestDiscreteLieResidual:
    def test_killing_restriction_is_isometric(self):
        rng = np.random.default_rng(6)
        pts, edges = octahedron_on_hyperboloid()
        A = isotropy_generator(rng, mv(0, 1, 1, 0))
        field = DeformationField(tuple(pts), tuple(apply_matrix(A, p) for p in pts))
        assert discrete_lie_residual(field, edges, "hyperbolic") < 1e-9

    def test_radial_scaling_of_euclidean_cube(self):
        corners = [mv(0, sx, sy, sz)
                   for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        edges = [(i, j) for i in range(8) for j in range(i + 1, 8)
                 if sum(a != b for a, b in
                        zip(corners[i].array()[1:], corners[j].array()[1:])) == 1]
        assert len(edges) == 12
        field = DeformationField(tuple(corners), tuple(corners))
        resid = discrete_lie_residual(field, edges, "flat")
        # scaling stretches each edge at exactly its length (side 2)
        assert resid == pytest.approx(2.0, abs=1e-12)
        assert resid > 0.1

    def test_flex_field_transports_to_flat_flex(self):
        # two triangles sharing an edge; rotate one about the shared
        # geodesic: isometric but not the restriction of one Killing field
        rng = np.random.default_rng(7)
        p1 = mv(1, 0, 0, 0)
        p2 = mv(math.cosh(0.9), math.sinh(0.9), 0, 0)
        p3 = mv(math.cosh(0.7), 0, math.sinh(0.7), 0)
        p4 = mv(math.cosh(0.8), 0, 0, math.sinh(0.8))
        pts = [p1, p2, p3, p4]
        edges = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]
        # generator fixing p1 and p2: a, b euclidean-orthogonal to both
        M = np.stack([p1.array(), p2.array()])
        _, _, vt = np.linalg.svd(M)
        a, b = vt[2], vt[3]
        S = np.outer(a, b) - np.outer(b, a)
        A = np.diag([-1.0, 1, 1, 1]) @ S
        vels = [mv(0, 0, 0, 0), mv(0, 0, 0, 0), mv(0, 0, 0, 0),
                apply_matrix(A, p4)]
        field = DeformationField(tuple(pts), tuple(vels))
        assert discrete_lie_residual(field, edges, "hyperbolic") < 1e-8
        pushed = pushforward_field(CTX_H, field)
        assert discrete_lie_residual(pushed, edges, "flat") < 1e-8
        # a generic non-isometric field fails on both sides
        bad_vels = [tangent_at(rng, p, -1) for p in pts]
        bad = DeformationField(tuple(pts), tuple(bad_vels))
        r_src = discrete_lie_residual(bad, edges, "hyperbolic")
        r_img = discrete_lie_residual(pushforward_field(CTX_H, bad), edges, "flat")
        assert r_src > 1e-4 and r_img > 1e-4

    def test_degenerate_edge_rejected(self):
        field = DeformationField((E0, E0), (mv(0, 0, 0, 0), mv(0, 0, 0, 0)))
        with pytest.raises(GeometryError, match="degenerate"):
            discrete_lie_residual(field, [(0, 1)], "hyperbolic")


def corner_fragment_duals(d=1.5):
    """Dual vertices of a compact corner simplex: three mutually orthogonal
    planes through the base point plus a far cap."""
    sh, ch = math.sinh(d), math.cosh(d)
    u = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
    cap = mv(-sh, *(-ch * u))
    return [DSPoint(mv(0, 1, 0, 0)), DSPoint(mv(0, 0, 1, 0)),
            DSPoint(mv(0, 0, 0, 1)), DSPoint(cap)]


class TestSupportingCenter:
    def test_corner_fragment(self):
        duals = corner_fragment_duals()
        w = supporting_center(duals)
        assert inner(w, w) == pytest.approx(1.0, abs=1e-9)
        slack = min(inner(u.v, w) for u in duals)
        assert slack > 0.0

    def test_single_vertex(self):
        # u itself supports with slack 1; refinement may only improve it
        u = DSPoint(mv(0, 1, 0, 0))
        w = supporting_center([u])
        assert inner(w, w) == pytest.approx(1.0, abs=1e-9)
        assert inner(u.v, w) >= 1.0 - 1e-9

    def test_antipodal_pair_rejected(self):
        us = [DSPoint(mv(0, 1, 0, 0)), DSPoint(mv(0, -1, 0, 0))]
        with pytest.raises(GeometryError, match="no supporting hyperplane"):
            supporting_center(us)


class TestSelftest:
    def test_thresholds(self):
        r = selftest(seed=11, samples=40)
        assert max(r["round_trip_max"].values()) < 1e-12
        assert max(r["norm_difference_max"].values()) < 1e-6
        assert max(r["commutation_max"].values()) < 1e-8
        assert max(r["infinitesimal_consistency_max"].values()) < 1e-5
