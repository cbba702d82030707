"""Property-based invariants driven by hypothesis."""

import math

from hypothesis import given, settings, strategies as st

from hyperpoly.minkowski import (
    CausalClass,
    HPoint,
    MVector,
    ProjectiveCenter,
    classify,
    hyperbolic_distance,
    inner,
    projective_inverse,
    projective_map,
)
from hyperpoly.conemetric import SphericalTriangle, hemisphere_cap

coord = st.floats(min_value=-10.0, max_value=10.0,
                  allow_nan=False, allow_infinity=False)
vec = st.builds(MVector, coord, coord, coord, coord)


@settings(derandomize=True, max_examples=200)
@given(vec, vec, st.floats(min_value=-3.0, max_value=3.0))
def test_inner_symmetric_bilinear(a, b, s):
    assert inner(a, b) == inner(b, a)
    lhs = inner(a + s * b, a)
    rhs = inner(a, a) + s * inner(b, a)
    assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(lhs) + abs(rhs))


@settings(derandomize=True, max_examples=200)
@given(vec, st.floats(min_value=1e-3, max_value=1e3))
def test_classify_scale_invariant(v, s):
    if v.scale() == 0.0:
        return
    assert classify(v) is classify(s * v)


@settings(derandomize=True, max_examples=200)
@given(st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=-2.0, max_value=2.0))
def test_projective_round_trip_on_boosts(a, b, c):
    x = MVector(math.sqrt(1.0 + a * a + b * b + c * c), a, b, c)
    center = ProjectiveCenter(MVector(1, 0, 0, 0), mu=-1)
    y = projective_map(center, x)
    back = projective_inverse(center, y)
    assert max(abs(t) for t in (back - x)) < 1e-12 * max(1.0, x.scale())


@settings(derandomize=True, max_examples=200)
@given(st.floats(min_value=0.0, max_value=2.0),
       st.floats(min_value=0.0, max_value=2.0),
       st.floats(min_value=0.0, max_value=math.pi))
def test_hyperbolic_triangle_inequality(r1, r2, phi):
    p = HPoint(MVector(math.cosh(r1), math.sinh(r1), 0, 0))
    q = HPoint(MVector(math.cosh(r2), math.sinh(r2) * math.cos(phi),
                       math.sinh(r2) * math.sin(phi), 0))
    o = HPoint(MVector(1, 0, 0, 0))
    d = hyperbolic_distance(p, q)
    assert d <= hyperbolic_distance(p, o) + hyperbolic_distance(o, q) + 1e-9
    assert d >= 0.0


side = st.floats(min_value=0.2, max_value=1.5)


@settings(derandomize=True, max_examples=200)
@given(side, side, side)
def test_spherical_triangle_consistency(a, b, c):
    if a >= b + c or b >= a + c or c >= a + b:
        return
    t = SphericalTriangle.from_sides(a, b, c)
    t.validate(tol=1e-9)
    assert 0.0 < t.area() < 2.0 * math.pi


@settings(derandomize=True, max_examples=100)
@given(st.lists(st.floats(min_value=0.1, max_value=3.0),
                min_size=3, max_size=8))
def test_cap_boundary_length_equals_apex(parts):
    if max(parts) >= math.pi:
        return
    apex = sum(parts)
    piece = hemisphere_cap(apex, parts)
    assert abs(sum(piece.boundary_lengths) - apex) < 1e-12
    assert abs(piece.apex_angle - apex) < 1e-12
    # every triangle keeps its boundary arc at distance pi/2 from the apex
    for tri in piece.triangles:
        assert tri.sides[1] == tri.sides[2] == math.pi / 2
