"""Linear algebra of Minkowski R^{3,1} and its two unit quadrics.

The ambient form has signature (-,+,+,+) with the timelike coordinate
first.  The upper sheet of ``<x,x> = -1`` is the hyperboloid model of
hyperbolic 3-space, the quadric ``<x,x> = +1`` is de Sitter space.  The
projective map with an explicit center, together with its inverse, gives
affine (Klein-type) models of both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Relative tolerance deciding lightlike causal class, against squared scale.
LIGHT_TOL = 1e-10
# Absolute tolerance for unit-normalization invariants of quadric points.
UNIT_TOL = 1e-9
# Below this the projective denominator <x, x0> counts as on the horizon.
HORIZON_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when an operation leaves its geometric domain."""


class CausalClass(Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class MVector:
    """A 4-vector of R^{3,1}; ``x0`` is the timelike coordinate."""

    x0: float
    x1: float
    x2: float
    x3: float

    def __add__(self, other: "MVector") -> "MVector":
        return MVector(self.x0 + other.x0, self.x1 + other.x1,
                       self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "MVector") -> "MVector":
        return MVector(self.x0 - other.x0, self.x1 - other.x1,
                       self.x2 - other.x2, self.x3 - other.x3)

    def __mul__(self, s: float) -> "MVector":
        return MVector(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "MVector":
        return MVector(self.x0 / s, self.x1 / s, self.x2 / s, self.x3 / s)

    def __neg__(self) -> "MVector":
        return MVector(-self.x0, -self.x1, -self.x2, -self.x3)

    def __iter__(self):
        yield self.x0
        yield self.x1
        yield self.x2
        yield self.x3

    def array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3], dtype=float)

    @staticmethod
    def from_array(a) -> "MVector":
        return MVector(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def scale(self) -> float:
        return max(abs(self.x0), abs(self.x1), abs(self.x2), abs(self.x3))


def inner(a: MVector, b: MVector) -> float:
    """Minkowski product -a0*b0 + a1*b1 + a2*b2 + a3*b3."""
    return -a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3


def classify(v: MVector) -> CausalClass:
    """Causal class by the sign of <v,v>, with a scale-relative null band."""
    scale = v.scale()
    if scale == 0.0:
        raise GeometryError("degenerate vector: cannot classify the zero vector")
    q = inner(v, v)
    band = LIGHT_TOL * scale * scale
    if q < -band:
        return CausalClass.TIMELIKE
    if q > band:
        return CausalClass.SPACELIKE
    return CausalClass.LIGHTLIKE


@dataclass(frozen=True)
class HPoint:
    """Point on the upper sheet of the hyperboloid (<v,v> = -1, x0 > 0)."""

    v: MVector

    def __post_init__(self):
        q = inner(self.v, self.v)
        if abs(q + 1.0) > UNIT_TOL:
            raise GeometryError(f"not a unit timelike vector: <v,v> = {q}")
        if self.v.x0 <= 0.0:
            raise GeometryError("point on the lower sheet of the hyperboloid")


@dataclass(frozen=True)
class DSPoint:
    """Point of de Sitter space (<v,v> = +1)."""

    v: MVector

    def __post_init__(self):
        q = inner(self.v, self.v)
        if abs(q - 1.0) > UNIT_TOL:
            raise GeometryError(f"not a unit spacelike vector: <v,v> = {q}")


@dataclass(frozen=True)
class HPlane:
    """Oriented hyperbolic plane; the closed half-space is <p,n> >= 0.

    The normal points inward: a polyhedron cut out by planes lies on the
    nonnegative side of each of its face normals.
    """

    n: MVector

    def __post_init__(self):
        q = inner(self.n, self.n)
        if abs(q - 1.0) > UNIT_TOL:
            raise GeometryError(f"plane normal is not unit spacelike: <n,n> = {q}")

    def contains(self, p: MVector, tol: float = 0.0) -> bool:
        return inner(p, self.n) >= -tol


@dataclass(frozen=True)
class ProjectiveCenter:
    """Center x0 of a projective map, with |<x0,x0>| = 1.

    ``eps`` is the sign of <x0,x0>; ``mu`` selects the source quadric
    (-1 hyperboloid, +1 de Sitter).  The source domain consists of the
    quadric points x with sgn <x,x0> = eps.
    """

    x0: MVector
    mu: int

    def __post_init__(self):
        q = inner(self.x0, self.x0)
        if abs(abs(q) - 1.0) > UNIT_TOL:
            raise GeometryError(f"center is not unit: <x0,x0> = {q}")
        if self.mu not in (-1, 1):
            raise GeometryError("mu must be -1 or +1")

    @property
    def eps(self) -> int:
        return -1 if inner(self.x0, self.x0) < 0.0 else 1


def normalize_unit(v: MVector) -> MVector:
    """Rescale v onto its unit quadric <v,v> = sign(<v,v>)."""
    q = inner(v, v)
    if q == 0.0:
        raise GeometryError("cannot normalize a lightlike vector")
    return v / math.sqrt(abs(q))


def hyperbolic_distance(p: HPoint, q: HPoint) -> float:
    """Geodesic distance on the hyperboloid, arcosh(-<p,q>)."""
    c = -inner(p.v, q.v)
    if c < 1.0 - 1e-9:
        raise GeometryError(f"points not on same sheet: -<p,q> = {c}")
    if c < 1.0:
        c = 1.0
    return math.acosh(c)


def desitter_distance(u: DSPoint, v: DSPoint) -> float:
    """Spacelike geodesic length in de Sitter space, arccos(<u,v>)."""
    c = inner(u.v, v.v)
    if abs(c) > 1.0 + 1e-9:
        raise GeometryError(f"not spacelike-connected: <u,v> = {c}")
    c = min(1.0, max(-1.0, c))
    return math.acos(c)


def projective_map(center: ProjectiveCenter, x: MVector) -> MVector:
    """Affine-model image (eps*x - <x,x0>*x0) / <x,x0>.

    The result is the offset of the image point from the center inside the
    affine hyperplane orthogonal to x0; it satisfies <result, x0> = 0.
    """
    x0 = center.x0
    d = inner(x, x0)
    if abs(d) < HORIZON_TOL:
        raise GeometryError("point on projection horizon")
    if d * center.eps < 0.0:
        raise GeometryError("point outside the projection domain: sgn<x,x0> != eps")
    e = float(center.eps)
    return (e * x - d * x0) / d


def projective_inverse(center: ProjectiveCenter, y: MVector) -> MVector:
    """Inverse of the projective map on the affine model hyperplane.

    Computes (y + x0) / sqrt(mu * <y+x0, y+x0>); the square root carries
    exponent -1/2, which is what makes the round trip the identity.
    """
    x0 = center.x0
    w = y + x0
    q = center.mu * inner(w, w)
    if q <= 0.0:
        raise GeometryError("point outside model")
    return w / math.sqrt(q)
