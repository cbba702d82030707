"""Global and infinitesimal Pogorelov transformations with numerical
verification of their defining identities.

The global map sends pairs of points of a curved model (hyperboloid or de
Sitter sheet on one side of a center) to pairs of points of the flat affine
model, distorting each factor but preserving "isometric pair" relations.
The infinitesimal map transports deformation fields the same way.  All
derivative checks are central finite differences with re-projection onto
the quadric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.linalg import expm

from hyperpoly.minkowski import (
    DSPoint,
    GeometryError,
    MVector,
    ProjectiveCenter,
    inner,
    projective_inverse,
    projective_map,
)

FD_STEP = 1e-6
TANGENT_TOL = 1e-9

J = np.diag([-1.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True)
class PogorelovContext:
    """Projection center shared by the global and infinitesimal maps."""

    center: ProjectiveCenter

    @property
    def x0(self) -> MVector:
        return self.center.x0

    @property
    def eps(self) -> int:
        return self.center.eps

    @property
    def mu(self) -> int:
        return self.center.mu


@dataclass(frozen=True)
class DeformationField:
    """Velocity vectors attached to sample points of a surface.

    For sample points lying on a unit quadric the velocities must be
    tangent; points off the quadrics (flat-model samples) are free.
    """

    base: tuple
    velocity: tuple

    def __post_init__(self):
        if len(self.base) != len(self.velocity):
            raise GeometryError("base and velocity lengths differ")
        for p, v in zip(self.base, self.velocity):
            q = inner(p, p)
            if abs(abs(q) - 1.0) <= 1e-9:
                t = inner(p, v)
                if abs(t) > TANGENT_TOL * max(1.0, v.scale()) * max(1.0, p.scale()):
                    raise GeometryError(f"velocity not tangent: <p,v> = {t}")


def _check_tangent(x: MVector, v: MVector):
    t = inner(x, v)
    if abs(t) > TANGENT_TOL * max(1.0, x.scale()) * max(1.0, v.scale()):
        raise GeometryError(f"vector not tangent to the quadric: <x,v> = {t}")


def _reproject(x: MVector, mu: int) -> MVector:
    q = mu * inner(x, x)
    if q <= 0.0:
        raise GeometryError("cannot re-project onto the quadric")
    return x / math.sqrt(q)


def global_map(ctx: PogorelovContext, x: MVector, xp: MVector) -> tuple:
    """Pair map 2*(eps*x - <x,x0>x0, eps*xp - <xp,x0>x0) / <x+xp, x0>.

    On the diagonal x = xp this reduces to the projective map applied to
    both components, through the same floating-point operations.
    """
    x0 = ctx.x0
    e = float(ctx.eps)
    den = inner(x + xp, x0)
    if abs(den) < 1e-12:
        raise GeometryError("pair on horizon")
    a = 2.0 * (e * x - inner(x, x0) * x0) / den
    b = 2.0 * (e * xp - inner(xp, x0) * x0) / den
    return a, b


def infinitesimal_map(ctx: PogorelovContext, x: MVector, v: MVector) -> tuple:
    """Bundle map (phi(x), (eps*v - <v,x0>x0) / <x,x0>)."""
    _check_tangent(x, v)
    x0 = ctx.x0
    d = inner(x, x0)
    if abs(d) < 1e-12:
        raise GeometryError("point on projection horizon")
    e = float(ctx.eps)
    return projective_map(ctx.center, x), (e * v - inner(v, x0) * x0) / d


def norm_difference_residual(ctx: PogorelovContext, x: MVector, xp: MVector,
                             X: MVector, Xp: MVector,
                             step: float = FD_STEP) -> float:
    """Residual of the defining identity of the global map.

    Checks  1/4 <x+x',x0>^2 (|d1|^2 - |d2|^2) = |X|^2 - |X'|^2  where
    (d1, d2) is the differential of the pair map in direction (X, X'),
    computed by central finite differences along re-projected curves.
    """
    _check_tangent(x, X)
    _check_tangent(xp, Xp)
    mu = ctx.mu
    h = step

    def curve(p: MVector, w: MVector, t: float) -> MVector:
        return _reproject(p + t * w, mu)

    a_plus, b_plus = global_map(ctx, curve(x, X, h), curve(xp, Xp, h))
    a_minus, b_minus = global_map(ctx, curve(x, X, -h), curve(xp, Xp, -h))
    d1 = (a_plus - a_minus) / (2.0 * h)
    d2 = (b_plus - b_minus) / (2.0 * h)

    den = inner(x + xp, ctx.x0)
    lhs = 0.25 * den * den * (inner(d1, d1) - inner(d2, d2))
    rhs = inner(X, X) - inner(Xp, Xp)
    return abs(lhs - rhs)


EdgeGeometry = Literal["hyperbolic", "desitter", "flat"]


def _distance_rate(p: MVector, q: MVector, vp: MVector, vq: MVector,
                   geometry: EdgeGeometry) -> float:
    """d/dt at 0 of the distance between p + t vp and q + t vq."""
    if geometry == "flat":
        d = p - q
        ll = inner(d, d)
        if ll <= 1e-18:
            raise GeometryError("degenerate (zero-length) edge")
        return inner(d, vp - vq) / math.sqrt(ll)
    cdot = inner(vp, q) + inner(p, vq)
    c = inner(p, q)
    if geometry == "hyperbolic":
        u = -c
        if u <= 1.0 + 1e-14:
            raise GeometryError("degenerate (zero-length) edge")
        return -cdot / math.sqrt(u * u - 1.0)
    if geometry == "desitter":
        if abs(c) >= 1.0 - 1e-14:
            raise GeometryError("degenerate (zero-length or antipodal) edge")
        return -cdot / math.sqrt(1.0 - c * c)
    raise ValueError(f"unknown geometry {geometry!r}")


def discrete_lie_residual(field: DeformationField,
                          edges: Iterable[tuple],
                          geometry: EdgeGeometry) -> float:
    """Max first variation of edge lengths under the deformation field.

    Zero (up to tolerance) is what "isometric deformation" means for a
    polyhedral surface sampled at its vertices.
    """
    base, vel = field.base, field.velocity
    worst = 0.0
    count = 0
    for i, j in edges:
        rate = _distance_rate(base[i], base[j], vel[i], vel[j], geometry)
        worst = max(worst, abs(rate))
        count += 1
    if count == 0:
        raise GeometryError("no edges supplied")
    return worst


def pushforward_field(ctx: PogorelovContext, field: DeformationField) -> DeformationField:
    """Apply the infinitesimal map to every sample of a deformation field."""
    images = []
    velocities = []
    for p, v in zip(field.base, field.velocity):
        y, w = infinitesimal_map(ctx, p, v)
        images.append(y)
        velocities.append(w)
    return DeformationField(tuple(images), tuple(velocities))


# -- isotropy group of the center ------------------------------------------

def isotropy_generator(rng: np.random.Generator, x0: MVector) -> np.ndarray:
    """Random element of the Lie algebra of isometries fixing x0."""
    x = x0.array()
    a = rng.normal(size=4)
    b = rng.normal(size=4)
    nx = x / np.linalg.norm(x)
    a -= (a @ nx) * nx
    b -= (b @ nx) * nx
    S = np.outer(a, b) - np.outer(b, a)
    return J @ S


def isotropy_element(rng: np.random.Generator, x0: MVector,
                     scale: float = 0.5) -> np.ndarray:
    """Random isometry matrix fixing x0, via the exponential map."""
    A = isotropy_generator(rng, x0)
    return expm(scale * A)


def apply_matrix(m: np.ndarray, v: MVector) -> MVector:
    return MVector.from_array(m @ v.array())


def _hyperplane_basis(x0: MVector) -> list:
    """Minkowski-orthonormal basis of the hyperplane orthogonal to x0."""
    e = float(inner(x0, x0))
    basis = []
    for seed in (MVector(1, 0, 0, 0), MVector(0, 1, 0, 0),
                 MVector(0, 0, 1, 0), MVector(0, 0, 0, 1)):
        v = seed - (inner(seed, x0) / e) * x0
        for b in basis:
            v = v - (inner(v, b) / inner(b, b)) * b
        q = inner(v, v)
        if abs(q) > 1e-6:
            basis.append(v / math.sqrt(abs(q)))
        if len(basis) == 3:
            break
    return basis


def _model_probe_points(center: ProjectiveCenter) -> list:
    """Four affinely independent points of the flat model hyperplane that
    lie in the domain of the inverse projective map."""
    basis = _hyperplane_basis(center.x0)
    eps, mu = center.eps, center.mu
    zero = MVector(0, 0, 0, 0)
    if mu == eps:
        pts = [zero] + [0.3 * b for b in basis]
    else:
        # need <y,y> on the far side of -eps; walk along a basis vector
        # whose square has the sign of mu
        anchor = next(b for b in basis if inner(b, b) * mu > 0)
        others = [b for b in basis if b is not anchor]
        y0 = 1.5 * anchor
        pts = [y0, -1.5 * anchor, y0 + 0.3 * others[0], y0 + 0.3 * others[1]]
    for y in pts:
        projective_inverse(center, y)  # raises if the probe fell outside
    return pts


def conjugated_isometry_map(ctx: PogorelovContext, m: np.ndarray):
    """The flat-model isometry phi o rho o phi^{-1}, extended affinely.

    The composition is only defined pointwise on the image of the
    projective map, but as a flat isometry it is affine; this builds the
    affine extension from four probe points so it can be applied to any
    point of the target space.
    """
    pts = _model_probe_points(ctx.center)
    images = [projective_map(ctx.center,
                             apply_matrix(m, projective_inverse(ctx.center, y)))
              for y in pts]
    y0, im0 = pts[0], images[0]
    D = np.stack([(p - y0).array() for p in pts[1:]], axis=1)
    E = np.stack([(q - im0).array() for q in images[1:]], axis=1)
    L = E @ np.linalg.pinv(D)

    def apply(y: MVector) -> MVector:
        return im0 + MVector.from_array(L @ (y - y0).array())

    return apply


# -- supporting hyperplane search -------------------------------------------

def _axis_ring_directions() -> np.ndarray:
    """Deterministic directions hugging the coordinate axes.

    Supporting sets are often thin slivers near an axis; the coarse
    icosphere misses them, so add small-aperture rings around all six
    signed axes.
    """
    out = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            e = np.zeros(3)
            e[axis] = sign
            out.append(e.copy())
            others = [(axis + 1) % 3, (axis + 2) % 3]
            for aperture in (0.15, 0.3, 0.45, 0.7):
                for k in range(8):
                    chi = 2.0 * math.pi * k / 8.0
                    v = math.cos(aperture) * e
                    v[others[0]] += math.sin(aperture) * math.cos(chi)
                    v[others[1]] += math.sin(aperture) * math.sin(chi)
                    out.append(v / np.linalg.norm(v))
    return np.array(out)


def _icosphere_directions() -> np.ndarray:
    """62 fixed unit directions: icosahedron vertices, edge and face points."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts.append((0.0, a, b))
            verts.append((a, b, 0.0))
            verts.append((b, 0.0, a))
    v = np.array(verts)
    v /= np.linalg.norm(v, axis=1)[:, None]
    pts = {tuple(np.round(x, 12)) for x in v}
    # edge midpoints and face centers; neighbors have dot product ~0.447
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            if v[i] @ v[j] > 0.4:
                m = v[i] + v[j]
                m /= np.linalg.norm(m)
                pts.add(tuple(np.round(m, 12)))
                for k in range(j + 1, len(v)):
                    if v[i] @ v[k] > 0.4 and v[j] @ v[k] > 0.4:
                        f = v[i] + v[j] + v[k]
                        f /= np.linalg.norm(f)
                        pts.add(tuple(np.round(f, 12)))
    return np.array(sorted(pts))


_DIRECTIONS = np.vstack([_icosphere_directions(), _axis_ring_directions()])
_BOOSTS = np.linspace(-3.0, 3.0, 25)


def _slack(w: MVector, vertices: Sequence[MVector]) -> float:
    return min(inner(u, w) for u in vertices)


def supporting_center(dual_vertices: Sequence[DSPoint]) -> MVector:
    """Spacelike unit w with <u, w> > 0 for every dual vertex u.

    Searches a fixed grid of spacelike directions plus the input vertices
    themselves, then refines the best candidate with a deterministic
    shrinking perturbation schedule (16 geometric steps from half the
    slack).  Failure to find a strictly positive slack raises, which
    signals an invalid input set.
    """
    verts = [p.v for p in dual_vertices]
    if not verts:
        raise GeometryError("no vertices supplied")

    best: MVector | None = None
    best_slack = 0.0

    def consider(cand: MVector):
        nonlocal best, best_slack
        q = inner(cand, cand)
        if q <= 1e-12:
            return
        w = cand / math.sqrt(q)
        s = _slack(w, verts)
        if s > best_slack:
            best, best_slack = w, s

    for u in verts:
        consider(u)
    consider(MVector.from_array(np.mean([u.array() for u in verts], axis=0)))
    for m in _DIRECTIONS:
        for t in _BOOSTS:
            consider(MVector(math.sinh(t), *(math.cosh(t) * m)))

    if best is None or best_slack <= 0.0:
        raise GeometryError("no supporting hyperplane")

    # shrinking local refinement around the best grid point
    for k in range(16):
        step = (best_slack / 2.0) * (0.5 ** k)
        improved = False
        for d in np.vstack([np.eye(4), -np.eye(4)]):
            cand = best + MVector.from_array(step * d)
            q = inner(cand, cand)
            if q <= 1e-12:
                continue
            w = cand / math.sqrt(q)
            s = _slack(w, verts)
            if s > best_slack:
                best, best_slack = w, s
                improved = True
        if not improved:
            continue
    return best


# -- seeded self-test --------------------------------------------------------

def selftest(seed: int = 0, samples: int = 100) -> dict:
    """Residual battery behind the ``pogorelov-selftest`` CLI command.

    Returns max residuals over seeded samples for: projective round trips,
    the norm-difference identity, isometry commutation, and the
    finite-difference consistency of the infinitesimal map.
    """
    from hyperpoly.sampling import domain_point, tangent_at

    rng = np.random.default_rng(seed)
    timelike = MVector(1, 0, 0, 0)
    spacelike = MVector(0, 0, 0, 1)
    centers = {
        "timelike_hyperbolic": ProjectiveCenter(timelike, mu=-1),
        "timelike_desitter": ProjectiveCenter(timelike, mu=+1),
        "spacelike_hyperbolic": ProjectiveCenter(spacelike, mu=-1),
        "spacelike_desitter": ProjectiveCenter(spacelike, mu=+1),
    }

    report: dict = {"seed": seed, "samples": samples}

    round_trip = {}
    for name, c in centers.items():
        worst = 0.0
        for _ in range(samples):
            x = domain_point(rng, c)
            y = projective_map(c, x)
            back = projective_inverse(c, y)
            worst = max(worst, max(abs(t) for t in (back - x)))
        round_trip[name] = worst
    report["round_trip_max"] = round_trip

    norm_diff = {}
    for name, c in centers.items():
        ctx = PogorelovContext(c)
        worst = 0.0
        for _ in range(samples):
            x = domain_point(rng, c, margin=0.2)
            xp = domain_point(rng, c, margin=0.2)
            X = tangent_at(rng, x, c.mu)
            Xp = tangent_at(rng, xp, c.mu)
            worst = max(worst, norm_difference_residual(ctx, x, xp, X, Xp))
        norm_diff[name] = worst
    report["norm_difference_max"] = norm_diff

    commute = {}
    for name, c in centers.items():
        ctx = PogorelovContext(c)
        worst = 0.0
        for _ in range(max(20, samples // 5)):
            rho = isotropy_element(rng, c.x0)
            tilde = conjugated_isometry_map(ctx, rho)
            x = domain_point(rng, c)
            xp = domain_point(rng, c)
            if abs(inner(x + xp, c.x0)) < 1e-3:
                continue
            a, b = global_map(ctx, x, xp)
            ra, rb = global_map(ctx, apply_matrix(rho, x), apply_matrix(rho, xp))
            worst = max(worst, max(abs(t) for t in (ra - tilde(a))),
                        max(abs(t) for t in (rb - tilde(b))))
        commute[name] = worst
    report["commutation_max"] = commute

    infin = {}
    for name, c in centers.items():
        ctx = PogorelovContext(c)
        worst = 0.0
        h = FD_STEP
        for _ in range(samples):
            x = domain_point(rng, c, margin=0.2)
            v = tangent_at(rng, x, c.mu)
            _, w = infinitesimal_map(ctx, x, v)
            # derivative of the first pair component along the curve in slot 1
            xp_h = _reproject(x + h * v, c.mu)
            xm_h = _reproject(x - h * v, c.mu)
            a_p, _ = global_map(ctx, xp_h, x)
            a_m, _ = global_map(ctx, xm_h, x)
            deriv = (a_p - a_m) / (2.0 * h)
            d = inner(x, c.x0)
            corr = (inner(v, c.x0) / (2.0 * d)) * projective_map(c, x)
            resid = max(abs(t) for t in (deriv + corr - w))
            worst = max(worst, resid)
        infin[name] = worst
    report["infinitesimal_consistency_max"] = infin
    return report
