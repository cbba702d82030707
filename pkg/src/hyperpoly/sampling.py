"""Seeded random points and tangents on the two unit quadrics.

Used by the Pogorelov self-test and by the property suites; everything is
driven by an explicit ``numpy.random.Generator`` so runs are reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from hyperpoly.minkowski import MVector, ProjectiveCenter, inner


def unit3(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def quadric_point(rng: np.random.Generator, mu: int, spread: float = 1.5) -> MVector:
    """Random point with <x,x> = mu; mu=-1 samples the upper sheet."""
    u = unit3(rng)
    r = rng.uniform(0.0, spread)
    if mu == -1:
        return MVector(math.cosh(r), *(math.sinh(r) * u))
    s = rng.uniform(-spread, spread)
    return MVector(math.sinh(s), *(math.cosh(s) * u))


def domain_point(rng: np.random.Generator, center: ProjectiveCenter,
                 spread: float = 1.5, max_tries: int = 256,
                 margin: float = 1e-6) -> MVector:
    """Random quadric point on the center's side, sgn<x,x0> = eps.

    ``margin`` keeps |<x,x0>| away from the projection horizon, which
    matters for finite-difference checks (the map blows up there).
    """
    eps = center.eps
    for _ in range(max_tries):
        x = quadric_point(rng, center.mu, spread)
        d = inner(x, center.x0)
        if d * eps > margin:
            return x
        if -d * eps > margin:
            # The antipode lies on the requested side of the horizon.
            return -x
    raise RuntimeError("failed to sample a point in the projection domain")


def tangent_at(rng: np.random.Generator, x: MVector, mu: int,
               scale: float = 1.0) -> MVector:
    """Random tangent vector at x: <x, v> = 0."""
    raw = MVector(*rng.normal(scale=scale, size=4))
    return raw - (inner(raw, x) / float(mu)) * x


def random_lorentz(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random orthochronous Lorentz matrix via the exponential map."""
    from scipy.linalg import expm

    S = rng.normal(size=(4, 4))
    S = S - S.T
    J = np.diag([-1.0, 1.0, 1.0, 1.0])
    return expm(scale * (J @ S))
