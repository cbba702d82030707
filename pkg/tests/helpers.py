"""Shared independent oracles and constructions for the test suite."""

from __future__ import annotations

import math

import numpy as np

from hyperpoly.minkowski import MVector


def klein_cross_ratio_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Hyperbolic distance of two Klein-ball points via the cross ratio.

    The chord through a and b meets the unit sphere at P (behind a) and
    Q (beyond b); the distance is half the log of the cross ratio
    (|aQ| |bP|) / (|aP| |bQ|).  Independent of the hyperboloid formula.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.allclose(a, b):
        return 0.0
    d = b - a
    A = d @ d
    B = 2.0 * (a @ d)
    C = a @ a - 1.0
    disc = B * B - 4.0 * A * C
    if disc <= 0.0:
        raise ValueError("chord does not cross the unit sphere")
    t1 = (-B - math.sqrt(disc)) / (2.0 * A)
    t2 = (-B + math.sqrt(disc)) / (2.0 * A)
    P = a + t1 * d
    Q = a + t2 * d
    num = np.linalg.norm(a - Q) * np.linalg.norm(b - P)
    den = np.linalg.norm(a - P) * np.linalg.norm(b - Q)
    return 0.5 * abs(math.log(num / den))


def mv(*coords) -> MVector:
    return MVector(*[float(c) for c in coords])


def spatial(v: MVector) -> np.ndarray:
    return np.array([v.x1, v.x2, v.x3])
