"""Pure-Python geodesic development kernel.

Traces a geodesic through a glued spherical-triangle complex by unrolling
triangles onto the round sphere: the developed geodesic is a single great
circle with fixed normal, only the triangle positions change.  The
compiled twin in ``_trace_cy`` implements the same step loop; the
import-time selection lives in ``hyperpoly.tracing``.

Termination codes: 0 length budget, 1 cone point, 2 closed up, 3 left the
surface through an unglued side, 4 smooth vertex, 5 crossing cap.
"""

from __future__ import annotations

import math

TAU_MIN = 1e-11

T_MAXLEN = 0
T_CONE = 1
T_CLOSED = 2
T_BOUNDARY = 3
T_SMOOTH = 4
T_CAP = 5


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _unit(a):
    n = math.sqrt(_dot(a, a))
    return (a[0] / n, a[1] / n, a[2] / n)


def _acos(x):
    return math.acos(max(-1.0, min(1.0, x)))


def _combo(ca, a, cb, b):
    return (ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2])


def _tangent_toward(base, target):
    d = _dot(target, base)
    return _unit(_combo(1.0, target, -d, base))


def _place_initial(sides, angles, tri, k):
    """Develop triangle ``tri`` with corner k at the pole (0,0,1), the side
    toward corner k+1 along azimuth zero, positively oriented."""
    c = sides[tri][(k + 2) % 3]   # arc k -> k+1
    b = sides[tri][(k + 1) % 3]   # arc k -> k+2
    A = angles[tri][k]
    verts = [None, None, None]
    verts[k] = (0.0, 0.0, 1.0)
    verts[(k + 1) % 3] = (math.sin(c), 0.0, math.cos(c))
    verts[(k + 2) % 3] = (math.sin(b) * math.cos(A),
                          math.sin(b) * math.sin(A),
                          math.cos(b))
    return verts


def _develop_neighbor(sides, verts, s_exit, t2, s2):
    """Vertex positions of the neighbor triangle glued across side s_exit.

    The gluing identifies the first endpoint of one side with the second of
    the other, so neighbor corner s2+1 sits at the exit side's second
    endpoint and s2+2 at its first; the off corner lands on the far side of
    the shared great circle.
    """
    A3 = verts[(s_exit + 2) % 3]   # becomes neighbor corner s2+1
    B3 = verts[(s_exit + 1) % 3]   # becomes neighbor corner s2+2
    off_old = verts[s_exit]
    cos1 = math.cos(sides[t2][(s2 + 2) % 3])  # arc s2 -> s2+1
    cos2 = math.cos(sides[t2][(s2 + 1) % 3])  # arc s2 -> s2+2
    c = _dot(A3, B3)
    den = 1.0 - c * c
    alpha = (cos1 - c * cos2) / den
    beta = (cos2 - c * cos1) / den
    C3 = _cross(A3, B3)
    r2 = alpha * alpha + beta * beta + 2.0 * alpha * beta * c
    gamma = math.sqrt(max(0.0, (1.0 - r2) / den))
    if _dot(off_old, C3) > 0.0:
        gamma = -gamma
    X = (alpha * A3[0] + beta * B3[0] + gamma * C3[0],
         alpha * A3[1] + beta * B3[1] + gamma * C3[1],
         alpha * A3[2] + beta * B3[2] + gamma * C3[2])
    W = [None, None, None]
    W[s2] = _unit(X)
    W[(s2 + 1) % 3] = A3
    W[(s2 + 2) % 3] = B3
    return W


def _crossing_record(key_exit, key_enter, P_exit, Q_exit, x, N):
    """Canonical (side, position, signed angle) of a crossing at x.

    The canonical side is the lexicographically smaller key of the glued
    pair; position runs from its first endpoint, the angle from its forward
    tangent to the geodesic direction.  The entering side's endpoints are
    the exiting side's reversed.
    """
    if key_exit <= key_enter:
        ct, cs = key_exit
        P, Q = P_exit, Q_exit
    else:
        ct, cs = key_enter
        P, Q = Q_exit, P_exit
    pos = _acos(_dot(x, P))
    m = _unit(_cross(P, Q))
    tang = _unit(_cross(m, x))
    D = _cross(N, x)
    sin_a = _dot(_cross(tang, D), x)
    cos_a = _dot(tang, D)
    return ct, cs, pos, math.atan2(sin_a, cos_a)


def run_trace(sides, angles, glue_tri, glue_side, corner_class, class_kind,
              start_mode, start_tri, start_index, start_pos, start_angle,
              max_length, max_crossings, cone_tol, closure_pos_tol,
              closure_ang_tol, record_path):
    """Trace one geodesic; see the module docstring for termination codes.

    start_mode 0: start on side ``start_index`` of ``start_tri`` at arc
    position ``start_pos`` from the side's first endpoint, entering at
    ``start_angle`` in (0, pi) from the side's forward tangent.
    start_mode 1: start at corner ``start_index``, heading ``start_angle``
    into the corner wedge, measured from the side toward corner+1.
    """
    t = start_tri
    segments = []
    total = 0.0

    if start_mode == 0:
        s = start_index
        verts = _place_initial(sides, angles, t, (s + 1) % 3)
        P = verts[(s + 1) % 3]
        Q = verts[(s + 2) % 3]
        m = _unit(_cross(P, Q))
        tP = _cross(m, P)
        p = _unit(_combo(math.cos(start_pos), P, math.sin(start_pos), tP))
        tang = _unit(_cross(m, p))
        pxt = _cross(p, tang)
        d = _combo(math.cos(start_angle), tang, math.sin(start_angle), pxt)
        N = _unit(_cross(p, d))
        entry_side = s
        entry_pos = start_pos
        gt = glue_tri[t][s]
        gs = glue_side[t][s]
        if gt >= 0:
            start_rec = _crossing_record((gt, gs), (t, s), Q, P, p, N)
        else:
            start_rec = None
    else:
        k = start_index
        verts = _place_initial(sides, angles, t, k)
        p = (0.0, 0.0, 1.0)
        d = (math.cos(start_angle), math.sin(start_angle), 0.0)
        N = _unit(_cross(p, d))
        entry_side = -1
        entry_pos = float("nan")
        start_rec = None

    for _ in range(max_crossings):
        d_vec = _cross(N, p)
        best_tau = None
        best = None
        for s in range(3):
            if s == entry_side:
                continue
            P = verts[(s + 1) % 3]
            Q = verts[(s + 2) % 3]
            L = sides[t][s]
            axis = _cross(N, _unit(_cross(P, Q)))
            nn = math.sqrt(_dot(axis, axis))
            if nn < 1e-15:
                continue  # geodesic runs along this side's circle
            axis = (axis[0] / nn, axis[1] / nn, axis[2] / nn)
            m = _unit(_cross(P, Q))
            tP = _unit(_cross(m, P))
            for sign in (1.0, -1.0):
                x = (sign * axis[0], sign * axis[1], sign * axis[2])
                phi = math.atan2(_dot(x, tP), _dot(x, P))
                if phi < -1e-9 or phi > L + 1e-9:
                    continue
                tau = math.atan2(_dot(x, d_vec), _dot(x, p))
                if tau <= TAU_MIN:
                    tau += 2.0 * math.pi
                if tau <= TAU_MIN:
                    continue
                if best_tau is None or tau < best_tau:
                    best_tau = tau
                    best = (s, x, phi)
        if best is None:
            return (T_CAP, total, t, -1, segments, float("nan"))
        s_exit, x, phi = best
        if total + best_tau > max_length:
            rem = max_length - total
            if record_path:
                segments.append((t, entry_side, entry_pos, -1, float("nan"),
                                 rem))
            return (T_MAXLEN, max_length, t, -1, segments, float("nan"))
        total += best_tau
        if record_path:
            segments.append((t, entry_side, entry_pos, s_exit, phi, best_tau))

        L = sides[t][s_exit]
        for corner, dist in (((s_exit + 1) % 3, phi),
                             ((s_exit + 2) % 3, L - phi)):
            if abs(dist) <= cone_tol:
                C = verts[corner]
                r0 = _tangent_toward(C, verts[(corner + 1) % 3])
                D = _cross(N, C)
                back = (-D[0], -D[1], -D[2])
                beta = math.atan2(_dot(_cross(r0, back), C), _dot(r0, back))
                if beta < 0.0:
                    beta += 2.0 * math.pi
                if beta > 2.0 * math.pi - 1e-6:
                    beta = 0.0  # arrival along the wedge's first ray
                kind = class_kind[corner_class[t][corner]]
                code = T_CONE if kind == 1 else T_SMOOTH
                return (code, total, t, corner, segments, beta)

        gt = glue_tri[t][s_exit]
        gs = glue_side[t][s_exit]
        if gt < 0:
            return (T_BOUNDARY, total, t, s_exit, segments, phi)

        Pe = verts[(s_exit + 1) % 3]
        Qe = verts[(s_exit + 2) % 3]
        rec = _crossing_record((t, s_exit), (gt, gs), Pe, Qe, x, N)
        if start_rec is not None:
            if (rec[0] == start_rec[0] and rec[1] == start_rec[1]
                    and abs(rec[2] - start_rec[2]) <= closure_pos_tol
                    and abs(rec[3] - start_rec[3]) <= closure_ang_tol):
                return (T_CLOSED, total, t, s_exit, segments, float("nan"))

        verts = _develop_neighbor(sides, verts, s_exit, gt, gs)
        verts = [_unit(v) for v in verts]
        p = x
        entry_side = gs
        entry_pos = sides[gt][gs] - phi
        t = gt

    return (T_CAP, total, t, -1, segments, float("nan"))
