# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled geodesic development kernel.

Same step loop as ``hyperpoly._trace_py`` (which documents the
conventions); this version runs the per-crossing development in C for the
falsifier's shooting budgets.  Termination codes, crossing topology and
wedge data match the pure-Python kernel exactly; float fields may differ
by rounding noise far below every tolerance in use (the parity test pins
them to 1e-12).
"""

from libc.math cimport sin, cos, acos, atan2, sqrt

cdef double PI = 3.141592653589793238462643383279502884
cdef double TAU_MIN = 1e-11

cdef int T_MAXLEN = 0
cdef int T_CONE = 1
cdef int T_CLOSED = 2
cdef int T_BOUNDARY = 3
cdef int T_SMOOTH = 4
cdef int T_CAP = 5


cdef inline double _dot(double* a, double* b) nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef inline void _cross(double* a, double* b, double* out) nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef inline void _unit(double* a) nogil:
    cdef double n = sqrt(_dot(a, a))
    a[0] /= n
    a[1] /= n
    a[2] /= n


cdef inline double _acos_c(double x) nogil:
    if x > 1.0:
        x = 1.0
    if x < -1.0:
        x = -1.0
    return acos(x)


cdef inline void _place_initial(double[:, ::1] sides, double[:, ::1] angles,
                                int tri, int k, double* verts) nogil:
    cdef double c = sides[tri, (k + 2) % 3]
    cdef double b = sides[tri, (k + 1) % 3]
    cdef double A = angles[tri, k]
    verts[3 * k] = 0.0
    verts[3 * k + 1] = 0.0
    verts[3 * k + 2] = 1.0
    cdef int k1 = (k + 1) % 3
    verts[3 * k1] = sin(c)
    verts[3 * k1 + 1] = 0.0
    verts[3 * k1 + 2] = cos(c)
    cdef int k2 = (k + 2) % 3
    verts[3 * k2] = sin(b) * cos(A)
    verts[3 * k2 + 1] = sin(b) * sin(A)
    verts[3 * k2 + 2] = cos(b)


cdef inline void _develop_neighbor(double[:, ::1] sides, double* verts,
                                   int s_exit, int t2, int s2,
                                   double* out) nogil:
    cdef double* A3 = verts + 3 * ((s_exit + 2) % 3)
    cdef double* B3 = verts + 3 * ((s_exit + 1) % 3)
    cdef double* off_old = verts + 3 * s_exit
    cdef double cos1 = cos(sides[t2, (s2 + 2) % 3])
    cdef double cos2 = cos(sides[t2, (s2 + 1) % 3])
    cdef double c = _dot(A3, B3)
    cdef double den = 1.0 - c * c
    cdef double alpha = (cos1 - c * cos2) / den
    cdef double beta = (cos2 - c * cos1) / den
    cdef double C3[3]
    _cross(A3, B3, C3)
    cdef double r2 = alpha * alpha + beta * beta + 2.0 * alpha * beta * c
    cdef double g2 = (1.0 - r2) / den
    if g2 < 0.0:
        g2 = 0.0
    cdef double gamma = sqrt(g2)
    if _dot(off_old, C3) > 0.0:
        gamma = -gamma
    cdef double X[3]
    cdef int i
    for i in range(3):
        X[i] = alpha * A3[i] + beta * B3[i] + gamma * C3[i]
    _unit(X)
    for i in range(3):
        out[3 * s2 + i] = X[i]
        out[3 * ((s2 + 1) % 3) + i] = A3[i]
        out[3 * ((s2 + 2) % 3) + i] = B3[i]


cdef inline void _record(int kt_e, int ks_e, int kt_n, int ks_n,
                         double* P_exit, double* Q_exit, double* x, double* N,
                         int* rec_t, int* rec_s, double* rec_pos,
                         double* rec_ang) nogil:
    cdef double* P
    cdef double* Q
    if kt_e < kt_n or (kt_e == kt_n and ks_e <= ks_n):
        rec_t[0] = kt_e
        rec_s[0] = ks_e
        P = P_exit
        Q = Q_exit
    else:
        rec_t[0] = kt_n
        rec_s[0] = ks_n
        P = Q_exit
        Q = P_exit
    rec_pos[0] = _acos_c(_dot(x, P))
    cdef double m[3]
    cdef double tang[3]
    cdef double D[3]
    cdef double w[3]
    _cross(P, Q, m)
    _unit(m)
    _cross(m, x, tang)
    _unit(tang)
    _cross(N, x, D)
    _cross(tang, D, w)
    rec_ang[0] = atan2(_dot(w, x), _dot(tang, D))


def run_trace(double[:, ::1] sides, double[:, ::1] angles,
              int[:, ::1] glue_tri, int[:, ::1] glue_side,
              int[:, ::1] corner_class, int[:] class_kind,
              int start_mode, int start_tri, int start_index,
              double start_pos, double start_angle, double max_length,
              int max_crossings, double cone_tol, double closure_pos_tol,
              double closure_ang_tol, bint record_path):
    """Port of ``hyperpoly._trace_py.run_trace``; same contract."""
    cdef double verts[9]
    cdef double nbr[9]
    cdef double p[3]
    cdef double d[3]
    cdef double N[3]
    cdef double m[3]
    cdef double tP[3]
    cdef double tmp[3]
    cdef double axis[3]
    cdef double x[3]
    cdef double best_x[3]
    cdef double r0[3]
    cdef double back[3]
    cdef double w3[3]
    cdef int t = start_tri
    cdef int s, i, sgn_i, corner, s_exit, gt, gs, k, entry_side
    cdef double total = 0.0
    cdef double entry_pos, L, nn, phi, tau, best_tau, best_phi, rem
    cdef double ca, sa, beta, dist, cos_b, sin_b
    cdef bint have_best, have_start_rec = False
    cdef int start_rec_t = -1, start_rec_s = -1
    cdef double start_rec_pos = 0.0, start_rec_ang = 0.0
    cdef int rec_t, rec_s
    cdef double rec_pos, rec_ang
    cdef double sign

    segments = []

    if start_mode == 0:
        s = start_index
        _place_initial(sides, angles, t, (s + 1) % 3, verts)
        # P = verts[s+1], Q = verts[s+2]
        _cross(verts + 3 * ((s + 1) % 3), verts + 3 * ((s + 2) % 3), m)
        _unit(m)
        _cross(m, verts + 3 * ((s + 1) % 3), tP)
        ca = cos(start_pos)
        sa = sin(start_pos)
        for i in range(3):
            p[i] = ca * verts[3 * ((s + 1) % 3) + i] + sa * tP[i]
        _unit(p)
        _cross(m, p, tmp)
        _unit(tmp)
        _cross(p, tmp, tP)  # p x tangent
        ca = cos(start_angle)
        sa = sin(start_angle)
        for i in range(3):
            d[i] = ca * tmp[i] + sa * tP[i]
        _cross(p, d, N)
        _unit(N)
        entry_side = s
        entry_pos = start_pos
        gt = glue_tri[t, s]
        gs = glue_side[t, s]
        if gt >= 0:
            _record(gt, gs, t, s,
                    verts + 3 * ((s + 2) % 3), verts + 3 * ((s + 1) % 3),
                    p, N, &start_rec_t, &start_rec_s, &start_rec_pos,
                    &start_rec_ang)
            have_start_rec = True
    else:
        k = start_index
        _place_initial(sides, angles, t, k, verts)
        p[0] = 0.0
        p[1] = 0.0
        p[2] = 1.0
        d[0] = cos(start_angle)
        d[1] = sin(start_angle)
        d[2] = 0.0
        _cross(p, d, N)
        _unit(N)
        entry_side = -1
        entry_pos = float("nan")

    cdef int step
    for step in range(max_crossings):
        _cross(N, p, d)
        have_best = False
        best_tau = 0.0
        best_phi = 0.0
        s_exit = -1
        for s in range(3):
            if s == entry_side:
                continue
            L = sides[t, s]
            _cross(verts + 3 * ((s + 1) % 3), verts + 3 * ((s + 2) % 3), m)
            _unit(m)
            _cross(N, m, axis)
            nn = sqrt(_dot(axis, axis))
            if nn < 1e-15:
                continue
            for i in range(3):
                axis[i] /= nn
            _cross(m, verts + 3 * ((s + 1) % 3), tP)
            _unit(tP)
            for sgn_i in range(2):
                sign = 1.0 if sgn_i == 0 else -1.0
                for i in range(3):
                    x[i] = sign * axis[i]
                phi = atan2(_dot(x, tP), _dot(x, verts + 3 * ((s + 1) % 3)))
                if phi < -1e-9 or phi > L + 1e-9:
                    continue
                tau = atan2(_dot(x, d), _dot(x, p))
                if tau <= TAU_MIN:
                    tau += 2.0 * PI
                if tau <= TAU_MIN:
                    continue
                if (not have_best) or tau < best_tau:
                    have_best = True
                    best_tau = tau
                    best_phi = phi
                    s_exit = s
                    for i in range(3):
                        best_x[i] = x[i]
        if not have_best:
            return (T_CAP, total, t, -1, segments, float("nan"))
        if total + best_tau > max_length:
            rem = max_length - total
            if record_path:
                segments.append((t, entry_side, entry_pos, -1, float("nan"),
                                 rem))
            return (T_MAXLEN, max_length, t, -1, segments, float("nan"))
        total += best_tau
        if record_path:
            segments.append((t, entry_side, entry_pos, s_exit, best_phi,
                             best_tau))

        L = sides[t, s_exit]
        for sgn_i in range(2):
            if sgn_i == 0:
                corner = (s_exit + 1) % 3
                dist = best_phi
            else:
                corner = (s_exit + 2) % 3
                dist = L - best_phi
            if dist < 0.0:
                dist = -dist
            if dist <= cone_tol:
                # arrival wedge angle at the corner
                for i in range(3):
                    tmp[i] = verts[3 * ((corner + 1) % 3) + i]
                ca = _dot(tmp, verts + 3 * corner)
                for i in range(3):
                    r0[i] = tmp[i] - ca * verts[3 * corner + i]
                _unit(r0)
                _cross(N, verts + 3 * corner, tmp)
                for i in range(3):
                    back[i] = -tmp[i]
                _cross(r0, back, w3)
                sin_b = _dot(w3, verts + 3 * corner)
                cos_b = _dot(r0, back)
                beta = atan2(sin_b, cos_b)
                if beta < 0.0:
                    beta += 2.0 * PI
                if beta > 2.0 * PI - 1e-6:
                    beta = 0.0
                k = class_kind[corner_class[t, corner]]
                if k == 1:
                    return (T_CONE, total, t, corner, segments, beta)
                return (T_SMOOTH, total, t, corner, segments, beta)

        gt = glue_tri[t, s_exit]
        gs = glue_side[t, s_exit]
        if gt < 0:
            return (T_BOUNDARY, total, t, s_exit, segments, best_phi)

        _record(t, s_exit, gt, gs,
                verts + 3 * ((s_exit + 1) % 3), verts + 3 * ((s_exit + 2) % 3),
                best_x, N, &rec_t, &rec_s, &rec_pos, &rec_ang)
        if have_start_rec:
            if (rec_t == start_rec_t and rec_s == start_rec_s
                    and (rec_pos - start_rec_pos if rec_pos > start_rec_pos
                         else start_rec_pos - rec_pos) <= closure_pos_tol
                    and (rec_ang - start_rec_ang if rec_ang > start_rec_ang
                         else start_rec_ang - rec_ang) <= closure_ang_tol):
                return (T_CLOSED, total, t, s_exit, segments, float("nan"))

        _develop_neighbor(sides, verts, s_exit, gt, gs, nbr)
        for i in range(3):
            tmp[i] = nbr[3 * 0 + i]
        for i in range(9):
            verts[i] = nbr[i]
        for s in range(3):
            _unit(verts + 3 * s)
        for i in range(3):
            p[i] = best_x[i]
        entry_side = gs
        entry_pos = sides[gt, gs] - best_phi
        t = gt

    return (T_CAP, total, t, -1, segments, float("nan"))
