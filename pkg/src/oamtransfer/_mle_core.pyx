# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled maximum-likelihood iteration for a single qubit.

Same algorithm and stopping rule as ``_mle_py.py``.
"""

from libc.math cimport fabs, log

cdef double _FLOOR = 1e-300
cdef int _MAX_HALVINGS = 60
cdef double _SINGULAR = 1e-300


cdef inline double _prob(double r00, double complex r01, double r11,
                         double complex v0, double complex v1) nogil:
    return (r00 * (v0.conjugate() * v0).real + r11 * (v1.conjugate() * v1).real
            + 2.0 * (v0.conjugate() * r01 * v1).real)


cdef double _loglik(double r00, double complex r01, double r11,
                    double complex[:, ::1] vecs, double[::1] counts) nogil:
    cdef double total = 0.0, p
    cdef Py_ssize_t j
    for j in range(counts.shape[0]):
        if counts[j] > 0:
            p = _prob(r00, r01, r11, vecs[j, 0], vecs[j, 1])
            if p < _FLOOR:
                p = _FLOOR
            total += counts[j] * log(p)
    return total


cdef void _step(double r00, double complex r01, double r11,
                double complex[:, ::1] vecs, double[::1] counts, double ntot,
                double t, double* o00, double complex* o01, double* o11) nogil:
    cdef double q00 = 0.0, q11 = 0.0, p, w, n00, n11, tr
    cdef double complex q01 = 0.0, q10, r10, v0, v1, m00, m01, m10, m11, n01
    cdef Py_ssize_t j
    for j in range(counts.shape[0]):
        if counts[j] > 0:
            v0 = vecs[j, 0]
            v1 = vecs[j, 1]
            p = _prob(r00, r01, r11, v0, v1)
            if p < _FLOOR:
                p = _FLOOR
            w = (counts[j] / ntot) / p
            q00 += w * (v0 * v0.conjugate()).real
            q11 += w * (v1 * v1.conjugate()).real
            q01 += w * v0 * v1.conjugate()
    q00 = 1.0 + t * (q00 - 1.0)
    q11 = 1.0 + t * (q11 - 1.0)
    q01 = t * q01
    q10 = q01.conjugate()
    r10 = r01.conjugate()
    m00 = q00 * r00 + q01 * r10
    m01 = q00 * r01 + q01 * r11
    m10 = q10 * r00 + q11 * r10
    m11 = q10 * r01 + q11 * r11
    n00 = (m00 * q00 + m01 * q10).real
    n01 = m00 * q01 + m01 * q11
    n11 = (m10 * q01 + m11 * q11).real
    tr = n00 + n11
    o00[0] = n00 / tr
    o01[0] = n01 / tr
    o11[0] = n11 / tr


cdef bint _newton(double r00, double complex r01, double r11,
                  double complex[:, ::1] vecs, double[::1] counts, double ll,
                  double* o00, double complex* o01, double* o11, double* oll) nogil:
    # Bloch-vector Newton step, backtracked into the ball; False if none improves
    cdef double rx = 2.0 * r01.real, ry = -2.0 * r01.imag, rz = r00 - r11
    cdef double g0 = 0.0, g1 = 0.0, g2 = 0.0
    cdef double h00 = 0.0, h01 = 0.0, h02 = 0.0, h11 = 0.0, h12 = 0.0, h22 = 0.0
    cdef double s0, s1, s2, p, w, h, det, a00, a01, a02, a11, a12, a22
    cdef double d0, d1, d2, alpha, x, y, z, s00, s11, ll_new
    cdef double complex c, v0, v1, s01
    cdef Py_ssize_t j
    cdef int k
    for j in range(counts.shape[0]):
        if counts[j] > 0:
            v0 = vecs[j, 0]
            v1 = vecs[j, 1]
            c = v0.conjugate() * v1
            s0 = 2.0 * c.real
            s1 = 2.0 * c.imag
            s2 = (v0.conjugate() * v0).real - (v1.conjugate() * v1).real
            p = 0.5 * (1.0 + s0 * rx + s1 * ry + s2 * rz)
            if p <= _FLOOR:
                return False
            w = counts[j] / (2.0 * p)
            g0 += w * s0
            g1 += w * s1
            g2 += w * s2
            h = counts[j] / (4.0 * p * p)
            h00 += h * s0 * s0
            h01 += h * s0 * s1
            h02 += h * s0 * s2
            h11 += h * s1 * s1
            h12 += h * s1 * s2
            h22 += h * s2 * s2
    a00 = h11 * h22 - h12 * h12
    a01 = h02 * h12 - h01 * h22
    a02 = h01 * h12 - h02 * h11
    det = h00 * a00 + h01 * a01 + h02 * a02
    if fabs(det) < _SINGULAR:
        return False
    a11 = h00 * h22 - h02 * h02
    a12 = h01 * h02 - h00 * h12
    a22 = h00 * h11 - h01 * h01
    d0 = (a00 * g0 + a01 * g1 + a02 * g2) / det
    d1 = (a01 * g0 + a11 * g1 + a12 * g2) / det
    d2 = (a02 * g0 + a12 * g1 + a22 * g2) / det
    alpha = 1.0
    for k in range(_MAX_HALVINGS):
        x = rx + alpha * d0
        y = ry + alpha * d1
        z = rz + alpha * d2
        if x * x + y * y + z * z <= 1.0:
            s00 = 0.5 * (1.0 + z)
            s01 = 0.5 * x + (-0.5 * y) * 1j
            s11 = 0.5 * (1.0 - z)
            ll_new = _loglik(s00, s01, s11, vecs, counts)
            if ll_new > ll:
                o00[0] = s00
                o01[0] = s01
                o11[0] = s11
                oll[0] = ll_new
                return True
        alpha *= 0.5
    return False


def rrho_mle(vecs, counts, double tol=1e-10, int max_iter=10000):
    """See ``_mle_py.rrho_mle``."""
    cdef double complex[:, ::1] v = _as_complex_2d(vecs)
    cdef double[::1] n = _as_double_1d(counts)
    cdef double ntot = 0.0
    cdef Py_ssize_t j
    for j in range(n.shape[0]):
        ntot += n[j]
    cdef double r00 = 0.5, r11 = 0.5, s00, s11, ll, ll_new, improvement, t
    cdef double u00, u11, ull
    cdef double complex r01 = 0.0, s01, u01
    cdef int it = 0, halvings
    cdef bint converged = False
    if ntot <= 0:
        return ((r00, r01), (r01.conjugate(), r11)), 0, 0.0, True
    with nogil:
        ll = _loglik(r00, r01, r11, v, n)
        while it < max_iter:
            it += 1
            t = 1.0
            _step(r00, r01, r11, v, n, ntot, t, &s00, &s01, &s11)
            ll_new = _loglik(s00, s01, s11, v, n)
            halvings = 0
            while ll_new < ll and halvings < _MAX_HALVINGS:
                t *= 0.5
                _step(r00, r01, r11, v, n, ntot, t, &s00, &s01, &s11)
                ll_new = _loglik(s00, s01, s11, v, n)
                halvings += 1
            if _newton(r00, r01, r11, v, n, ll, &u00, &u01, &u11, &ull) and ull > ll_new:
                s00 = u00
                s01 = u01
                s11 = u11
                ll_new = ull
            if ll_new < ll:
                converged = True
                break
            improvement = ll_new - ll
            r00 = s00
            r01 = s01
            r11 = s11
            ll = ll_new
            if improvement < tol:
                converged = True
                break
    return ((r00, r01), (r01.conjugate(), r11)), it, ll, converged


def _as_complex_2d(vecs):
    import numpy as np
    return np.ascontiguousarray(vecs, dtype=np.complex128).reshape(-1, 2)


def _as_double_1d(counts):
    import numpy as np
    return np.ascontiguousarray(counts, dtype=np.float64).ravel()
