"""Pure-Python maximum-likelihood iteration for a single qubit.

Mirrors ``_mle_core.pyx`` line for line; plain complex scalars are used
because numpy call overhead dominates at 2x2.
"""

import math

_FLOOR = 1e-300
_MAX_HALVINGS = 60
_SINGULAR = 1e-300


def _prob(r00, r01, r11, v0, v1):
    return (r00 * (v0.conjugate() * v0).real + r11 * (v1.conjugate() * v1).real
            + 2.0 * (v0.conjugate() * r01 * v1).real)


def _loglik(r00, r01, r11, vecs, counts):
    total = 0.0
    for (v0, v1), n in zip(vecs, counts):
        if n > 0:
            total += n * math.log(max(_prob(r00, r01, r11, v0, v1), _FLOOR))
    return total


def _step(r00, r01, r11, vecs, counts, ntot, t):
    # R = sum_j (f_j / p_j) |v_j><v_j| (Hermitian: q00, q01, q11), diluted
    # to A = I + t (R - I); t = 1 is the plain RrhoR step
    q00 = 0.0
    q11 = 0.0
    q01 = 0j
    for (v0, v1), n in zip(vecs, counts):
        if n > 0:
            w = (n / ntot) / max(_prob(r00, r01, r11, v0, v1), _FLOOR)
            q00 += w * (v0 * v0.conjugate()).real
            q11 += w * (v1 * v1.conjugate()).real
            q01 += w * v0 * v1.conjugate()
    q00 = 1.0 + t * (q00 - 1.0)
    q11 = 1.0 + t * (q11 - 1.0)
    q01 = t * q01
    q10 = q01.conjugate()
    r10 = r01.conjugate()
    # M = A rho
    m00 = q00 * r00 + q01 * r10
    m01 = q00 * r01 + q01 * r11
    m10 = q10 * r00 + q11 * r10
    m11 = q10 * r01 + q11 * r11
    # N = M A
    n00 = (m00 * q00 + m01 * q10).real
    n01 = m00 * q01 + m01 * q11
    n11 = (m10 * q01 + m11 * q11).real
    tr = n00 + n11
    return n00 / tr, n01 / tr, n11 / tr


def _newton(r00, r01, r11, vecs, counts, ll):
    """Backtracked Newton step on the Bloch vector, kept inside the ball.

    Returns ``(r00, r01, r11, loglik)`` or None when no improving step exists.
    """
    rx = 2.0 * r01.real
    ry = -2.0 * r01.imag
    rz = r00 - r11
    g0 = g1 = g2 = 0.0
    h00 = h01 = h02 = h11 = h12 = h22 = 0.0
    for (v0, v1), n in zip(vecs, counts):
        if n > 0:
            c = v0.conjugate() * v1
            s0 = 2.0 * c.real
            s1 = 2.0 * c.imag
            s2 = (v0.conjugate() * v0).real - (v1.conjugate() * v1).real
            p = 0.5 * (1.0 + s0 * rx + s1 * ry + s2 * rz)
            if p <= _FLOOR:
                return None
            w = n / (2.0 * p)
            g0 += w * s0
            g1 += w * s1
            g2 += w * s2
            h = n / (4.0 * p * p)
            h00 += h * s0 * s0
            h01 += h * s0 * s1
            h02 += h * s0 * s2
            h11 += h * s1 * s1
            h12 += h * s1 * s2
            h22 += h * s2 * s2
    # solve (-Hessian) d = g through the adjugate
    a00 = h11 * h22 - h12 * h12
    a01 = h02 * h12 - h01 * h22
    a02 = h01 * h12 - h02 * h11
    det = h00 * a00 + h01 * a01 + h02 * a02
    if abs(det) < _SINGULAR:
        return None
    a11 = h00 * h22 - h02 * h02
    a12 = h01 * h02 - h00 * h12
    a22 = h00 * h11 - h01 * h01
    d0 = (a00 * g0 + a01 * g1 + a02 * g2) / det
    d1 = (a01 * g0 + a11 * g1 + a12 * g2) / det
    d2 = (a02 * g0 + a12 * g1 + a22 * g2) / det
    alpha = 1.0
    for _ in range(_MAX_HALVINGS):
        x = rx + alpha * d0
        y = ry + alpha * d1
        z = rz + alpha * d2
        if x * x + y * y + z * z <= 1.0:
            s00 = 0.5 * (1.0 + z)
            s01 = complex(0.5 * x, -0.5 * y)
            s11 = 0.5 * (1.0 - z)
            ll_new = _loglik(s00, s01, s11, vecs, counts)
            if ll_new > ll:
                return s00, s01, s11, ll_new
        alpha *= 0.5
    return None


def rrho_mle(vecs, counts, tol=1e-10, max_iter=10_000):
    """Maximise ``sum_j n_j log <v_j|rho|v_j>`` over qubit density matrices.

    ``vecs`` is a sequence of projector vectors ``(v0, v1)`` and ``counts``
    the matching observed counts. Returns ``(rho, iterations, loglik,
    converged)`` with ``rho`` as ``((r00, r01), (r10, r11))`` nested tuples.

    Each iteration takes the RrhoR step (diluted towards the identity while
    it would lower the log-likelihood) and a safeguarded Newton step on the
    Bloch vector, keeping whichever ends higher. Near-pure optima make the
    bare fixed point crawl; the Newton candidate restores fast convergence
    there. Stops once an iteration gains less than ``tol``.
    """
    vecs = [(complex(v[0]), complex(v[1])) for v in vecs]
    counts = [float(n) for n in counts]
    ntot = sum(counts)
    r00, r01, r11 = 0.5, 0j, 0.5
    if ntot <= 0:
        return ((r00, r01), (r01.conjugate(), r11)), 0, 0.0, True
    ll = _loglik(r00, r01, r11, vecs, counts)
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        t = 1.0
        s00, s01, s11 = _step(r00, r01, r11, vecs, counts, ntot, t)
        ll_new = _loglik(s00, s01, s11, vecs, counts)
        halvings = 0
        while ll_new < ll and halvings < _MAX_HALVINGS:
            t *= 0.5
            s00, s01, s11 = _step(r00, r01, r11, vecs, counts, ntot, t)
            ll_new = _loglik(s00, s01, s11, vecs, counts)
            halvings += 1
        nt = _newton(r00, r01, r11, vecs, counts, ll)
        if nt is not None and nt[3] > ll_new:
            s00, s01, s11, ll_new = nt
        if ll_new < ll:
            converged = True
            break
        improvement = ll_new - ll
        r00, r01, r11, ll = s00, s01, s11, ll_new
        if improvement < tol:
            converged = True
            break
    return ((r00, r01), (r01.conjugate(), r11)), it, ll, converged
