# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Ryser permanent, cyclic complex Jacobi, level-block substitution.

Each function mirrors the pure-Python version in ``_pure.py`` argument for
argument; ``kernels.py`` picks one of the two at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def permanent(const double complex[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long k, gray, limit
    cdef double complex prod, total = 0
    cdef int parity = 0
    if n == 0:
        return 1.0 + 0.0j
    cdef double complex[::1] rowsum = np.zeros(n, dtype=np.complex128)
    limit = (<unsigned long long>1) << n
    gray = 0
    for k in range(1, limit):
        # column toggled by the Gray code step is the lowest set bit of k
        j = 0
        while not ((k >> j) & 1):
            j += 1
        gray ^= (<unsigned long long>1) << j
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] = rowsum[i] + a[i, j]
            parity ^= 1
        else:
            for i in range(n):
                rowsum[i] = rowsum[i] - a[i, j]
            parity ^= 1
        prod = 1
        for i in range(n):
            prod = prod * rowsum[i]
        if parity:
            total = total - prod
        else:
            total = total + prod
    if n % 2:
        total = -total
    return complex(total)


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(const double complex[:, ::1] a_in, double tol, int max_sweeps):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; sweeps == -1 means no convergence."""
    cdef Py_ssize_t n = a_in.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, fro, mag, tau, t, c, s
    cdef double complex phase, apk, aqk, akp, akq, jpq, jqp
    a_np = np.array(a_in, dtype=np.complex128, order="C")
    v_np = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_np
    cdef double complex[:, ::1] v = v_np

    fro = 0.0
    for p in range(n):
        for q in range(n):
            fro += cabs2(a[p, q])
    fro = sqrt(fro)

    cdef int converged = 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += cabs2(a[p, q])
        if sqrt(2.0 * off) <= tol * fro:
            converged = 1
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = sqrt(cabs2(a[p, q]))
                if mag == 0.0:
                    continue
                phase = a[p, q] / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                jpq = s * phase
                jqp = -s * phase.conjugate()
                # A <- A J
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp + jqp * akq
                    a[k, q] = jpq * akp + c * akq
                # A <- J^H A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + jqp.conjugate() * aqk
                    a[q, k] = jpq.conjugate() * apk + c * aqk
                a[p, q] = 0
                a[q, p] = 0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    akp = v[k, p]
                    akq = v[k, q]
                    v[k, p] = c * akp + jqp * akq
                    v[k, q] = jpq * akp + c * akq

    w = np.array([a_np[i, i].real for i in range(n)], dtype=np.float64)
    return w, v_np, (sweep if converged else -1)


def substitution_blocks(
    const cnp.int64_t[:, ::1] occ,
    const cnp.int64_t[:, ::1] up,
    const cnp.int64_t[::1] parent,
    const cnp.int64_t[::1] pmode,
    const cnp.int64_t[::1] offsets,
    const double complex[:, ::1] v,
):
    """Dense level blocks of the substitution operator, flattened row-major per level."""
    cdef Py_ssize_t n_levels = offsets.shape[0] - 1
    cdef Py_ssize_t n = occ.shape[1]
    cdef Py_ssize_t lvl, col, row, beta, i, size, psize, start, pstart, off, poff
    cdef cnp.int64_t j, target
    cdef double complex coef, pc
    cdef double scale

    starts_np = np.zeros(n_levels + 1, dtype=np.int64)
    for lvl in range(n_levels):
        size = offsets[lvl + 1] - offsets[lvl]
        starts_np[lvl + 1] = starts_np[lvl] + size * size
    cdef cnp.int64_t[::1] starts = starts_np
    out_np = np.zeros(starts_np[n_levels], dtype=np.complex128)
    cdef double complex[::1] out = out_np

    out[0] = 1.0
    for lvl in range(1, n_levels):
        off = offsets[lvl]
        poff = offsets[lvl - 1]
        size = offsets[lvl + 1] - off
        psize = off - poff
        start = starts[lvl]
        pstart = starts[lvl - 1]
        for col in range(off, offsets[lvl + 1]):
            j = pmode[col]
            scale = 1.0 / sqrt(<double>occ[col, j])
            for beta in range(poff, off):
                pc = out[pstart + (beta - poff) * psize + (parent[col] - poff)]
                if pc == 0:
                    continue
                for i in range(n):
                    coef = v[i, j]
                    if coef == 0:
                        continue
                    target = up[beta, i]
                    out[start + (target - off) * size + (col - off)] += (
                        coef * sqrt(<double>(occ[beta, i] + 1)) * pc * scale
                    )
    return out_np, starts_np
