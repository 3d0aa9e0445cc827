"""Pure-Python/numpy versions of the compiled kernels in ``_core.pyx``."""

import numpy as np


def permanent(a):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    parity = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if (gray >> j) & 1:
            rowsum += a[:, j]
        else:
            rowsum -= a[:, j]
        parity ^= 1
        prod = np.prod(rowsum)
        total = total - prod if parity else total + prod
    return complex(-total if n % 2 else total)


def jacobi_eigh(a_in, tol, max_sweeps):
    a = np.array(a_in, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    converged = False
    sweep = 0
    for sweep in range(max_sweeps + 1):
        off = np.sum(np.abs(np.triu(a, 1)) ** 2)
        if np.sqrt(2.0 * off) <= tol * fro:
            converged = True
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = abs(a[p, q])
                if mag == 0.0:
                    continue
                phase = a[p, q] / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                jpq = s * phase
                jqp = -s * np.conj(phase)
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp + jqp * colq
                a[:, q] = jpq * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp + np.conj(jqp) * rowq
                a[q, :] = np.conj(jpq) * rowp + c * rowq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp + jqp * vq
                v[:, q] = jpq * vp + c * vq
    return np.real(np.diag(a)).copy(), v, (sweep if converged else -1)


def substitution_blocks(occ, up, parent, pmode, offsets, v):
    n_levels = len(offsets) - 1
    sizes = np.diff(offsets)
    starts = np.concatenate([[0], np.cumsum(sizes * sizes)]).astype(np.int64)
    out = np.zeros(starts[-1], dtype=np.complex128)
    out[0] = 1.0
    n = occ.shape[1]
    prev = np.ones((1, 1), dtype=np.complex128)
    for lvl in range(1, n_levels):
        off, poff = offsets[lvl], offsets[lvl - 1]
        size = sizes[lvl]
        block = np.zeros((size, size), dtype=np.complex128)
        betas = np.arange(poff, off)
        for col in range(off, offsets[lvl + 1]):
            j = pmode[col]
            pc = prev[:, parent[col] - poff]
            new = np.zeros(size, dtype=np.complex128)
            for i in range(n):
                if v[i, j] == 0:
                    continue
                new[up[betas, i] - off] += v[i, j] * np.sqrt(occ[betas, i] + 1.0) * pc
            block[:, col - off] = new / np.sqrt(occ[col, j])
        out[starts[lvl]:starts[lvl + 1]] = block.ravel()
        prev = block
    return out, starts
