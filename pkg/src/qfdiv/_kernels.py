"""Cyclic complex Jacobi eigensolver kernels.

Two implementations of the same rotation sequence:

* ``jacobi_loops`` -- scalar loops, compiled with numba when available;
* ``jacobi_numpy`` -- row/column updates as numpy slices.

Both take a Hermitian ``complex128`` array (which they overwrite) and return
``(eigenvalues, eigenvectors, sweeps, converged)`` with eigenvalues unsorted.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit


def _rotation_py(app, aqq, apq):
    """Return the 2x2 unitary ``J`` that zeroes ``apq`` in ``J^* A J``.

    ``J = diag(1, e^{-i phi}) @ [[c, s], [-s, c]]`` where ``apq = r e^{i phi}``.
    """
    r = abs(apq)
    ph = apq / r
    tau = (aqq - app) / (2.0 * r)
    if tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    phc = ph.conjugate()
    return c + 0j, s + 0j, -s * phc, c * phc


_rotation = njit(_rotation_py) if USE_NUMBA else _rotation_py


def _jacobi_loops(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j].real ** 2 + a[i, j].imag ** 2
    target = tol * math.sqrt(total)
    tiny = 1e-300
    sweeps = 0
    converged = False
    while sweeps <= max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if math.sqrt(off) <= target:
            converged = True
            break
        if sweeps == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tiny:
                    continue
                j00, j01, j10, j11 = _rotation(a[p, p].real, a[q, q].real, apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * j00 + akq * j10
                    a[k, q] = akp * j01 + akq * j11
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = j00.conjugate() * apk + j10.conjugate() * aqk
                    a[q, k] = j01.conjugate() * apk + j11.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * j00 + vkq * j10
                    v[k, q] = vkp * j01 + vkq * j11
        sweeps += 1
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, sweeps, converged


def jacobi_numpy(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    target = tol * np.linalg.norm(a)
    offmask = ~np.eye(n, dtype=bool)
    sweeps = 0
    converged = False
    while sweeps <= max_sweeps:
        if np.sqrt(np.sum(np.abs(a[offmask]) ** 2)) <= target:
            converged = True
            break
        if sweeps == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                j00, j01, j10, j11 = _rotation_py(a[p, p].real, a[q, q].real, apq)
                J = np.array([[j00, j01], [j10, j11]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ J
                a[idx, :] = J.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ J
        sweeps += 1
    return np.diag(a).real.copy(), v, sweeps, converged


jacobi_loops = njit(_jacobi_loops) if USE_NUMBA else _jacobi_loops


def jacobi(a, tol, max_sweeps):
    """Dispatch to the backend chosen at import time."""
    if USE_NUMBA:
        return jacobi_loops(a, tol, max_sweeps)
    return jacobi_numpy(a, tol, max_sweeps)
