# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate-application kernel.

In-place left-multiplication of a (2^n, 2^n) complex matrix by a one- or
two-qubit gate embedded at the given qubit positions.  Qubit 0 is the most
significant row-index bit, matching kernels._pyref.apply_gate.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_gate(cnp.complex128_t[:, ::1] matrix, cnp.complex128_t[:, ::1] gate,
               qubits, int n):
    cdef Py_ssize_t dim = matrix.shape[0]
    cdef int k1, k2
    if len(qubits) == 1:
        k1 = qubits[0]
        _apply_1q(matrix, gate, n - 1 - k1, dim)
    else:
        k1 = qubits[0]
        k2 = qubits[1]
        _apply_2q(matrix, gate, n - 1 - k1, n - 1 - k2, dim)


cdef void _apply_1q(cnp.complex128_t[:, ::1] a, cnp.complex128_t[:, ::1] g,
                    int p, Py_ssize_t dim) noexcept:
    cdef Py_ssize_t mask = 1 << p
    cdef Py_ssize_t low = mask - 1
    cdef Py_ssize_t half = dim >> 1
    cdef Py_ssize_t idx, i0, i1, j
    cdef double complex g00 = g[0, 0], g01 = g[0, 1], g10 = g[1, 0], g11 = g[1, 1]
    cdef double complex a0, a1
    for idx in range(half):
        i0 = ((idx & ~low) << 1) | (idx & low)
        i1 = i0 | mask
        for j in range(dim):
            a0 = a[i0, j]
            a1 = a[i1, j]
            a[i0, j] = g00 * a0 + g01 * a1
            a[i1, j] = g10 * a0 + g11 * a1


cdef void _apply_2q(cnp.complex128_t[:, ::1] a, cnp.complex128_t[:, ::1] g,
                    int p1, int p2, Py_ssize_t dim) noexcept:
    cdef Py_ssize_t m1 = 1 << p1
    cdef Py_ssize_t m2 = 1 << p2
    cdef Py_ssize_t quarter = dim >> 2
    cdef Py_ssize_t pl, ph
    if p1 < p2:
        pl = p1
        ph = p2
    else:
        pl = p2
        ph = p1
    cdef Py_ssize_t lowl = (1 << pl) - 1
    cdef Py_ssize_t lowh = (1 << (ph - 1)) - 1
    cdef Py_ssize_t idx, base, j, r, c
    cdef Py_ssize_t rows[4]
    cdef double complex v[4]
    cdef double complex acc
    for idx in range(quarter):
        base = idx & lowl
        base |= (idx & (lowh & ~lowl)) << 1
        base |= (idx & ~lowh) << 2
        rows[0] = base
        rows[1] = base | m2
        rows[2] = base | m1
        rows[3] = base | m1 | m2
        for j in range(dim):
            for r in range(4):
                v[r] = a[rows[r], j]
            for r in range(4):
                acc = 0
                for c in range(4):
                    acc = acc + g[r, c] * v[c]
                a[rows[r], j] = acc
