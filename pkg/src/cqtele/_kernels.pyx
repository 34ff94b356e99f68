# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels. Same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef double DEGENERATE_TOL = 1e-14
cdef double INV_SQRT2 = 0.70710678118654752440

# rows: PhiPlus, PsiPlus, PhiMinus, PsiMinus over (m, a) index 2*m + a
cdef double BELL[4][4]
BELL[0][:] = [INV_SQRT2, 0.0, 0.0, INV_SQRT2]
BELL[1][:] = [0.0, INV_SQRT2, INV_SQRT2, 0.0]
BELL[2][:] = [INV_SQRT2, 0.0, 0.0, -INV_SQRT2]
BELL[3][:] = [0.0, INV_SQRT2, -INV_SQRT2, 0.0]

# channel amplitudes over (a, b, c) index 4*a + 2*b + c
cdef double XI[8]
XI[:] = [0.5, 0.0, 0.0, 0.5, 0.0, 0.5, 0.5, 0.0]


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline int pick(double* probs, int n, double u) nogil:
    cdef double acc = 0.0
    cdef int k
    for k in range(n):
        if probs[k] > DEGENERATE_TOL:
            acc += probs[k]
            if acc > u:
                return k
    for k in range(n - 1, -1, -1):
        if probs[k] > DEGENERATE_TOL:
            return k
    return n - 1


def teleport_batch(const double complex[:, ::1] inputs,
                   const double[:, ::1] uniforms,
                   const signed char[:, ::1] table):
    cdef Py_ssize_t n = inputs.shape[0]
    if uniforms.shape[0] != n or uniforms.shape[1] < 2 or inputs.shape[1] != 2:
        raise ValueError("inputs must be (N, 2) and uniforms (N, >=2)")
    charlie_out = np.empty(n, dtype=np.int8)
    bell_out = np.empty(n, dtype=np.int8)
    corr_out = np.empty(n, dtype=np.int8)
    bob_out = np.empty((n, 2), dtype=np.complex128)
    fid_out = np.empty(n, dtype=np.float64)
    cdef signed char[::1] charlie_v = charlie_out
    cdef signed char[::1] bell_v = bell_out
    cdef signed char[::1] corr_v = corr_out
    cdef double complex[:, ::1] bob_v = bob_out
    cdef double[::1] fid_v = fid_out

    cdef double complex psi[16]
    cdef double complex mab[8]
    cdef double complex resid[4][2]
    cdef double pc[2]
    cdef double pk[4]
    cdef double complex b0, b1, t, ov
    cdef double norm
    cdef Py_ssize_t i
    cdef int m, abc, c, k, ma, b, op, bad = 0

    with nogil:
        for i in range(n):
            for m in range(2):
                for abc in range(8):
                    psi[8 * m + abc] = inputs[i, m] * XI[abc]
            pc[0] = 0.0
            pc[1] = 0.0
            for k in range(16):
                pc[k & 1] += abs2(psi[k])
            c = pick(pc, 2, uniforms[i, 0])
            if pc[c] < DEGENERATE_TOL:
                bad = 1
                break
            norm = sqrt(pc[c])
            for k in range(8):
                mab[k] = psi[2 * k + c] / norm
            for k in range(4):
                pk[k] = 0.0
                for b in range(2):
                    t = 0.0
                    for ma in range(4):
                        t = t + BELL[k][ma] * mab[2 * ma + b]
                    resid[k][b] = t
                    pk[k] += abs2(t)
            k = pick(pk, 4, uniforms[i, 1])
            if pk[k] < DEGENERATE_TOL:
                bad = 1
                break
            norm = sqrt(pk[k])
            b0 = resid[k][0] / norm
            b1 = resid[k][1] / norm
            op = table[c, k]
            if op == 1 or op == 3:
                t = b0
                b0 = b1
                b1 = t
            if op == 2 or op == 3:
                b1 = -b1
            charlie_v[i] = c
            bell_v[i] = k
            corr_v[i] = op
            bob_v[i, 0] = b0
            bob_v[i, 1] = b1
            ov = inputs[i, 0].conjugate() * b0 + inputs[i, 1].conjugate() * b1
            fid_v[i] = abs2(ov)
    if bad:
        raise ValueError("degenerate measurement branch; inputs not normalized?")
    return charlie_out, bell_out, corr_out, bob_out, fid_out


def measure_triplets(const double complex[:, ::1] states,
                     const unsigned char[::1] x_basis,
                     const double[::1] uniforms):
    cdef Py_ssize_t n = states.shape[0]
    if states.shape[1] != 8 or x_basis.shape[0] != n or uniforms.shape[0] != n:
        raise ValueError("states must be (N, 8) with matching basis flags and uniforms")
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] out_v = out
    cdef double complex v[8]
    cdef double complex s, d
    cdef double probs[8]
    cdef double scale = INV_SQRT2 * INV_SQRT2 * INV_SQRT2
    cdef Py_ssize_t i
    cdef int k, step, j

    with nogil:
        for i in range(n):
            for k in range(8):
                v[k] = states[i, k]
            if x_basis[i]:
                # H on each qubit: butterfly over bit strides 4, 2, 1
                step = 4
                while step >= 1:
                    for j in range(8):
                        if j & step == 0:
                            s = v[j] + v[j + step]
                            d = v[j] - v[j + step]
                            v[j] = s
                            v[j + step] = d
                    step = step // 2
                for k in range(8):
                    v[k] = v[k] * scale
            for k in range(8):
                probs[k] = abs2(v[k])
            out_v[i] = pick(probs, 8, uniforms[i])
    return out
