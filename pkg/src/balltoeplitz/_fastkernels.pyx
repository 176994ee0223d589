# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core: fused inner-product + principal-power evaluations.

Same contracts as `balltoeplitz._kernels_np`; the fused loops avoid the large
temporaries NumPy needs for (1 - Z @ Wbar.T)**(-lam) on big node blocks.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cpow(double complex, double complex)

BACKEND = "cython"


def power_neg(cnp.ndarray base, double lam):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] b = np.ascontiguousarray(
        base, dtype=np.complex128).ravel()
    cdef Py_ssize_t i, m = b.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(m, dtype=np.complex128)
    cdef double complex e = -lam
    with nogil:
        for i in range(m):
            out[i] = cpow(b[i], e)
    return out.reshape(np.shape(base))


def kernel_vs_point(cnp.ndarray Z, cnp.ndarray wbar, double lam):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Zc = np.ascontiguousarray(
        Z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wc = np.ascontiguousarray(
        wbar, dtype=np.complex128)
    cdef Py_ssize_t q, j, C = Zc.shape[0], n = Zc.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(C, dtype=np.complex128)
    cdef double complex acc, e = -lam
    with nogil:
        for q in range(C):
            acc = 1.0
            for j in range(n):
                acc = acc - Zc[q, j] * wc[j]
            out[q] = cpow(acc, e)
    return out


def kernel_matrix(cnp.ndarray Z, cnp.ndarray Wbar, double lam):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Zc = np.ascontiguousarray(
        Z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Wc = np.ascontiguousarray(
        Wbar, dtype=np.complex128)
    cdef Py_ssize_t q, m, j
    cdef Py_ssize_t C = Zc.shape[0], M = Wc.shape[0], n = Zc.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((C, M), dtype=np.complex128)
    cdef double complex acc, e = -lam
    with nogil:
        for q in range(C):
            for m in range(M):
                acc = 1.0
                for j in range(n):
                    acc = acc - Zc[q, j] * Wc[m, j]
                out[q, m] = cpow(acc, e)
    return out
