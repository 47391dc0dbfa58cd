# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def flip_answer_bit(amps, Py_ssize_t n, Py_ssize_t k):
    cdef const double complex[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    out_arr = np.array(src, dtype=np.complex128, copy=True)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t width = src.shape[0] // (2 * n)
    cdef Py_ssize_t i, z, base
    for i in range(k, n):
        base = 2 * i * width
        for z in range(width):
            out[base + z] = src[base + width + z]
            out[base + width + z] = src[base + z]
    return out_arr


def index_mass(amps, Py_ssize_t n):
    cdef const double complex[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t row = src.shape[0] // n
    cdef Py_ssize_t i, j
    cdef double acc
    cdef double complex a
    for i in range(n):
        acc = 0.0
        for j in range(i * row, (i + 1) * row):
            a = src[j]
            acc += a.real * a.real + a.imag * a.imag
        out[i] = acc
    return out_arr


def apply_rotations(double complex[::1] amps,
                    const cnp.int64_t[::1] ia, const cnp.int64_t[::1] ib,
                    const double complex[::1] u00, const double complex[::1] u01,
                    const double complex[::1] u10, const double complex[::1] u11):
    cdef Py_ssize_t j, a, b
    cdef double complex x, y
    with nogil:
        for j in range(ia.shape[0]):
            a = ia[j]
            b = ib[j]
            x = amps[a]
            y = amps[b]
            amps[a] = u00[j] * x + u01[j] * y
            amps[b] = u10[j] * x + u11[j] * y
    return np.asarray(amps)
