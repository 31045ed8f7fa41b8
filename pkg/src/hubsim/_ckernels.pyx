# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled density-matrix kernels.

All inputs are C-contiguous complex128 arrays. Below ``BLAS_CROSSOVER``
plain loops beat the per-call overhead of BLAS; at and above it the
products are handed to numpy.
"""
import numpy as np

BLAS_CROSSOVER = 16


cdef void _matmul(const double complex[:, ::1] a, const double complex[:, ::1] b,
                  double complex[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j, k
    cdef double complex acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


cdef void _sandwich_add(const double complex[:, ::1] op, const double complex[:, ::1] rho,
                        double complex[:, ::1] tmp, double complex[:, ::1] out) noexcept nogil:
    # out += op @ rho @ op^H
    cdef Py_ssize_t n = op.shape[0], i, j, k
    cdef double complex acc
    _matmul(op, rho, tmp)
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + tmp[i, k] * op[j, k].conjugate()
            out[i, j] = out[i, j] + acc


def apply_unitary(const double complex[:, ::1] rho, const double complex[:, ::1] u):
    cdef Py_ssize_t n = rho.shape[0]
    if u.shape[0] != n or u.shape[1] != n or rho.shape[1] != n:
        raise ValueError("dimension mismatch")
    if n >= BLAS_CROSSOVER:
        a = np.asarray(u)
        return a @ np.asarray(rho) @ a.conj().T
    out = np.zeros((n, n), dtype=np.complex128)
    tmp = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out, t = tmp
    with nogil:
        _sandwich_add(u, rho, t, o)
    return out


def apply_kraus(const double complex[:, ::1] rho, const double complex[:, :, ::1] ops):
    cdef Py_ssize_t n = rho.shape[0], m
    if ops.shape[1] != n or ops.shape[2] != n or rho.shape[1] != n:
        raise ValueError("dimension mismatch")
    if n >= BLAS_CROSSOVER:
        k = np.asarray(ops)
        return (k @ np.asarray(rho) @ k.conj().transpose(0, 2, 1)).sum(axis=0)
    out = np.zeros((n, n), dtype=np.complex128)
    tmp = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out, t = tmp
    with nogil:
        for m in range(ops.shape[0]):
            _sandwich_add(ops[m], rho, t, o)
    return out


def partial_trace(const double complex[:, ::1] rho, const Py_ssize_t[:, ::1] index_map):
    """``out[i, j] = sum_k rho[index_map[i, k], index_map[j, k]]``."""
    cdef Py_ssize_t nk = index_map.shape[0], nd = index_map.shape[1], i, j, k
    cdef double complex acc
    out = np.empty((nk, nk), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    with nogil:
        for i in range(nk):
            for j in range(nk):
                acc = 0
                for k in range(nd):
                    acc = acc + rho[index_map[i, k], index_map[j, k]]
                o[i, j] = acc
    return out
