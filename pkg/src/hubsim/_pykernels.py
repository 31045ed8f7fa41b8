"""Pure-numpy versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np


def apply_unitary(rho, u):
    if u.shape != rho.shape:
        raise ValueError("dimension mismatch")
    return u @ rho @ u.conj().T


def apply_kraus(rho, ops):
    if ops.shape[1:] != rho.shape:
        raise ValueError("dimension mismatch")
    return (ops @ rho @ ops.conj().transpose(0, 2, 1)).sum(axis=0)


def partial_trace(rho, index_map):
    return rho[index_map[:, None, :], index_map[None, :, :]].sum(axis=2)
