"""Compiled inner loops for the residue backend.

All kernels work on int64 arrays holding residues in [0, m). Sparse operands
are passed as (index, value) pairs with *centered* values, so that
``value * residue`` stays inside int64 as long as ``|value| * m < 2**62``.
Callers check that bound with :func:`fits_kernel` and fall back to Python
integers otherwise.
"""
import numpy as np
from numba import njit

KERNEL_LIMIT = 1 << 62


def fits_kernel(values, modulus):
    """True when every centered value times the modulus stays below 2**62."""
    if len(values) == 0:
        return True
    largest = int(np.max(np.abs(values)))
    return largest * modulus < KERNEL_LIMIT


def centered(value, modulus):
    value %= modulus
    return value - modulus if value > modulus // 2 else value


@njit(cache=True)
def sparse_convolve(dense, idx, val, modulus):
    n = dense.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for t in range(idx.shape[0]):
        shift = idx[t]
        c = val[t]
        if shift >= n:
            break
        for j in range(n - shift):
            out[shift + j] = (out[shift + j] + c * dense[j]) % modulus
    return out


@njit(cache=True)
def sparse_solve(numerator, idx, val, inv0, modulus):
    # b * divisor = numerator, divisor given by (idx, val) sorted with idx[0] == 0
    n = numerator.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for k in range(n):
        acc = numerator[k]
        for t in range(1, idx.shape[0]):
            shift = idx[t]
            if shift > k:
                break
            acc = (acc - val[t] * out[k - shift]) % modulus
        out[k] = (acc * inv0) % modulus
    return out
