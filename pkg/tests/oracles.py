"""Independent dense-array GF(2) oracles used to freeze expected test values.

Everything here works on numpy 0/1 arrays with naive elimination, sharing no
code with the bit-packed implementation it checks.
"""

from __future__ import annotations

import numpy as np


def dense_rank(M) -> int:
    """GF(2) rank by textbook Gaussian elimination on a uint8 array."""
    R = (np.array(M, dtype=np.uint8) % 2).copy()
    if R.size == 0:
        return 0
    nr, nc = R.shape
    rank = 0
    for col in range(nc):
        pivot = None
        for row in range(rank, nr):
            if R[row, col]:
                pivot = row
                break
        if pivot is None:
            continue
        R[[rank, pivot]] = R[[pivot, rank]]
        for row in range(nr):
            if row != rank and R[row, col]:
                R[row] ^= R[rank]
        rank += 1
        if rank == nr:
            break
    return rank


def dense_congruence(A, B):
    """A @ B @ A.T mod 2 on dense arrays."""
    A = np.array(A, dtype=np.uint8) % 2
    B = np.array(B, dtype=np.uint8) % 2
    return (A @ B @ A.T) % 2


def dense_hconcat_rank(mats) -> int:
    return dense_rank(np.hstack([np.array(M, dtype=np.uint8) % 2 for M in mats]))


def dense_kernel_dim(M) -> int:
    """dim {x : x M = 0} over GF(2)."""
    M = np.array(M, dtype=np.uint8) % 2
    return M.shape[0] - dense_rank(M)


def span_f2(vectors: list[int]) -> frozenset[int]:
    """All XOR combinations of the given int-packed vectors."""
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return frozenset(out)
