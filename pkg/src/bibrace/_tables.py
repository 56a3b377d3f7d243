"""Lazily built per-size lookup tables shared by the heavy code paths.

All arrays returned here are treated as immutable after construction.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels, f2core


@lru_cache(maxsize=None)
def pair_arrays(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat coordinate t -> (row, col) of the strictly-upper pair."""
    D = f2core.lambda_dim(m)
    pi = np.empty(D, np.int64)
    pj = np.empty(D, np.int64)
    for t in range(D):
        i, j = f2core.pair_at(t, m)
        pi[t] = i
        pj[t] = j
    return pi, pj


@lru_cache(maxsize=None)
def kermasks(m: int) -> np.ndarray:
    pi, pj = pair_arrays(m)
    return _kernels.kermask_table(m, pi, pj)


@lru_cache(maxsize=None)
def rank_table(m: int) -> np.ndarray:
    return _kernels.rank_table_from_kermasks(kermasks(m), m)


@lru_cache(maxsize=None)
def transvection_matrices(m: int) -> tuple[f2core.F2Matrix, ...]:
    """I + e_ab for a != b, ordered by (a, b); generates GL(m, 2)."""
    f2core._check_size(m)
    out = []
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            rows = [1 << i for i in range(m)]
            rows[a] |= 1 << b
            out.append(f2core.F2Matrix(m, m, tuple(rows)))
    return tuple(out)


@lru_cache(maxsize=None)
def gen_action_tables(m: int) -> np.ndarray:
    """Generator g's congruence action on Lambda_m as a full flat lookup."""
    D = f2core.lambda_dim(m)
    basis = f2core.standard_basis(m)
    rows = []
    for T in transvection_matrices(m):
        imgs = np.empty(D, np.int64)
        for t, E in enumerate(basis):
            imgs[t] = f2core.flat_bits(f2core.congruence_unchecked(T, E))
        rows.append(_kernels.subset_xor_table(imgs))
    return np.stack(rows)


@lru_cache(maxsize=None)
def gl_codes(m: int) -> np.ndarray:
    """Row-packed codes of every element of GL(m, 2); materialized for m <= 5."""
    if m > 5:
        raise f2core.UsageError(f"GL({m},2) is too large to materialize")
    return _kernels.materialize_gl(m)


def pk_from_matrix(M: f2core.F2Matrix) -> int:
    code = 0
    for i, r in enumerate(M.rows):
        code |= r << (i * M.ncols)
    return code


def pk_to_matrix(code: int, m: int) -> f2core.F2Matrix:
    mask = (1 << m) - 1
    return f2core.F2Matrix(m, m, tuple((code >> (i * m)) & mask for i in range(m)))


def pk_mul(a: int, b: int, m: int) -> int:
    mask = (1 << m) - 1
    out = 0
    for i in range(m):
        r = (a >> (i * m)) & mask
        acc = 0
        while r:
            j = (r & -r).bit_length() - 1
            acc ^= (b >> (j * m)) & mask
            r &= r - 1
        out |= acc << (i * m)
    return out


def pk_inv(code: int, m: int) -> int:
    return pk_from_matrix(pk_to_matrix(code, m).inverse())
