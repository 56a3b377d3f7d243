"""Subspaces of Lambda_m: canonical form, enumeration, invariants.

A subspace is identified by its reduced-echelon basis of flattened skew
matrices (pivot = lowest set bit, pivots strictly increasing, each pivot
the only nonzero bit of its column among basis vectors).  Two equal
subspaces therefore always compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels, _tables, f2core
from .errors import UsageError


def _echelonize(flats: Iterable[int]) -> tuple[int, ...]:
    basis: list[int] = []  # kept reduced, sorted by pivot
    for v in flats:
        for b in basis:
            p = b & -b
            if v & p:
                v ^= b
        if v:
            p = v & -v
            basis = [b ^ v if b & p else b for b in basis]
            basis.append(v)
    basis.sort(key=lambda b: b & -b)
    return tuple(basis)


@dataclass(frozen=True)
class SkewSpace:
    """A subspace of Lambda_m with canonical echelon basis (flattened bits)."""

    m: int
    basis: tuple[int, ...]

    def __post_init__(self) -> None:
        D = f2core.lambda_dim(self.m)
        if len(self.basis) > D:
            raise UsageError("more basis vectors than dim Lambda_m")
        for v in self.basis:
            if v <= 0 or v >> D:
                raise UsageError(f"basis vector 0x{v:x} invalid for m={self.m}")
        if self.basis != _echelonize(self.basis):
            raise UsageError("basis is not in reduced echelon form")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return f2core.lambda_dim(self.m)

    @property
    def key(self) -> int:
        """Big-endian packing of the echelon basis; unique per subspace."""
        D = self.ambient_dim
        key = 0
        for v in self.basis:
            key = (key << D) | v
        return key

    @classmethod
    def from_key(cls, key: int, k: int, m: int) -> "SkewSpace":
        D = f2core.lambda_dim(m)
        mask = (1 << D) - 1
        flats = tuple((key >> ((k - 1 - i) * D)) & mask for i in range(k))
        return cls(m, flats)

    def basis_vectors(self) -> tuple[f2core.F2Vector, ...]:
        D = self.ambient_dim
        return tuple(f2core.F2Vector(D, v) for v in self.basis)

    def basis_matrices(self) -> tuple[f2core.SkewMatrix, ...]:
        return tuple(f2core.unflat_bits(v, self.m) for v in self.basis)

    def elements(self) -> Iterator[int]:
        """All 2^dim flattened elements, zero included."""
        span = [0]
        for v in self.basis:
            span += [x ^ v for x in span]
        return iter(span)

    def contains(self, flat: int) -> bool:
        v = flat
        for b in self.basis:
            if v & (b & -b):
                v ^= b
        return v == 0


def canonicalize(gens: Sequence[f2core.SkewMatrix], m: int | None = None) -> SkewSpace:
    """Canonical SkewSpace spanned by the given matrices.

    ``m`` is only needed for an empty generator sequence.
    """
    if gens:
        sizes = {B.m for B in gens}
        if len(sizes) != 1:
            raise UsageError("generators of mixed sizes")
        m = sizes.pop()
    elif m is None:
        raise UsageError("empty generators need an explicit m")
    return SkewSpace(m, _echelonize(f2core.flat_bits(B) for B in gens))


def space_from_flats(flats: Sequence[int], m: int) -> SkewSpace:
    return SkewSpace(m, _echelonize(flats))


@dataclass(frozen=True)
class RankSequence:
    """Ascending multiset of ranks of the nonzero elements of a subspace."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if list(self.entries) != sorted(self.entries):
            raise UsageError("rank sequence must be ascending")
        for r in self.entries:
            if r <= 0 or r % 2:
                raise UsageError(f"invalid rank {r} in sequence")

    def __str__(self) -> str:
        return "(" + ",".join(str(r) for r in self.entries) + ")"

    def __len__(self) -> int:
        return len(self.entries)


def rank_sequence(S: SkewSpace) -> RankSequence:
    """Ranks of all 2^dim - 1 nonzero elements, ascending; empty for dim 0."""
    table = _tables.rank_table(S.m)
    ranks = sorted(int(table[v]) for v in S.elements() if v)
    return RankSequence(tuple(ranks))


def is_nondegenerate(S: SkewSpace) -> bool:
    """True when the concatenated basis has rank m (basis-independent)."""
    if S.dim == 0:
        return False
    return f2core.hconcat_rank(S.basis_matrices()) == S.m


def is_primitive_candidate(S: SkewSpace, d: int) -> bool:
    """Whether S can be the defining span of a primitive algebra with dim Ann = d."""
    return S.dim == d and is_nondegenerate(S)


def admissible_params(n: int) -> set[tuple[int, int]]:
    """The (m, d) splittings of total dimension n that admit an algebra.

    d = 1 forces a full-rank skew matrix, impossible for odd m.
    """
    if not 3 <= n <= 8:
        raise UsageError(f"total dimension n={n} outside the supported range 3..8")
    out = set()
    for m in range(2, n - 1 + 1):
        d = n - m
        if d == 1 and m % 2:
            continue
        out.add((m, d))
    return out


# -- enumeration ------------------------------------------------------------

def _cell_layout(pivots: tuple[int, ...], D: int, k: int):
    """Pivot-base rows and free-slot layout of one echelon cell."""
    base = np.empty(k, np.int64)
    slot_row = []
    slot_pos = []
    pset = set(pivots)
    for i, p in enumerate(pivots):
        base[i] = 1 << p
        for q in range(p + 1, D):
            if q not in pset:
                slot_row.append(i)
                slot_pos.append(q)
    return base, np.array(slot_row, np.int64), np.array(slot_pos, np.int64)


def count_subspaces(m: int, k: int) -> int:
    """Number of k-dim subspaces of Lambda_m, summed over echelon cells."""
    D = f2core.lambda_dim(m)
    if not 0 <= k <= D:
        raise UsageError(f"subspace dimension k={k} out of range for m={m}")
    total = 0
    for pivots in combinations(range(D), k):
        free = sum(D - 1 - p - (k - 1 - i) for i, p in enumerate(pivots))
        total += 1 << free
    return total


def iter_subspace_key_chunks(
    m: int, k: int, chunk_size: int = 1 << 20
) -> Iterator[np.ndarray]:
    """Canonical keys of all k-dim subspaces, cell-major, in int64 chunks.

    Order is deterministic and resumable: cells follow lexicographic pivot
    tuples, and within a cell the free-bit counter increases.
    """
    D = f2core.lambda_dim(m)
    if not 0 <= k <= D:
        raise UsageError(f"subspace dimension k={k} out of range for m={m}")
    if k == 0:
        yield np.zeros(1, np.int64)
        return
    if k * D > 62:
        raise UsageError(f"packed keys for (m={m}, k={k}) exceed 62 bits")
    for pivots in combinations(range(D), k):
        base, slot_row, slot_pos = _cell_layout(pivots, D, k)
        n_cell = 1 << len(slot_row)
        start = 0
        while start < n_cell:
            n = min(chunk_size, n_cell - start)
            out = np.empty(n, np.int64)
            _kernels.fill_cell_keys(base, slot_row, slot_pos, k, D, start, n, out)
            yield out
            start += n


def enumerate_subspaces(m: int, k: int) -> Iterator[SkewSpace]:
    """Every k-dimensional subspace of Lambda_m exactly once."""
    D = f2core.lambda_dim(m)
    if 0 <= k <= D and k * D <= 62:
        for chunk in iter_subspace_key_chunks(m, k):
            for key in chunk:
                yield SkewSpace.from_key(int(key), k, m)
        return
    # wide bases cannot be packed into one word; walk the cells directly
    if not 0 <= k <= D:
        raise UsageError(f"subspace dimension k={k} out of range for m={m}")
    for pivots in combinations(range(D), k):
        base, slot_row, slot_pos = _cell_layout(pivots, D, k)
        for c in range(1 << len(slot_row)):
            flats = list(base)
            cc = c
            while cc:
                s = (cc & -cc).bit_length() - 1
                flats[slot_row[s]] |= 1 << slot_pos[s]
                cc &= cc - 1
            yield SkewSpace(m, tuple(int(v) for v in flats))


def count_nondegenerate_subspaces(m: int, k: int) -> int:
    """Number of nondegenerate k-dim subspaces of Lambda_m."""
    D = f2core.lambda_dim(m)
    if not 1 <= k <= D:
        return 0
    masks = _tables.kermasks(m)
    total = 0
    for pivots in combinations(range(D), k):
        base, slot_row, slot_pos = _cell_layout(pivots, D, k)
        total += int(_kernels.cell_nondeg_count(base, slot_row, slot_pos, k, D, masks))
    return total


# -- text encoding ----------------------------------------------------------

def encode_space(S: SkewSpace) -> str:
    """"m:k:hex1,hex2,..." with the f2core hex encoding of each basis vector."""
    hexes = ",".join(format(v, "x") for v in S.basis)
    return f"{S.m}:{S.dim}:{hexes}"


def decode_space(text: str) -> SkewSpace:
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed space encoding {text!r}")
    try:
        m = int(parts[0])
        k = int(parts[1])
    except ValueError:
        raise UsageError(f"malformed space encoding {text!r}") from None
    tokens = [t for t in parts[2].split(",") if t] if parts[2] else []
    flats = []
    for tok in tokens:
        try:
            flats.append(int(tok, 16))
        except ValueError:
            raise UsageError(f"malformed hex token {tok!r}") from None
    S = space_from_flats(flats, m)
    if S.dim != k:
        raise UsageError(
            f"encoded dimension {k} does not match span dimension {S.dim}"
        )
    return S
