"""Exact linear algebra over GF(2) with bit-packed rows.

Vectors are ints (bit ``i`` = coordinate ``i``); matrices hold one int per
row.  Addition is XOR throughout.  Everything here is an immutable value,
safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import UsageError


def lambda_dim(m: int) -> int:
    """Dimension m(m-1)/2 of the space of skew-symmetric m x m matrices."""
    _check_size(m)
    return m * (m - 1) // 2


def _check_size(m: int) -> None:
    if m < 2:
        raise UsageError(f"matrix size m={m} is degenerate; need m >= 2")


@dataclass(frozen=True)
class F2Vector:
    """A length-``n`` vector over GF(2), coordinates packed in ``bits``."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.bits < 0 or self.bits >> self.n:
            raise UsageError(f"vector bits 0x{self.bits:x} do not fit length {self.n}")

    def __add__(self, other: "F2Vector") -> "F2Vector":
        if self.n != other.n:
            raise UsageError(f"vector length mismatch: {self.n} != {other.n}")
        return F2Vector(self.n, self.bits ^ other.bits)

    __xor__ = __add__

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def to_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.n))

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")


@dataclass(frozen=True)
class F2Matrix:
    """A dense matrix over GF(2); ``rows[i]`` packs row ``i``."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise UsageError("row count mismatch")
        mask = (1 << self.ncols) - 1
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise UsageError(f"row 0x{r:x} does not fit {self.ncols} columns")

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "F2Matrix":
        packed = []
        width = None
        for row in rows:
            bits = 0
            n = 0
            for j, x in enumerate(row):
                bits |= (int(x) & 1) << j
                n = j + 1
            if width is None:
                width = n
            elif n != width:
                raise UsageError("ragged rows")
            packed.append(bits)
        if width is None:
            raise UsageError("empty matrix")
        return cls(len(packed), width, tuple(packed))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def transpose(self) -> "F2Matrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                j = (r & -r).bit_length() - 1
                cols[j] |= 1 << i
                r &= r - 1
        return F2Matrix(self.ncols, self.nrows, tuple(cols))

    def mul(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise UsageError(f"shape mismatch: {self.ncols} != {other.nrows}")
        out = []
        for r in self.rows:
            acc = 0
            rr = r
            while rr:
                j = (rr & -rr).bit_length() - 1
                acc ^= other.rows[j]
                rr &= rr - 1
            out.append(acc)
        return F2Matrix(self.nrows, other.ncols, tuple(out))

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        return self.mul(other)

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise UsageError("shape mismatch")
        return F2Matrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and rank(self) == self.nrows

    def inverse(self) -> "F2Matrix":
        """Gauss-Jordan on [self | I]; raises on a singular matrix."""
        if self.nrows != self.ncols:
            raise UsageError("inverse of a non-square matrix")
        n = self.nrows
        work = [self.rows[i] | (1 << (n + i)) for i in range(n)]
        r = 0
        for c in range(n):
            p = next((i for i in range(r, n) if (work[i] >> c) & 1), None)
            if p is None:
                raise UsageError("singular matrix has no inverse")
            work[r], work[p] = work[p], work[r]
            for i in range(n):
                if i != r and (work[i] >> c) & 1:
                    work[i] ^= work[r]
            r += 1
        return F2Matrix(n, n, tuple(w >> n for w in work))


def rank(M: "F2Matrix | SkewMatrix") -> int:
    """GF(2) row rank via elimination on a copy of the rows."""
    if isinstance(M, SkewMatrix):
        return rank_rows(M.rows, M.m)
    return rank_rows(M.rows, M.ncols)


def rank_rows(rows: Sequence[int], ncols: int) -> int:
    work = list(rows)
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(work)) if (work[i] >> c) & 1), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        for i in range(r + 1, len(work)):
            if (work[i] >> c) & 1:
                work[i] ^= work[r]
        r += 1
        if r == len(work):
            break
    return r


@dataclass(frozen=True)
class SkewMatrix:
    """Symmetric, zero-diagonal ("skew-symmetric") m x m matrix over GF(2)."""

    m: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_size(self.m)
        if len(self.rows) != self.m:
            raise UsageError("row count mismatch")
        for i, r in enumerate(self.rows):
            if r < 0 or r >> self.m:
                raise UsageError(f"row 0x{r:x} does not fit size {self.m}")
            if (r >> i) & 1:
                raise UsageError(f"nonzero diagonal at ({i},{i})")
        for i in range(self.m):
            for j in range(i + 1, self.m):
                if (self.rows[i] >> j) & 1 != (self.rows[j] >> i) & 1:
                    raise UsageError(f"asymmetric entries at ({i},{j})")

    @classmethod
    def zero(cls, m: int) -> "SkewMatrix":
        return cls(m, (0,) * m)

    @classmethod
    def from_matrix(cls, M: F2Matrix) -> "SkewMatrix":
        if M.nrows != M.ncols:
            raise UsageError("not square")
        return cls(M.nrows, M.rows)

    def as_matrix(self) -> F2Matrix:
        return F2Matrix(self.m, self.m, self.rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def __add__(self, other: "SkewMatrix") -> "SkewMatrix":
        if self.m != other.m:
            raise UsageError("size mismatch")
        return SkewMatrix(self.m, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)


def standard_basis_element(i: int, j: int, m: int) -> SkewMatrix:
    """E_ij = e_ij + e_ji for 0-indexed i < j."""
    _check_size(m)
    if not 0 <= i < j < m:
        raise UsageError(f"need 0 <= i < j < m, got ({i},{j}) for m={m}")
    rows = [0] * m
    rows[i] = 1 << j
    rows[j] = 1 << i
    return SkewMatrix(m, tuple(rows))


def standard_basis(m: int) -> tuple[SkewMatrix, ...]:
    """The m(m-1)/2 matrices E_ij in row-major strictly-upper order.

    The order (0,1),(0,2),...,(0,m-1),(1,2),... fixes the flattening used
    by every encoding in the package.
    """
    _check_size(m)
    return tuple(
        standard_basis_element(i, j, m) for i in range(m) for j in range(i + 1, m)
    )


def pair_index(i: int, j: int, m: int) -> int:
    """Flat coordinate of the pair (i, j), i < j, in standard_basis order."""
    if not 0 <= i < j < m:
        raise UsageError(f"need 0 <= i < j < m, got ({i},{j})")
    return i * m - i * (i + 1) // 2 + (j - i - 1)


def pair_at(idx: int, m: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if not 0 <= idx < lambda_dim(m):
        raise UsageError(f"flat index {idx} out of range for m={m}")
    i = 0
    step = m - 1
    while idx >= step:
        idx -= step
        step -= 1
        i += 1
    return i, i + 1 + idx


def flat_bits(B: SkewMatrix) -> int:
    """Flattened strictly-upper-triangular bits of B as a plain int."""
    bits = 0
    idx = 0
    for i in range(B.m):
        for j in range(i + 1, B.m):
            bits |= ((B.rows[i] >> j) & 1) << idx
            idx += 1
    return bits


def unflat_bits(bits: int, m: int) -> SkewMatrix:
    """Rebuild a SkewMatrix from its flattened bits."""
    D = lambda_dim(m)
    if bits < 0 or bits >> D:
        raise UsageError(f"flat bits 0x{bits:x} do not fit dimension {D} (m={m})")
    rows = [0] * m
    idx = 0
    for i in range(m):
        for j in range(i + 1, m):
            if (bits >> idx) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            idx += 1
    return SkewMatrix(m, tuple(rows))


def flatten(B: SkewMatrix) -> F2Vector:
    return F2Vector(lambda_dim(B.m), flat_bits(B))


def unflatten(v: "F2Vector | int", m: int) -> SkewMatrix:
    if isinstance(v, F2Vector):
        if v.n != lambda_dim(m):
            raise UsageError(f"vector length {v.n} != dim Lambda_{m} = {lambda_dim(m)}")
        return unflat_bits(v.bits, m)
    return unflat_bits(int(v), m)


def hconcat_rank(mats: Sequence[SkewMatrix]) -> int:
    """Rank of the horizontal concatenation [B_1 | ... | B_d].

    Equals m minus the dimension of the common left null space of the B_k.
    """
    if not mats:
        raise UsageError("empty sequence of matrices")
    m = mats[0].m
    for B in mats:
        if B.m != m:
            raise UsageError(f"size mismatch in concatenation: {B.m} != {m}")
    rows = []
    for i in range(m):
        acc = 0
        for k, B in enumerate(mats):
            acc |= B.rows[i] << (k * m)
        rows.append(acc)
    return rank_rows(rows, m * len(mats))


def congruence(A: F2Matrix, B: SkewMatrix) -> SkewMatrix:
    """A * B * A^t for invertible A; preserves skewness and rank."""
    if A.nrows != A.ncols or A.nrows != B.m:
        raise UsageError("size mismatch in congruence")
    if not A.is_invertible():
        raise UsageError("congruence by a singular matrix")
    return congruence_unchecked(A, B)


def congruence_unchecked(A: F2Matrix, B: SkewMatrix) -> SkewMatrix:
    AB = A.mul(B.as_matrix())
    return SkewMatrix.from_matrix(AB.mul(A.transpose()))


def skew_normal_form(B: SkewMatrix) -> tuple[F2Matrix, int]:
    """Congruence transform A with A*B*A^t in symplectic normal form.

    The normal form is E_12 + E_34 + ... (rank/2 hyperbolic blocks on
    consecutive index pairs) followed by zeros.  Returns (A, rank(B)).
    """
    m = B.m
    work = [list(row_bits(r, m)) for r in B.rows]
    A_rows = [1 << i for i in range(m)]

    def swap(i, j):
        work[i], work[j] = work[j], work[i]
        for row in work:
            row[i], row[j] = row[j], row[i]
        A_rows[i], A_rows[j] = A_rows[j], A_rows[i]

    def add_row(dst, src):
        # congruence row op: row_dst += row_src together with col_dst += col_src
        for c in range(m):
            work[dst][c] ^= work[src][c]
        for row in work:
            row[dst] ^= row[src]
        A_rows[dst] ^= A_rows[src]

    r = 0
    while True:
        pivot = None
        for i in range(r, m):
            for j in range(i + 1, m):
                if work[i][j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        if i != r:
            swap(i, r)
            if j == r:
                j = i
        if j != r + 1:
            swap(j, r + 1)
        for t in range(m):
            if t not in (r, r + 1):
                if work[t][r + 1]:
                    add_row(t, r)
                if work[t][r]:
                    add_row(t, r + 1)
        r += 2
    A = F2Matrix(m, m, tuple(A_rows))
    return A, r


def row_bits(r: int, n: int) -> tuple[int, ...]:
    return tuple((r >> j) & 1 for j in range(n))


def normal_form_matrix(m: int, r: int) -> SkewMatrix:
    """The canonical rank-r skew matrix: hyperbolic blocks then zeros."""
    if r % 2 or r > m:
        raise UsageError(f"rank {r} invalid for size {m}")
    rows = [0] * m
    for b in range(r // 2):
        rows[2 * b] |= 1 << (2 * b + 1)
        rows[2 * b + 1] |= 1 << (2 * b)
    return SkewMatrix(m, tuple(rows))


def encode_matrix_hex(B: SkewMatrix) -> str:
    """Lowercase hex of the flattened bits; LSB is the E_12 coordinate."""
    return format(flat_bits(B), "x")


def decode_matrix_hex(s: str, m: int) -> SkewMatrix:
    try:
        bits = int(s.strip(), 16)
    except ValueError:
        raise UsageError(f"malformed hex token {s!r}") from None
    if bits < 0:
        raise UsageError(f"malformed hex token {s!r}")
    return unflat_bits(bits, m)
