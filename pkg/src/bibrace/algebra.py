"""Binary alternating algebras, their bibrace operation, and isomorphism.

An algebra lives on F_2^m + F_2^d with product
(x1, y1) * (x2, y2) = (0, (x1 B_1 x2^t, ..., x1 B_d x2^t)); the B_k are its
defining matrices.  Defining matrices are skew-symmetric for genuine
alternating algebras, but arbitrary square matrices are accepted so the
identity checkers can demonstrate failures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels, f2core, orbits, spaces
from .errors import InfeasibleError, UsageError

EXHAUSTIVE_MAX_DIM = 8


@dataclass(frozen=True)
class AlternatingAlgebra:
    """Dimensions (m, d) plus the ordered defining matrices."""

    m: int
    d: int
    defining: tuple[f2core.F2Matrix, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise UsageError(f"need d >= 1, got {self.d}")
        if len(self.defining) != self.d:
            raise UsageError(f"expected {self.d} defining matrices, got {len(self.defining)}")
        for B in self.defining:
            if B.nrows != self.m or B.ncols != self.m:
                raise UsageError("defining matrices must be m x m")

    @classmethod
    def from_skew(cls, mats: Sequence[f2core.SkewMatrix], d: int | None = None) -> "AlternatingAlgebra":
        mats = tuple(mats)
        if not mats:
            raise UsageError("need at least one defining matrix")
        return cls(mats[0].m, d if d is not None else len(mats), tuple(B.as_matrix() for B in mats))

    @property
    def n(self) -> int:
        return self.m + self.d

    def is_alternating(self) -> bool:
        """Whether every defining matrix is symmetric with zero diagonal."""
        try:
            self.defining_skew()
        except UsageError:
            return False
        return True

    def defining_skew(self) -> tuple[f2core.SkewMatrix, ...]:
        return tuple(f2core.SkewMatrix.from_matrix(B) for B in self.defining)

    def defining_span(self) -> spaces.SkewSpace:
        return spaces.canonicalize(self.defining_skew(), m=self.m)

    def is_nondegenerate(self) -> bool:
        rows = []
        for i in range(self.m):
            acc = 0
            for k, B in enumerate(self.defining):
                acc |= B.rows[i] << (k * self.m)
            rows.append(acc)
        return f2core.rank_rows(rows, self.m * self.d) == self.m

    @cached_property
    def _ptab(self) -> np.ndarray:
        """ptab[x1, x2] = packed d bits of the bilinear map phi(x1, x2)."""
        m, d = self.m, self.d
        tab = np.zeros((1 << m, 1 << m), np.uint16)
        for x2 in range(1 << m):
            cols = []
            for B in self.defining:
                z = 0
                for i in range(m):
                    z |= (bin(B.rows[i] & x2).count("1") & 1) << i
                cols.append(z)
            for x1 in range(1 << m):
                y = 0
                for k in range(d):
                    y |= (bin(x1 & cols[k]).count("1") & 1) << k
                tab[x1, x2] = y
        return tab


@dataclass(frozen=True)
class AlgebraElement:
    """An element (x, y) of V + W, with packed component vectors."""

    x: f2core.F2Vector
    y: f2core.F2Vector

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.x + other.x, self.y + other.y)

    def is_zero(self) -> bool:
        return self.x.bits == 0 and self.y.bits == 0

    def packed(self) -> int:
        return self.x.bits | (self.y.bits << self.x.n)


def element(R: AlternatingAlgebra, x_bits: int, y_bits: int) -> AlgebraElement:
    return AlgebraElement(f2core.F2Vector(R.m, x_bits), f2core.F2Vector(R.d, y_bits))


def _check_member(R: AlternatingAlgebra, a: AlgebraElement) -> None:
    if a.x.n != R.m or a.y.n != R.d:
        raise UsageError("element does not belong to this algebra")


def product(R: AlternatingAlgebra, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """(x1,y1) * (x2,y2) = (0, phi(x1,x2)); ignores the y parts."""
    _check_member(R, a)
    _check_member(R, b)
    y = int(R._ptab[a.x.bits, b.x.bits])
    return element(R, 0, y)


def circle(R: AlternatingAlgebra, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """The bibrace operation a o b = a + b + a * b."""
    return a + b + product(R, a, b)


def check_bibrace(R: AlternatingAlgebra, grouping: str = "both") -> bool:
    """Exhaustively verify both biskew identities over all element triples.

    The second identity chains two circles; ``grouping`` picks the reading
    of the right-hand side ("left", "right", or "both" -- they agree for
    genuinely alternating products).
    """
    if R.n > EXHAUSTIVE_MAX_DIM:
        raise InfeasibleError(f"exhaustive check limited to n <= {EXHAUSTIVE_MAX_DIM}")
    if grouping not in ("left", "right", "both"):
        raise UsageError(f"unknown grouping {grouping!r}")
    groups = {"left": (0,), "right": (1,), "both": (0, 1)}[grouping]
    ptab = R._ptab
    for g in groups:
        if int(_kernels.bibrace_identity_scan(ptab, R.m, R.d, g)) != -1:
            return False
    return True


def check_alternating_nilpotent(R: AlternatingAlgebra) -> bool:
    """Exhaustive x*x = 0 and (x*y)*z = z*(x*y) = 0 over all elements."""
    if R.n > EXHAUSTIVE_MAX_DIM:
        raise InfeasibleError(f"exhaustive check limited to n <= {EXHAUSTIVE_MAX_DIM}")
    return int(_kernels.alternating_nilpotent_scan(R._ptab, R.m, R.d)) == -1


def _echelon_elements(packed: Sequence[int], n: int) -> tuple[f2core.F2Vector, ...]:
    basis: list[int] = []
    for v in packed:
        for b in basis:
            if v & (b & -b):
                v ^= b
        if v:
            basis = [b ^ v if b & (v & -v) else b for b in basis]
            basis.append(v)
    basis.sort(key=lambda b: b & -b)
    return tuple(f2core.F2Vector(n, v) for v in basis)


def annihilator(R: AlternatingAlgebra) -> tuple[f2core.F2Vector, ...]:
    """Echelon basis of {a : a * R = 0}, in packed (x|y) coordinates.

    Computed directly from the product, not from the nondegeneracy flag.
    """
    n = R.n
    members = []
    ptab = R._ptab
    for a in range(1 << n):
        ax = a & ((1 << R.m) - 1)
        if np.any(ptab[ax, :]):
            continue
        members.append(a)
    return _echelon_elements(members, n)


def square(R: AlternatingAlgebra) -> tuple[f2core.F2Vector, ...]:
    """Echelon basis of the span of all products, in packed coordinates."""
    prods = {int(v) << R.m for v in R._ptab.ravel()}
    return _echelon_elements(sorted(prods), R.n)


def are_isomorphic(
    R1: AlternatingAlgebra,
    R2: AlternatingAlgebra,
    *,
    witness: bool = False,
    census: Sequence[orbits.OrbitClass] | None = None,
):
    """Whether the defining spans are congruent (= the algebras isomorphic).

    Returns the bool, or (bool, matrix-or-None) when ``witness`` is set.
    For m = 6 a precomputed 2-dim census can answer rank-unique cases
    without a BFS.
    """
    if (R1.m, R1.d) != (R2.m, R2.d):
        raise UsageError("isomorphism test needs matching (m, d)")
    S1 = R1.defining_span()
    S2 = R2.defining_span()
    m, k = R1.m, S1.dim
    if S1.dim != S2.dim:
        return (False, None) if witness else False
    if k == 0:
        A = f2core.F2Matrix.identity(m)
        return (True, A) if witness else True
    if S1 == S2:
        return (True, f2core.F2Matrix.identity(m)) if witness else True
    if spaces.rank_sequence(S1) != spaces.rank_sequence(S2):
        return (False, None) if witness else False
    D = f2core.lambda_dim(m)
    if k * D > orbits._BITMAP_MAX_BITS:
        raise InfeasibleError(
            f"isomorphism search for m={m}, span dim {k} is out of supported range"
        )
    if census is not None and not witness:
        sig = (spaces.rank_sequence(S1), spaces.is_nondegenerate(S1))
        sig2 = (spaces.rank_sequence(S2), spaces.is_nondegenerate(S2))
        if sig != sig2:
            return False
        bucket = [
            c for c in census
            if c.representative.dim == k
            and (c.rank_seq, c.nondegenerate) == sig
        ]
        if len(bucket) == 1:
            return True
    if witness:
        A = orbits.find_congruence_witness(S1, S2)
        return (A is not None, A)
    visited = orbits._new_visited(k * D)
    _kernels.visit_mark(visited, S1.key)
    _, _, hit = orbits._bfs_bitmap(
        np.array([S1.key], np.int64), k, m, visited, 1, S1.key, targets=(S2.key,)
    )
    return hit


def random_algebra(m: int, d: int, rng, *, nondegenerate: bool = True) -> AlternatingAlgebra:
    """Uniform random defining sequence, resampled until nondegenerate."""
    D = f2core.lambda_dim(m)
    while True:
        mats = tuple(f2core.unflat_bits(rng.randrange(1 << D), m) for _ in range(d))
        R = AlternatingAlgebra.from_skew(mats, d)
        if not nondegenerate or R.is_nondegenerate():
            return R


# -- the JSON description consumed by verify-bibrace / iso -------------------

def algebra_to_dict(R: AlternatingAlgebra) -> dict:
    return {
        "m": R.m,
        "d": R.d,
        "defining": [
            f2core.encode_matrix_hex(f2core.SkewMatrix.from_matrix(B)) for B in R.defining
        ],
    }


def algebra_from_dict(data: dict) -> AlternatingAlgebra:
    try:
        m = int(data["m"])
        d = int(data["d"])
        hexes = list(data["defining"])
    except (KeyError, TypeError, ValueError):
        raise UsageError("algebra description needs fields m, d, defining") from None
    if len(hexes) != d:
        raise UsageError(f"expected {d} defining matrices, got {len(hexes)}")
    mats = tuple(f2core.decode_matrix_hex(h, m) for h in hexes)
    return AlternatingAlgebra.from_skew(mats, d)


def load_algebra(path: str) -> AlternatingAlgebra:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read algebra file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"algebra file {path!r} is not valid JSON: {exc}") from None
    return algebra_from_dict(data)
