"""Counting defining sequences and annihilator choices; reproduces Table 1."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from . import _kernels, _tables, f2core, spaces
from .errors import UsageError

# ordered d-tuple scans are capped at 2^32 evaluated tuples
BRUTEFORCE_BUDGET_BITS = 32


@dataclass(frozen=True)
class CountReport:
    """One Table-1 row: annihilator choices t, defining sequences s."""

    n: int
    m: int
    d: int
    t: int
    s: int
    total: int

    def __post_init__(self) -> None:
        if self.n != self.m + self.d:
            raise UsageError("inconsistent dimensions in count report")
        if self.total != self.s * self.t:
            raise UsageError("total must equal s * t")


def gaussian_binomial(n: int, d: int) -> int:
    """Number of d-dim subspaces of F_2^n, as an exact integer."""
    if not 0 <= d <= n:
        raise UsageError(f"gaussian binomial needs 0 <= d <= n, got ({n}, {d})")
    num = 1
    den = 1
    for i in range(d):
        num *= (1 << n) - (1 << i)
        den *= (1 << d) - (1 << i)
    assert num % den == 0
    return num // den


def count_sequences_bruteforce(m: int, d: int) -> int:
    """Ordered d-tuples over Lambda_m whose concatenation has rank m.

    Scans every tuple; a tuple contributes when the intersection of the
    left kernels of its entries is trivial.
    """
    D = f2core.lambda_dim(m)
    if d < 1:
        raise UsageError(f"need d >= 1, got {d}")
    if D * d > BRUTEFORCE_BUDGET_BITS:
        raise UsageError(
            f"(m={m}, d={d}) needs 2^{D * d} tuple evaluations, over the "
            f"2^{BRUTEFORCE_BUDGET_BITS} budget"
        )
    masks = _tables.kermasks(m)
    return int(_kernels.count_full_rank_tuples(masks, d))


@lru_cache(maxsize=None)
def nondegenerate_counts(m: int, k_max: int) -> dict[int, int]:
    """N_k = number of nondegenerate k-dim subspaces, for 1 <= k <= k_max."""
    D = f2core.lambda_dim(m)
    return {
        k: spaces.count_nondegenerate_subspaces(m, k)
        for k in range(1, min(k_max, D) + 1)
    }


def surjection_count(d: int, k: int) -> int:
    """Ordered d-tuples spanning a fixed k-dim space: prod (2^d - 2^i)."""
    out = 1
    for i in range(k):
        out *= (1 << d) - (1 << i)
    return out


def count_sequences_by_subspace(
    m: int, d: int, nondeg_counts: Mapping[int, int] | None = None
) -> int:
    """Sum over k of N_k * #(d-tuples spanning a fixed k-dim space).

    Groups defining sequences by their span; independent of the
    tuple-scanning route.
    """
    if d < 1:
        raise UsageError(f"need d >= 1, got {d}")
    D = f2core.lambda_dim(m)
    if nondeg_counts is None:
        nondeg_counts = nondegenerate_counts(m, min(d, D))
    total = 0
    for k in range(1, min(d, D) + 1):
        total += nondeg_counts.get(k, 0) * surjection_count(d, k)
    return total


def _row_order(n: int) -> list[tuple[int, int]]:
    return sorted(spaces.admissible_params(n), key=lambda md: -md[0])


def table1(n_max: int) -> list[CountReport]:
    """All (n, m, d) rows with 3 <= n <= n_max, in the published order."""
    if not 3 <= n_max <= 8:
        raise UsageError(f"n_max={n_max} outside the supported range 3..8")
    rows = []
    for n in range(3, n_max + 1):
        for m, d in _row_order(n):
            t = gaussian_binomial(n, d)
            s = count_sequences_by_subspace(m, d)
            rows.append(CountReport(n=n, m=m, d=d, t=t, s=s, total=s * t))
    return rows


def total_operations(n: int) -> int:
    """Sum of s * t over the admissible rows of one total dimension."""
    return sum(r.total for r in table1(n) if r.n == n)
