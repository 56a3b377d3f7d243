"""The congruence action of GL(m, 2) on subspaces of Lambda_m.

Orbit enumeration is a level-synchronous BFS over canonical subspace keys:
generator images are table lookups, deduplication goes through a shared
bitset indexed by the packed key, and workers split each level into chunks
(phase 1) and word-aligned key ranges (phase 2), so results never depend
on the schedule.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterator, Sequence

import numba
import numpy as np

from . import _kernels, _tables, f2core, spaces
from .errors import CheckpointError, InfeasibleError, ResourceError, UsageError

CENSUS_FORMAT = "bibrace-census-v1"

# packed-key BFS needs the whole key space as a bitset; beyond this the
# generic Python walker takes over
_BITMAP_MAX_BITS = 30
_PY_ORBIT_BUDGET = 1 << 21
_BFS_CHUNK = 1 << 18

ProgressFn = Callable[[str, dict], None]


def set_workers(n: int | None) -> int:
    """Clamp and apply the worker count for the numba thread pool."""
    limit = numba.config.NUMBA_NUM_THREADS
    if n is None:
        return numba.get_num_threads()
    if n < 1:
        raise UsageError(f"worker count must be >= 1, got {n}")
    n = min(n, limit)
    numba.set_num_threads(n)
    return n


@dataclass(frozen=True)
class GroupElement:
    """An element of GL(m, 2)."""

    matrix: f2core.F2Matrix

    def __post_init__(self) -> None:
        if not self.matrix.is_invertible():
            raise UsageError("group elements must be invertible")

    @property
    def m(self) -> int:
        return self.matrix.nrows


@dataclass(frozen=True)
class OrbitClass:
    """One congruence class of subspaces of Lambda_m."""

    representative: spaces.SkewSpace
    rank_seq: spaces.RankSequence
    cardinality: int
    nondegenerate: bool
    primitive_for_d: int | None


@dataclass(frozen=True)
class ClassifyResult:
    classes: tuple[OrbitClass, ...]
    n_classes: int
    n_primitive: int


@dataclass(frozen=True)
class MatrixGroup:
    """A subgroup of GL(m, 2); element list materialized for small m only."""

    m: int
    order: int
    generators: tuple[GroupElement, ...] = ()
    elements_packed: np.ndarray | None = None

    def elements(self) -> Iterator[GroupElement]:
        if self.elements_packed is None:
            raise InfeasibleError("element list was not materialized for this group")
        for code in self.elements_packed:
            yield GroupElement(_tables.pk_to_matrix(int(code), self.m))

    def element_codes(self) -> frozenset[int]:
        if self.elements_packed is None:
            raise InfeasibleError("element list was not materialized for this group")
        return frozenset(int(c) for c in self.elements_packed)

    def __contains__(self, A: GroupElement) -> bool:
        return _tables.pk_from_matrix(A.matrix) in self.element_codes()


def gl_order(m: int) -> int:
    """prod_{j<m} (2^m - 2^j), the order of GL(m, 2)."""
    if m < 1:
        raise UsageError(f"need m >= 1, got {m}")
    out = 1
    for j in range(m):
        out *= (1 << m) - (1 << j)
    return out


def gl_generators(m: int) -> tuple[GroupElement, ...]:
    """The m(m-1) elementary transvections I + e_ab, a != b."""
    return tuple(GroupElement(T) for T in _tables.transvection_matrices(m))


def act(A: "GroupElement | f2core.F2Matrix", S: spaces.SkewSpace) -> spaces.SkewSpace:
    """Canonical image of S under congruence by A."""
    M = A.matrix if isinstance(A, GroupElement) else A
    if M.nrows != S.m:
        raise UsageError(f"size mismatch: A is {M.nrows}x{M.ncols}, space has m={S.m}")
    if not M.is_invertible():
        raise UsageError("congruence by a singular matrix")
    return spaces.canonicalize(
        [f2core.congruence_unchecked(M, B) for B in S.basis_matrices()], m=S.m
    )


# -- BFS internals ----------------------------------------------------------

def _new_visited(kD: int) -> np.ndarray:
    return np.zeros(max(1, (1 << kD) >> 6), np.int64)


def _nchunks() -> int:
    return max(1, numba.get_num_threads() * 4)


def _bfs_bitmap(
    frontier: np.ndarray,
    k: int,
    m: int,
    visited: np.ndarray,
    card: int,
    minkey: int,
    level_cb: Callable[[np.ndarray, int, int], None] | None = None,
    targets: Sequence[int] = (),
    chunk: int = _BFS_CHUNK,
) -> tuple[int, int, bool]:
    """Expand to closure; frontier keys must already be marked visited.

    Returns (cardinality, minimal key, hit) where hit reports whether any
    target key was visited (search stops at that level boundary).
    """
    tables = _tables.gen_action_tables(m)
    D = f2core.lambda_dim(m)
    G = tables.shape[0]
    total_keys = 1 << (k * D)
    nparts = numba.get_num_threads()
    while frontier.size:
        pieces = []
        for s in range(0, frontier.size, chunk):
            f = frontier[s : s + chunk]
            cands = np.empty(f.size * G, np.int64)
            _kernels.bfs_phase1(f, tables, k, D, cands, _nchunks())
            flags = np.zeros(cands.size, np.uint8)
            _kernels.bfs_phase2_mark(cands, visited, flags, total_keys, nparts)
            pieces.append(cands[flags.view(bool)])
        frontier = np.concatenate(pieces) if pieces else np.empty(0, np.int64)
        if frontier.size:
            card += int(frontier.size)
            minkey = min(minkey, int(frontier.min()))
        for t in targets:
            if (int(visited[t >> 6]) >> (t & 63)) & 1:
                return card, minkey, True
        if level_cb is not None:
            level_cb(frontier, card, minkey)
    return card, minkey, False


def _run_orbit(seed: int, k: int, m: int, visited: np.ndarray) -> tuple[int, int]:
    _kernels.visit_mark(visited, seed)
    card, minkey, _ = _bfs_bitmap(np.array([seed], np.int64), k, m, visited, 1, seed)
    return card, minkey


def _orbit_class_from(rep_key: int, k: int, m: int, card: int) -> OrbitClass:
    rep = spaces.SkewSpace.from_key(rep_key, k, m)
    nondeg = spaces.is_nondegenerate(rep)
    return OrbitClass(
        representative=rep,
        rank_seq=spaces.rank_sequence(rep),
        cardinality=card,
        nondegenerate=nondeg,
        primitive_for_d=k if nondeg else None,
    )


def _orbit_of_python(S: spaces.SkewSpace, budget: int) -> OrbitClass:
    gens = [g.matrix for g in gl_generators(S.m)]
    seen = {S.key}
    frontier = [S]
    rep = S
    while frontier:
        nxt = []
        for T in frontier:
            for A in gens:
                img = act(A, T)
                if img.key not in seen:
                    seen.add(img.key)
                    nxt.append(img)
                    if img.key < rep.key:
                        rep = img
                    if len(seen) > budget:
                        raise ResourceError(
                            f"orbit exceeded the {budget}-state budget; "
                            "no packed-key path exists for this (m, dim)"
                        )
        frontier = nxt
    return OrbitClass(
        representative=rep,
        rank_seq=spaces.rank_sequence(rep),
        cardinality=len(seen),
        nondegenerate=spaces.is_nondegenerate(rep),
        primitive_for_d=S.dim if spaces.is_nondegenerate(rep) else None,
    )


def orbit_of(
    S: spaces.SkewSpace,
    *,
    workers: int | None = None,
    memory_budget: int | None = None,
) -> OrbitClass:
    """Closure of {S} under all generators; deterministic representative.

    The representative is the member with the lexicographically least
    canonical key; cardinality times the self-congruence order is |GL(m,2)|.
    """
    if S.dim < 1:
        raise UsageError("orbit of the zero space is not defined; need dim >= 1")
    set_workers(workers)
    k, D = S.dim, S.ambient_dim
    if k * D > _BITMAP_MAX_BITS:
        return _orbit_of_python(S, _PY_ORBIT_BUDGET)
    need = (1 << (k * D)) >> 3
    if memory_budget is not None and need > memory_budget:
        raise ResourceError(
            f"visited bitset needs {need} bytes, over the {memory_budget}-byte "
            "budget; rerun with a larger budget"
        )
    visited = _new_visited(k * D)
    card, minkey = _run_orbit(S.key, k, S.m, visited)
    return _orbit_class_from(minkey, k, S.m, card)


# -- seed streams -----------------------------------------------------------

def _seed_stream(
    m: int, k: int, skip: int, chunk_size: int = 1 << 20
) -> Iterator[tuple[np.ndarray, int]]:
    """(keys, global offset) chunks of the canonical seed scan, after skip."""
    D = f2core.lambda_dim(m)
    consumed = 0
    for pivots in combinations(range(D), k):
        base, slot_row, slot_pos = spaces._cell_layout(pivots, D, k)
        n_cell = 1 << len(slot_row)
        if consumed + n_cell <= skip:
            consumed += n_cell
            continue
        start = max(0, skip - consumed)
        while start < n_cell:
            n = min(chunk_size, n_cell - start)
            out = np.empty(n, np.int64)
            _kernels.fill_cell_keys(base, slot_row, slot_pos, k, D, start, n, out)
            yield out, consumed + start
            start += n
        consumed += n_cell


# -- classification ---------------------------------------------------------

def classify(
    m: int,
    d: int,
    *,
    workers: int | None = None,
    progress: ProgressFn | None = None,
) -> ClassifyResult:
    """Congruence classes of nondegenerate k-dim subspaces for 1 <= k <= d.

    ``n_primitive`` counts the classes with k = d, i.e. the primitive
    algebras for these parameters.
    """
    if m >= 6 and d > 2:
        raise InfeasibleError(
            f"classify(m={m}, d={d}) is infeasible: orbit runs on k >= 3 "
            f"subspaces of Lambda_{m} exceed the supported key width"
        )
    if (m, d) not in spaces.admissible_params(m + d):
        raise UsageError(f"(m={m}, d={d}) is not an admissible parameter pair")
    set_workers(workers)
    D = f2core.lambda_dim(m)
    masks = _tables.kermasks(m)
    classes: list[OrbitClass] = []
    for k in range(1, min(d, D) + 1):
        visited = _new_visited(k * D)
        for chunk, _off in _seed_stream(m, k, 0):
            pos = 0
            while True:
                idx = int(_kernels.find_seed(chunk, visited, masks, k, D, True, pos))
                if idx < 0:
                    break
                seed = int(chunk[idx])
                pos = idx + 1
                card, minkey = _run_orbit(seed, k, m, visited)
                cls = _orbit_class_from(minkey, k, m, card)
                classes.append(cls)
                if progress is not None:
                    progress("class", {"k": k, "cardinality": card})
    classes.sort(key=lambda c: (c.representative.dim, c.representative.key))
    n_primitive = sum(1 for c in classes if c.representative.dim == d)
    return ClassifyResult(tuple(classes), len(classes), n_primitive)


# -- full 2-dimensional census with checkpointing ----------------------------

class _CensusState:
    def __init__(self, m: int):
        self.m = m
        self.D = f2core.lambda_dim(m)
        self.visited = _new_visited(2 * self.D)
        self.done: list[tuple[int, int]] = []  # (rep key, cardinality)
        self.cursor = 0
        self.partial: dict | None = None  # seed/card/minkey + frontier


def _census_save(path: str, st: _CensusState, frontier: np.ndarray | None) -> None:
    meta = {
        "format": CENSUS_FORMAT,
        "m": st.m,
        "cursor": st.cursor,
        "partial": None
        if st.partial is None
        else {k: v for k, v in st.partial.items() if k != "frontier"},
    }
    tmp = path + ".tmp"
    np.savez_compressed(
        tmp,
        meta=np.array(json.dumps(meta)),
        visited=st.visited,
        done=np.array(st.done, np.int64).reshape(-1, 2),
        frontier=frontier if frontier is not None else np.empty(0, np.int64),
    )
    os.replace(tmp + ".npz" if not tmp.endswith(".npz") else tmp, path)


def _census_load(path: str, m: int) -> _CensusState:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path!r}: {exc}") from None
    try:
        meta = json.loads(str(data["meta"]))
    except Exception:
        raise CheckpointError(f"checkpoint {path!r} has no readable metadata") from None
    if meta.get("format") != CENSUS_FORMAT:
        raise CheckpointError(
            f"checkpoint format {meta.get('format')!r} does not match {CENSUS_FORMAT!r}"
        )
    if meta.get("m") != m:
        raise CheckpointError(f"checkpoint is for m={meta.get('m')}, requested m={m}")
    st = _CensusState(m)
    st.visited = data["visited"].astype(np.int64, copy=True)
    st.done = [(int(a), int(b)) for a, b in data["done"]]
    st.cursor = int(meta["cursor"])
    if meta["partial"] is not None:
        st.partial = dict(meta["partial"])
        st.partial["frontier"] = data["frontier"].astype(np.int64, copy=True)
    return st


class _Lock:
    def __init__(self, path: str | None):
        self.path = path + ".lock" if path else None
        self.fd: int | None = None

    def __enter__(self):
        if self.path is not None:
            try:
                self.fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                raise ResourceError(
                    f"lock file {self.path!r} exists; another census owns this "
                    "checkpoint (remove the file if that run is dead)"
                ) from None
        return self

    def __exit__(self, *exc):
        if self.fd is not None:
            os.close(self.fd)
            os.unlink(self.path)
        return False


def census_2dim(
    m: int,
    *,
    workers: int | None = None,
    checkpoint_path: str | None = None,
    resume: bool = False,
    checkpoint_interval: int = 50_000_000,
    progress: ProgressFn | None = None,
) -> list[OrbitClass]:
    """Full orbit partition of all 2-dim subspaces of Lambda_m.

    Degenerate spaces included; cardinalities sum to the Gaussian binomial
    (dim Lambda_m choose 2)_2.  With a checkpoint path the visited bitset,
    finished classes, scan cursor, and any in-flight orbit frontier are
    persisted so an interrupted run resumes where it stopped.
    """
    if not 2 <= m <= 6:
        raise InfeasibleError(f"census is supported for 2 <= m <= 6, got m={m}")
    if f2core.lambda_dim(m) < 2:
        return []
    set_workers(workers)
    if resume and not checkpoint_path:
        raise UsageError("resume requires a checkpoint path")
    st = _census_load(checkpoint_path, m) if resume else _CensusState(m)
    k, D = 2, st.D
    masks = _tables.kermasks(m)
    since_save = 0

    def maybe_save(frontier: np.ndarray | None, force: bool = False) -> None:
        nonlocal since_save
        if checkpoint_path is None:
            return
        if not force and since_save < checkpoint_interval:
            return
        _census_save(checkpoint_path, st, frontier)
        since_save = 0
        if progress is not None:
            progress("checkpoint", {"path": checkpoint_path, "classes": len(st.done)})

    def run_from(frontier: np.ndarray, card: int, minkey: int, seed: int) -> None:
        nonlocal since_save

        def cb(front: np.ndarray, c: int, mk: int) -> None:
            nonlocal since_save
            since_save += int(front.size)
            st.partial = {"seed": seed, "card": c, "minkey": mk, "frontier": front}
            maybe_save(front)

        card, minkey, _ = _bfs_bitmap(frontier, k, m, st.visited, card, minkey, cb)
        st.partial = None
        st.done.append((minkey, card))
        if progress is not None:
            progress("class", {"cardinality": card, "classes": len(st.done)})
        maybe_save(None)

    with _Lock(checkpoint_path):
        if st.partial is not None:
            p = st.partial
            run_from(p["frontier"], int(p["card"]), int(p["minkey"]), int(p["seed"]))
        for chunk, off in _seed_stream(m, k, st.cursor):
            pos = 0
            while True:
                idx = int(_kernels.find_seed(chunk, st.visited, masks, k, D, False, pos))
                if idx < 0:
                    break
                seed = int(chunk[idx])
                pos = idx + 1
                _kernels.visit_mark(st.visited, seed)
                since_save += 1
                run_from(np.array([seed], np.int64), 1, seed, seed)
            st.cursor = off + int(chunk.size)
        if checkpoint_path is not None:
            maybe_save(None, force=True)

    total = spaces.count_subspaces(m, 2)
    got = sum(c for _, c in st.done)
    if got != total:
        raise RuntimeError(f"census lost orbits: {got} != {total}")
    out = [_orbit_class_from(rep, 2, m, card) for rep, card in st.done]
    out.sort(key=lambda c: c.representative.key)
    return out


# -- stabilizers and self-congruence groups ----------------------------------

def _whole_gl(m: int) -> MatrixGroup:
    if m <= 5:
        codes = _tables.gl_codes(m)
        return MatrixGroup(m=m, order=gl_order(m), elements_packed=codes)
    return MatrixGroup(m=m, order=gl_order(m))


def symplectic_stabilizer(B: f2core.SkewMatrix) -> MatrixGroup:
    """Syp(B) = {A : A B A^t = B}.

    Materialized by filtering GL(m, 2) for m <= 5; for m = 6 only the order
    is returned, from the orbit of B by orbit-stabilizer.
    """
    m = B.m
    if B.is_zero():
        return _whole_gl(m)
    if m <= 5:
        codes = _tables.gl_codes(m)
        pi, pj = _tables.pair_arrays(m)
        D = f2core.lambda_dim(m)
        flags = np.zeros(codes.shape[0], np.uint8)
        _kernels.matrix_stabilizer_flags(codes, m, D, pi, pj, f2core.flat_bits(B), flags)
        sel = codes[flags.view(bool)]
        return MatrixGroup(m=m, order=int(sel.size), elements_packed=sel)
    if m == 6:
        orbit = orbit_of(spaces.space_from_flats([f2core.flat_bits(B)], m))
        order, rem = divmod(gl_order(m), orbit.cardinality)
        assert rem == 0
        return MatrixGroup(m=m, order=order)
    raise InfeasibleError(f"symplectic stabilizer unsupported for m={m}")


def self_congruence_group(S: spaces.SkewSpace) -> MatrixGroup:
    """Syc(S) = {A : A S A^t = S}; order-only for m = 6."""
    m = S.m
    if S.dim == 0:
        return _whole_gl(m)
    if m <= 5:
        codes = _tables.gl_codes(m)
        pi, pj = _tables.pair_arrays(m)
        D = f2core.lambda_dim(m)
        basis = np.array(S.basis, np.int64)
        pivs = np.array([(v & -v).bit_length() - 1 for v in S.basis], np.int64)
        flags = np.zeros(codes.shape[0], np.uint8)
        _kernels.space_stabilizer_flags(codes, m, D, pi, pj, basis, pivs, flags)
        sel = codes[flags.view(bool)]
        return MatrixGroup(m=m, order=int(sel.size), elements_packed=sel)
    if m == 6:
        orbit = orbit_of(S)
        order, rem = divmod(gl_order(m), orbit.cardinality)
        assert rem == 0
        return MatrixGroup(m=m, order=order)
    raise InfeasibleError(f"self-congruence group unsupported for m={m}")


def _mulclose(gens: Sequence[int], m: int) -> set[int]:
    ident = _tables.pk_from_matrix(f2core.F2Matrix.identity(m))
    els = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _tables.pk_mul(g, x, m)
                if y not in els:
                    els.add(y)
                    nxt.append(y)
        frontier = nxt
    return els


def _generating_subset(codes: Sequence[int], m: int) -> list[int]:
    gens: list[int] = []
    closure = _mulclose(gens, m)
    for x in sorted(codes):
        if x not in closure:
            gens.append(x)
            closure = _mulclose(gens, m)
    return gens


def _pointwise_stabilizer_codes(S: spaces.SkewSpace) -> set[int]:
    """Intersection of Syp(B) over the basis of S (= over all of S)."""
    out: set[int] | None = None
    for B in S.basis_matrices():
        codes = symplectic_stabilizer(B).element_codes()
        out = set(codes) if out is None else out & codes
    assert out is not None
    return out


def verify_prop_conjugacy(
    S1: spaces.SkewSpace, S2: spaces.SkewSpace, Z: GroupElement
) -> bool:
    """Check Z^-1 (Syp(B1) ^ Syp(B2)) Z = Syp(C1) ^ Syp(C2) element-wise.

    Z must witness the congruence: act(Z, S2) = S1.
    """
    m = S1.m
    if m > 4:
        raise InfeasibleError("conjugacy verification materializes groups; m <= 4 only")
    if S1.dim != 2 or S2.dim != 2 or S2.m != m:
        raise UsageError("both spaces must be 2-dimensional subspaces of the same Lambda_m")
    if act(Z, S2) != S1:
        raise UsageError("Z is not a congruence witness: act(Z, S2) != S1")
    g_b = _pointwise_stabilizer_codes(S1)
    g_c = _pointwise_stabilizer_codes(S2)
    zc = _tables.pk_from_matrix(Z.matrix)
    zinv = _tables.pk_inv(zc, m)
    conj = {_tables.pk_mul(_tables.pk_mul(zinv, x, m), zc, m) for x in g_b}
    return conj == g_c


def syc_via_normalizer(S: spaces.SkewSpace) -> MatrixGroup:
    """Syc via the normalizer route: filter a right transversal of G in N.

    G is the pointwise stabilizer of S, N its normalizer in GL(m, 2); the
    result must agree with the brute-force self_congruence_group.
    """
    m = S.m
    if m > 4:
        raise InfeasibleError("normalizer route materializes GL(m,2); m <= 4 only")
    if S.dim != 2:
        raise UsageError("normalizer route is defined for 2-dimensional spaces")
    g_codes = _pointwise_stabilizer_codes(S)
    gens = _generating_subset(g_codes, m)
    all_codes = [int(c) for c in _tables.gl_codes(m)]
    inv = {a: _tables.pk_inv(a, m) for a in all_codes}
    normalizer = [
        a
        for a in all_codes
        if all(_tables.pk_mul(_tables.pk_mul(a, g, m), inv[a], m) in g_codes for g in gens)
    ]
    covered: set[int] = set()
    transversal = []
    for a in sorted(normalizer):
        if a in covered:
            continue
        transversal.append(a)
        covered.update(_tables.pk_mul(g, a, m) for g in g_codes)
    key = S.key
    fixers = [
        t
        for t in transversal
        if act(GroupElement(_tables.pk_to_matrix(t, m)), S).key == key
    ]
    closure = _mulclose(gens + fixers, m)
    sel = np.array(sorted(closure), np.int64)
    gen_elems = tuple(GroupElement(_tables.pk_to_matrix(c, m)) for c in gens + fixers)
    return MatrixGroup(m=m, order=len(closure), generators=gen_elems, elements_packed=sel)


# -- congruence witnesses ----------------------------------------------------

def find_congruence_witness(
    S1: spaces.SkewSpace, S2: spaces.SkewSpace
) -> f2core.F2Matrix | None:
    """Some A with act(A, S1) = S2, as a product of transvections, or None.

    BFS with back-pointers; supported while packed keys fit (k*D <= 30).
    """
    if S1.m != S2.m or S1.dim != S2.dim:
        return None
    m, k = S1.m, S1.dim
    if S1 == S2:
        return f2core.F2Matrix.identity(m)
    D = f2core.lambda_dim(m)
    if k * D > _BITMAP_MAX_BITS:
        raise InfeasibleError("witness search needs packed keys (k * dim too large)")
    word = _witness_word(S1.key, S2.key, k, m)
    if word is None:
        return None
    gens = gl_generators(m)
    A = f2core.F2Matrix.identity(m)
    for g in word:
        A = gens[g].matrix.mul(A)  # later generators act after earlier ones
    return A


def _witness_word(seed: int, target: int, k: int, m: int) -> list[int] | None:
    """Generator indices g1..gL with act(g_L ... g_1, seed-space) = target."""
    tables = _tables.gen_action_tables(m)
    D = f2core.lambda_dim(m)
    G = tables.shape[0]
    total_keys = 1 << (k * D)
    visited = _new_visited(k * D)
    _kernels.visit_mark(visited, seed)
    scratch = _scratch(k)
    # global node ids: 0 = seed, then discovery order level by level
    levels: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    level_start = [0]  # global id of each level's first node
    frontier = np.array([seed], np.int64)
    while frontier.size:
        start_next = level_start[-1] + (frontier.size if levels else 1)
        pieces = []
        for s in range(0, frontier.size, _BFS_CHUNK):
            f = frontier[s : s + _BFS_CHUNK]
            cands = np.empty(f.size * G, np.int64)
            _kernels.bfs_phase1(f, tables, k, D, cands, scratch)
            flags = np.zeros(cands.size, np.uint8)
            _kernels.bfs_phase2_mark(cands, visited, flags, total_keys)
            pos = np.flatnonzero(flags)
            pieces.append((cands[pos], pos // G + (level_start[-1] + s), pos % G))
        keys = np.concatenate([p[0] for p in pieces])
        if keys.size == 0:
            return None
        parents = np.concatenate([p[1] for p in pieces])
        gens = np.concatenate([p[2] for p in pieces])
        levels.append((keys, parents, gens))
        level_start.append(start_next)
        hit = np.flatnonzero(keys == target)
        if hit.size:
            word: list[int] = []
            lvl = len(levels) - 1
            node = int(hit[0])
            while lvl >= 0:
                keys_l, parents_l, gens_l = levels[lvl]
                word.append(int(gens_l[node]))
                parent = int(parents_l[node])
                if lvl == 0:
                    break
                node = parent - level_start[lvl]
                lvl -= 1
            word.reverse()
            return word
        frontier = keys
    return None
