"""Numba-compiled inner loops.

Everything here works on plain int64 scalars and numpy arrays:

* flattened skew matrices are ints with bit t = coordinate t of Lambda_m;
* a k-dim subspace is packed big-endian as ``v0 << (k-1)D | ... | v_{k-1}``
  where (v0, ..., v_{k-1}) is its reduced-echelon basis (pivot = lowest
  set bit, pivots strictly increasing);
* kernel masks pack {x in F_2^m \\ 0 : x B = 0} as bits x-1, so a tuple of
  matrices is nondegenerate exactly when the AND of its masks is zero;
* m x m invertible matrices are packed row-major, m bits per row.

The Python-facing modules own all orchestration; nothing in this file
mutates shared state except the visited bitsets passed in explicitly.
"""

import numpy as np
from numba import njit, prange

_M1 = 0x5555555555555555
_M2 = 0x3333333333333333
_M4 = 0x0F0F0F0F0F0F0F0F
_MUL = 0x0101010101010101


@njit(cache=True, inline="always")
def _popcnt(x):
    x = x - ((x >> 1) & _M1)
    x = (x & _M2) + ((x >> 2) & _M2)
    x = (x + (x >> 4)) & _M4
    return ((x * _MUL) >> 56) & 0xFF


@njit(cache=True, inline="always")
def _ctz(x):
    return _popcnt((x & -x) - 1)


@njit(cache=True)
def subset_xor_table(basis_imgs):
    """table[v] = XOR of basis_imgs[t] over set bits t of v, all v < 2^D."""
    D = basis_imgs.shape[0]
    out = np.zeros(1 << D, np.int64)
    for v in range(1, 1 << D):
        out[v] = out[v & (v - 1)] ^ basis_imgs[_ctz(v)]
    return out


@njit(cache=True)
def kermask_table(m, pi, pj):
    """Nonzero-left-kernel masks for every flattened skew matrix.

    Bit (x-1) of out[v] is set when x * unflatten(v) = 0, x != 0.
    """
    D = pi.shape[0]
    out = np.empty(1 << D, np.int64)
    rows = np.empty(m, np.int64)
    xb = np.empty(1 << m, np.int64)
    for v in range(1 << D):
        for i in range(m):
            rows[i] = 0
        t = v
        while t:
            b = _ctz(t)
            rows[pi[b]] |= np.int64(1) << pj[b]
            rows[pj[b]] |= np.int64(1) << pi[b]
            t &= t - 1
        xb[0] = 0
        mask = np.int64(0)
        for x in range(1, 1 << m):
            xb[x] = xb[x & (x - 1)] ^ rows[_ctz(x)]
            if xb[x] == 0:
                mask |= np.int64(1) << (x - 1)
        out[v] = mask
    return out


@njit(cache=True)
def rank_table_from_kermasks(kermasks, m):
    """rank(B_v) = m - dim ker(B_v); kernel size is popcount+1."""
    out = np.empty(kermasks.shape[0], np.uint8)
    for v in range(kermasks.shape[0]):
        size = _popcnt(kermasks[v]) + 1
        dim = 0
        while (1 << dim) < size:
            dim += 1
        out[v] = m - dim
    return out


@njit(cache=True, inline="always")
def _rref_pack(w, k, D):
    """Reduce the k rows of w to canonical echelon form; return packed key."""
    r = 0
    for c in range(D):
        p = -1
        for i in range(r, k):
            if (w[i] >> c) & 1:
                p = i
                break
        if p < 0:
            continue
        t = w[r]
        w[r] = w[p]
        w[p] = t
        for i in range(k):
            if i != r and ((w[i] >> c) & 1):
                w[i] ^= w[r]
        r += 1
        if r == k:
            break
    key = np.int64(0)
    for i in range(k):
        key = (key << D) | w[i]
    return key


@njit(cache=True)
def rref_pack_rows(rows, D):
    w = rows.copy()
    return _rref_pack(w, w.shape[0], D)


@njit(cache=True, inline="always")
def _unpack_key(key, k, D, out):
    mask = (np.int64(1) << D) - 1
    for i in range(k):
        out[k - 1 - i] = (key >> (i * D)) & mask


@njit(cache=True, parallel=True)
def bfs_phase1(frontier, tables, k, D, cands, nchunks):
    """Candidate keys for one BFS level: every generator applied to every state.

    Workers take contiguous frontier chunks; cands[idx * G + g] is
    deterministic regardless of thread count.
    """
    G = tables.shape[0]
    Dmask = (np.int64(1) << D) - 1
    n = frontier.shape[0]
    csize = (n + nchunks - 1) // nchunks
    for c in prange(nchunks):
        lo = c * csize
        hi = min(n, lo + csize)
        w = np.empty(k, np.int64)
        for idx in range(lo, hi):
            key = frontier[idx]
            if k == 1:
                for g in range(G):
                    cands[idx * G + g] = tables[g, key]
            elif k == 2:
                v0 = (key >> D) & Dmask
                v1 = key & Dmask
                for g in range(G):
                    a = tables[g, v0]
                    b = tables[g, v1]
                    pa = a & (-a)
                    pb = b & (-b)
                    if pa == pb:
                        b ^= a
                        pb = b & (-b)
                    if pa > pb:
                        t = a
                        a = b
                        b = t
                        pb = pa
                    if a & pb:
                        a ^= b
                    cands[idx * G + g] = (a << D) | b
            else:
                for g in range(G):
                    kk = key
                    for i in range(k):
                        w[k - 1 - i] = tables[g, kk & Dmask]
                        kk >>= D
                    cands[idx * G + g] = _rref_pack(w, k, D)


@njit(cache=True, parallel=True)
def bfs_phase2_mark(cands, visited, flags, total_keys, nparts):
    """Insert-if-absent into the shared visited bitset.

    Workers own disjoint word-aligned key ranges, so marking is race-free
    and the flags outcome is schedule-independent.
    """
    words = total_keys >> 6
    n = cands.shape[0]
    for t in prange(nparts):
        lo = (words * t // nparts) << 6
        hi = total_keys if t == nparts - 1 else (words * (t + 1) // nparts) << 6
        if lo == hi:
            continue
        for i in range(n):
            key = cands[i]
            if lo <= key < hi:
                w = key >> 6
                b = key & 63
                if not (visited[w] >> b) & 1:
                    visited[w] |= np.int64(1) << b
                    flags[i] = 1


@njit(cache=True)
def visit_mark(visited, key):
    """Single test-and-set; returns True when key was new."""
    w = key >> 6
    b = key & 63
    if (visited[w] >> b) & 1:
        return False
    visited[w] |= np.int64(1) << b
    return True


@njit(cache=True)
def fill_cell_keys(pivot_base, slot_row, slot_pos, k, D, start, n, out):
    """Keys of one echelon pivot cell for counter values [start, start+n).

    pivot_base[i] carries row i's pivot bit; counter bit s toggles the free
    position slot_pos[s] of row slot_row[s].
    """
    nslots = slot_row.shape[0]
    w = np.empty(k, np.int64)
    for t in range(n):
        for i in range(k):
            w[i] = pivot_base[i]
        c = start + t
        while c:
            s = _ctz(c)
            w[slot_row[s]] |= np.int64(1) << slot_pos[s]
            c &= c - 1
        key = np.int64(0)
        for i in range(k):
            key = (key << D) | w[i]
        out[t] = key


@njit(cache=True)
def cell_nondeg_count(pivot_base, slot_row, slot_pos, k, D, masks):
    """Count nondegenerate subspaces inside one pivot cell."""
    nslots = slot_row.shape[0]
    w = np.empty(k, np.int64)
    count = 0
    for c in range(1 << nslots):
        for i in range(k):
            w[i] = pivot_base[i]
        cc = c
        while cc:
            s = _ctz(cc)
            w[slot_row[s]] |= np.int64(1) << slot_pos[s]
            cc &= cc - 1
        acc = np.int64(-1)
        for i in range(k):
            acc &= masks[w[i]]
        if acc == 0:
            count += 1
    return count


@njit(cache=True)
def find_seed(keys, visited, masks, k, D, require_nondeg, start):
    """First index >= start whose key is unvisited (and nondegenerate if asked)."""
    Dmask = (np.int64(1) << D) - 1
    for i in range(start, keys.shape[0]):
        key = keys[i]
        if (visited[key >> 6] >> (key & 63)) & 1:
            continue
        if require_nondeg:
            acc = np.int64(-1)
            kk = key
            for _ in range(k):
                acc &= masks[kk & Dmask]
                kk >>= D
            if acc != 0:
                continue
        return i
    return -1


@njit(cache=True)
def is_nondeg_key(key, masks, k, D):
    Dmask = (np.int64(1) << D) - 1
    acc = np.int64(-1)
    kk = key
    for _ in range(k):
        acc &= masks[kk & Dmask]
        kk >>= D
    return acc == 0


@njit(cache=True)
def _count_from(masks, d, level0, mask0):
    """Ordered tuples extending a prefix whose final kernel mask is zero."""
    NM = masks.shape[0]
    if mask0 == 0:
        p = np.int64(1)
        for _ in range(d - level0):
            p *= NM
        return p
    if level0 == d:
        return np.int64(0)
    total = np.int64(0)
    idx = np.zeros(d, np.int64)
    pref = np.zeros(d, np.int64)
    pref[level0] = mask0
    lvl = level0
    while True:
        if idx[lvl] == NM:
            idx[lvl] = 0
            lvl -= 1
            if lvl < level0:
                break
            idx[lvl] += 1
            continue
        nm = pref[lvl] & masks[idx[lvl]]
        if nm == 0:
            p = np.int64(1)
            for _ in range(d - 1 - lvl):
                p *= NM
            total += p
            idx[lvl] += 1
        elif lvl == d - 1:
            idx[lvl] += 1
        else:
            pref[lvl + 1] = nm
            idx[lvl + 1] = 0
            lvl += 1
    return total


@njit(cache=True, parallel=True)
def count_full_rank_tuples(masks, d):
    """Number of ordered d-tuples of skew matrices with full-rank concatenation."""
    NM = masks.shape[0]
    total = np.int64(0)
    for i0 in prange(NM):
        total += _count_from(masks, d, 1, masks[i0])
    return total


@njit(cache=True, inline="always")
def _pk_row(code, i, m):
    return (code >> (i * m)) & ((np.int64(1) << m) - 1)


@njit(cache=True, inline="always")
def _pk_rank(code, m):
    rows = np.empty(m, np.int64)
    for i in range(m):
        rows[i] = _pk_row(code, i, m)
    r = 0
    for c in range(m):
        p = -1
        for i in range(r, m):
            if (rows[i] >> c) & 1:
                p = i
                break
        if p < 0:
            continue
        t = rows[r]
        rows[r] = rows[p]
        rows[p] = t
        for i in range(r + 1, m):
            if (rows[i] >> c) & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


@njit(cache=True)
def materialize_gl(m):
    """Row-packed codes of all invertible m x m matrices over GF(2)."""
    n = np.int64(1) << (m * m)
    flags = np.zeros(n, np.uint8)
    count = 0
    for code in range(n):
        if _pk_rank(code, m) == m:
            flags[code] = 1
            count += 1
    out = np.empty(count, np.int64)
    j = 0
    for code in range(n):
        if flags[code]:
            out[j] = code
            j += 1
    return out


@njit(cache=True, inline="always")
def pk_congr_flat(code, flat, m, D, pi, pj):
    """Flattened A * B * A^t for a row-packed A and flattened skew B."""
    rows = np.empty(m, np.int64)
    for i in range(m):
        rows[i] = 0
    t = flat
    while t:
        b = _ctz(t)
        rows[pi[b]] |= np.int64(1) << pj[b]
        rows[pj[b]] |= np.int64(1) << pi[b]
        t &= t - 1
    ab = np.empty(m, np.int64)
    for i in range(m):
        r = _pk_row(code, i, m)
        acc = np.int64(0)
        while r:
            j = _ctz(r)
            acc ^= rows[j]
            r &= r - 1
        ab[i] = acc
    out = np.int64(0)
    for t in range(D):
        i = pi[t]
        j = pj[t]
        aj = _pk_row(code, j, m)
        if _popcnt(ab[i] & aj) & 1:
            out |= np.int64(1) << t
    return out


@njit(cache=True)
def space_stabilizer_flags(codes, m, D, pi, pj, basis, pivs, flags):
    """flags[i] = 1 when codes[i] maps the span of basis onto itself.

    basis must be in reduced echelon form with pivot bits pivs.
    """
    k = basis.shape[0]
    for i in range(codes.shape[0]):
        code = codes[i]
        ok = True
        for t in range(k):
            w = pk_congr_flat(code, basis[t], m, D, pi, pj)
            for s in range(k):
                if (w >> pivs[s]) & 1:
                    w ^= basis[s]
            if w != 0:
                ok = False
                break
        flags[i] = 1 if ok else 0


@njit(cache=True)
def matrix_stabilizer_flags(codes, m, D, pi, pj, flat, flags):
    """flags[i] = 1 when codes[i] fixes the single matrix flat under congruence."""
    for i in range(codes.shape[0]):
        flags[i] = 1 if pk_congr_flat(codes[i], flat, m, D, pi, pj) == flat else 0


@njit(cache=True)
def bibrace_identity_scan(ptab, m, d, grouping):
    """Exhaustive biskew identity check over all (x, y, z) triples.

    grouping 0 checks ((x+z) o z) o (y+z) on the right-hand side, 1 checks
    (x+z) o (z o (y+z)).  Returns -1 on success, else the packed failing
    triple x | y << n | z << 2n.
    """
    n = m + d
    N = 1 << n
    Mm = (1 << m) - 1
    for x in range(N):
        xm = x & Mm
        for y in range(N):
            cxy = x ^ y ^ (np.int64(ptab[xm, y & Mm]) << m)
            xym = (x ^ y) & Mm
            for z in range(N):
                zm = z & Mm
                # (x+y) o z == (x o z) + z + (y o z)
                lhs = x ^ y ^ z ^ (np.int64(ptab[xym, zm]) << m)
                rhs = (
                    x ^ z ^ (np.int64(ptab[xm, zm]) << m)
                    ^ z
                    ^ y ^ z ^ (np.int64(ptab[y & Mm, zm]) << m)
                )
                if lhs != rhs:
                    return np.int64(x) | (np.int64(y) << n) | (np.int64(z) << (2 * n))
                # (x o y) + z == biskew combination of translated terms
                lhs2 = cxy ^ z
                xz = x ^ z
                yz = y ^ z
                if grouping == 0:
                    u = xz ^ z ^ (np.int64(ptab[xz & Mm, zm]) << m)
                    rhs2 = u ^ yz ^ (np.int64(ptab[u & Mm, yz & Mm]) << m)
                else:
                    u = z ^ yz ^ (np.int64(ptab[zm, yz & Mm]) << m)
                    rhs2 = xz ^ u ^ (np.int64(ptab[xz & Mm, u & Mm]) << m)
                if lhs2 != rhs2:
                    return np.int64(x) | (np.int64(y) << n) | (np.int64(z) << (2 * n))
    return np.int64(-1)


@njit(cache=True)
def alternating_nilpotent_scan(ptab, m, d):
    """Exhaustive x*x = 0 and (x*y)*z = 0 check; -1 on success."""
    n = m + d
    N = 1 << n
    Mm = (1 << m) - 1
    for x in range(N):
        if ptab[x & Mm, x & Mm] != 0:
            return np.int64(x)
    for x in range(N):
        xm = x & Mm
        for y in range(N):
            p = np.int64(ptab[xm, y & Mm]) << m
            # the product lives in 0 + W, so its V part is zero
            pm = p & Mm
            for z in range(N):
                if ptab[pm, z & Mm] != 0 or ptab[z & Mm, pm] != 0:
                    return np.int64(x) | (np.int64(y) << n) | (np.int64(z) << (2 * n))
    return np.int64(-1)
