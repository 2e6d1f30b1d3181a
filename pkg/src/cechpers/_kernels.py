"""Compiled kernels: enclosing-ball radii, clique expansion and GF(2) reductions.

Simplex values are always computed from vertex indices sorted ascending so
that every code path produces bit-identical radii for the same simplex.
"""
import numpy as np
from numba import njit
from numba import types
from numba.typed import Dict

_TOL = 1e-12


@njit(cache=True)
def sqdist(P, i, j):
    s = 0.0
    for c in range(P.shape[1]):
        t = P[i, c] - P[j, c]
        s += t * t
    return s


@njit(cache=True)
def edge_value(P, i, j):
    return 0.5 * np.sqrt(sqdist(P, i, j))


@njit(cache=True)
def _meb3_center(P, i, j, k, out):
    """Radius of the smallest ball around points i, j, k; center written to out."""
    a = sqdist(P, j, k)
    b = sqdist(P, i, k)
    c = sqdist(P, i, j)
    # obtuse or right: the longest side is a diameter
    if a >= b + c:
        for t in range(P.shape[1]):
            out[t] = 0.5 * (P[j, t] + P[k, t])
        return 0.5 * np.sqrt(a)
    if b >= a + c:
        for t in range(P.shape[1]):
            out[t] = 0.5 * (P[i, t] + P[k, t])
        return 0.5 * np.sqrt(b)
    if c >= a + b:
        for t in range(P.shape[1]):
            out[t] = 0.5 * (P[i, t] + P[j, t])
        return 0.5 * np.sqrt(c)
    wa = a * (b + c - a)
    wb = b * (c + a - b)
    wc = c * (a + b - c)
    s = wa + wb + wc
    for t in range(P.shape[1]):
        out[t] = (wa * P[i, t] + wb * P[j, t] + wc * P[k, t]) / s
    return _meb3_sq(a, b, c)


@njit(cache=True)
def _meb3_sq(a, b, c):
    """Enclosing radius of a triangle from its squared side lengths."""
    if a >= b + c:
        return 0.5 * np.sqrt(a)
    if b >= a + c:
        return 0.5 * np.sqrt(b)
    if c >= a + b:
        return 0.5 * np.sqrt(c)
    # squared circumradius from squared side lengths (Heron)
    h = 2.0 * (a * b + b * c + c * a) - a * a - b * b - c * c
    return np.sqrt(a * b * c / h)


@njit(cache=True)
def meb3(P, i, j, k):
    return _meb3_sq(sqdist(P, j, k), sqdist(P, i, k), sqdist(P, i, j))


@njit(cache=True)
def _solve_small(G, rhs):
    """Gaussian elimination with partial pivoting; returns (x, ok)."""
    m = G.shape[0]
    A = G.copy()
    x = rhs.copy()
    scale = 0.0
    for r in range(m):
        scale = max(scale, abs(A[r, r]))
    if scale == 0.0:
        return x, False
    for col in range(m):
        piv = col
        for r in range(col + 1, m):
            if abs(A[r, col]) > abs(A[piv, col]):
                piv = r
        if abs(A[piv, col]) <= 1e-13 * scale:
            return x, False
        if piv != col:
            for c in range(m):
                tmp = A[col, c]
                A[col, c] = A[piv, c]
                A[piv, c] = tmp
            tmp = x[col]
            x[col] = x[piv]
            x[piv] = tmp
        for r in range(col + 1, m):
            f = A[r, col] / A[col, col]
            for c in range(col, m):
                A[r, c] -= f * A[col, c]
            x[r] -= f * x[col]
    for r in range(m - 1, -1, -1):
        s = x[r]
        for c in range(r + 1, m):
            s -= A[r, c] * x[c]
        x[r] = s / A[r, r]
    return x, True


@njit(cache=True)
def _circumball(P, idx, center):
    """Circumscribed ball of the affine hull of P[idx]; returns squared radius or -1."""
    m = idx.shape[0]
    d = P.shape[1]
    p0 = idx[0]
    A = np.empty((m - 1, d))
    for r in range(m - 1):
        for c in range(d):
            A[r, c] = P[idx[r + 1], c] - P[p0, c]
    G = A @ A.T
    rhs = np.empty(m - 1)
    for r in range(m - 1):
        rhs[r] = 0.5 * G[r, r]
    lam, ok = _solve_small(G, rhs)
    if not ok:
        return -1.0
    r2 = 0.0
    for c in range(d):
        s = 0.0
        for r in range(m - 1):
            s += lam[r] * A[r, c]
        center[c] = P[p0, c] + s
        r2 += s * s
    return r2


@njit(cache=True)
def _contains(P, idx, center, r2):
    lim = r2 * (1.0 + 2.0 * _TOL) + 1e-300
    for t in range(idx.shape[0]):
        s = 0.0
        for c in range(P.shape[1]):
            u = P[idx[t], c] - center[c]
            s += u * u
        if s > lim:
            return False
    return True


@njit(cache=True)
def meb_general(P, idx):
    """Smallest enclosing ball radius by exhaustive support-set enumeration."""
    m = idx.shape[0]
    d = P.shape[1]
    best = np.inf
    center = np.empty(d)
    sub = np.empty(m, np.int64)
    for mask in range(1, 1 << m):
        k = 0
        for t in range(m):
            if mask >> t & 1:
                sub[k] = idx[t]
                k += 1
        if k == 1:
            if m > 1:
                continue
            return 0.0
        r2 = _circumball(P, sub[:k], center)
        if r2 < 0.0 or r2 >= best:
            continue
        if _contains(P, idx, center, r2):
            best = r2
    return np.sqrt(best)


@njit(cache=True)
def _in_ball(P, w, center, r2, rel):
    s = 0.0
    for c in range(P.shape[1]):
        u = P[w, c] - center[c]
        s += u * u
    return s <= r2 * (1.0 + rel) + 1e-300


@njit(cache=True)
def meb4(P, a, b, c, e):
    """Smallest enclosing ball radius of four points."""
    center = np.empty(P.shape[1])
    best = np.inf
    # a face ball that already holds the fourth point is the answer
    for skip in range(4):
        if skip == 0:
            i, j, k, o = b, c, e, a
        elif skip == 1:
            i, j, k, o = a, c, e, b
        elif skip == 2:
            i, j, k, o = a, b, e, c
        else:
            i, j, k, o = a, b, c, e
        r = _meb3_center(P, i, j, k, center)
        if r < best and _in_ball(P, o, center, r * r, 2 * _TOL):
            best = r
    if best < np.inf:
        return best
    quad = np.array([a, b, c, e], dtype=np.int64)
    r2 = _circumball(P, quad, center)
    if r2 >= 0.0:
        return np.sqrt(r2)
    return meb_general(P, quad)


@njit(cache=True)
def tri_value(P, a, b, c):
    # sqrt is monotone, so the largest edge value is 0.5 * sqrt(max squared side)
    x = sqdist(P, b, c)
    y = sqdist(P, a, c)
    z = sqdist(P, a, b)
    return max(_meb3_sq(x, y, z), 0.5 * np.sqrt(max(x, y, z)))


@njit(cache=True)
def tet_value(P, a, b, c, e):
    v = meb4(P, a, b, c, e)
    v = max(v, tri_value(P, a, b, c), tri_value(P, a, b, e))
    return max(v, tri_value(P, a, c, e), tri_value(P, b, c, e))


@njit(cache=True)
def meb_radius(P, idx):
    m = idx.shape[0]
    if m == 1:
        return 0.0
    if m == 2:
        return edge_value(P, idx[0], idx[1])
    if m == 3:
        return meb3(P, idx[0], idx[1], idx[2])
    if m == 4:
        return meb4(P, idx[0], idx[1], idx[2], idx[3])
    return meb_general(P, idx)


@njit(cache=True)
def encode(row, n):
    code = 0
    for t in range(row.shape[0]):
        code = code * n + row[t]
    return code


@njit(cache=True)
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    pos = np.searchsorted(indices[lo:hi], v)
    return pos < hi - lo and indices[lo + pos] == v


@njit(cache=True)
def _grow(arr, need):
    if need <= arr.shape[0]:
        return arr
    size = max(need, 2 * arr.shape[0])
    out = np.empty((size,) + arr.shape[1:], arr.dtype)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def expand(P, indptr, indices, S, vals, codes, cap, n):
    """Cliques one dimension up whose guarded value is at most cap.

    S holds k-simplices sorted lexicographically with their values and codes;
    output rows are again in lexicographic order.
    """
    M, k1 = S.shape
    out = np.empty((max(16, M), k1 + 1), np.int64)
    ov = np.empty(out.shape[0])
    cnt = 0
    row = np.empty(k1 + 1, np.int64)
    fac = np.empty(k1, np.int64)
    for s in range(M):
        last = S[s, k1 - 1]
        for a in range(indptr[last], indptr[last + 1]):
            w = indices[a]
            if w <= last:
                continue
            ok = True
            for t in range(k1 - 1):
                if not _has_edge(indptr, indices, S[s, t], w):
                    ok = False
                    break
            if not ok:
                continue
            for t in range(k1):
                row[t] = S[s, t]
            row[k1] = w
            # facets through w must already be present
            v = vals[s]
            for drop in range(k1):
                q = 0
                for t in range(k1 + 1):
                    if t != drop:
                        fac[q] = row[t]
                        q += 1
                c = encode(fac, n)
                pos = np.searchsorted(codes, c)
                if pos == codes.shape[0] or codes[pos] != c:
                    ok = False
                    break
                v = max(v, vals[pos])
            if not ok:
                continue
            v = max(v, meb_radius(P, row))
            if v > cap:
                continue
            if cnt == out.shape[0]:
                out = _grow(out, cnt + 1)
                ov = _grow(ov, cnt + 1)
            out[cnt] = row
            ov[cnt] = v
            cnt += 1
    return out[:cnt].copy(), ov[:cnt].copy()


@njit(cache=True)
def _xor_into(work, m, pool, s, e, tmp):
    a = 0
    b = s
    c = 0
    while a < m and b < e:
        if work[a] < pool[b]:
            tmp[c] = work[a]
            a += 1
        elif work[a] > pool[b]:
            tmp[c] = pool[b]
            b += 1
        else:
            a += 1
            b += 1
            continue
        c += 1
    while a < m:
        tmp[c] = work[a]
        a += 1
        c += 1
    while b < e:
        tmp[c] = pool[b]
        b += 1
        c += 1
    return c


@njit(cache=True)
def reduce_twist(ptr, idx, dims, top):
    """Homology reduction with clearing, dimensions processed top-down.

    Columns are filtration positions; ptr/idx give sorted boundary rows.
    Returns (pair_low, pair_col) arrays.
    """
    N = dims.shape[0]
    owner = np.full(N, -1, np.int64)
    cleared = np.zeros(N, np.bool_)
    start = np.zeros(N, np.int64)
    stop = np.zeros(N, np.int64)
    pool = np.empty(max(16, idx.shape[0]), np.int64)
    used = 0
    work = np.empty(16, np.int64)
    tmp = np.empty(16, np.int64)
    lows = np.empty(N, np.int64)
    cols = np.empty(N, np.int64)
    npair = 0
    for k in range(top, 0, -1):
        for j in range(N):
            if dims[j] != k or cleared[j]:
                continue
            m = ptr[j + 1] - ptr[j]
            work = _grow(work, m)
            work[:m] = idx[ptr[j]:ptr[j + 1]]
            while m > 0:
                o = owner[work[m - 1]]
                if o == -1:
                    break
                need = m + stop[o] - start[o]
                if need > tmp.shape[0]:
                    tmp = np.empty(2 * need, np.int64)
                    work = _grow(work, 2 * need)
                m = _xor_into(work, m, pool, start[o], stop[o], tmp)
                work[:m] = tmp[:m]
            if m > 0:
                low = work[m - 1]
                pool = _grow(pool, used + m)
                pool[used:used + m] = work[:m]
                start[j] = used
                stop[j] = used + m
                used += m
                owner[low] = j
                cleared[low] = True
                lows[npair] = low
                cols[npair] = j
                npair += 1
    return lows[:npair].copy(), cols[:npair].copy()


@njit(cache=True)
def reduce_dual(ptr, idx, dims, top):
    """Cohomology reduction with clearing, dimensions processed bottom-up.

    ptr/idx give sorted coboundary rows; columns of dimension k are visited
    in decreasing filtration order and the pivot is the smallest row.
    Returns (pair_col, pair_pivot, essential) arrays.
    """
    N = dims.shape[0]
    owner = np.full(N, -1, np.int64)
    cleared = np.zeros(N, np.bool_)
    start = np.zeros(N, np.int64)
    stop = np.zeros(N, np.int64)
    pool = np.empty(16, np.int64)
    used = 0
    work = np.empty(16, np.int64)
    tmp = np.empty(16, np.int64)
    cols = np.empty(N, np.int64)
    pivs = np.empty(N, np.int64)
    ess = np.empty(N, np.int64)
    npair = 0
    ness = 0
    for k in range(top):
        for j in range(N - 1, -1, -1):
            if dims[j] != k or cleared[j]:
                continue
            m = ptr[j + 1] - ptr[j]
            work = _grow(work, m)
            work[:m] = idx[ptr[j]:ptr[j + 1]]
            touched = False
            while m > 0:
                o = owner[work[0]]
                if o == -1:
                    break
                if start[o] == -1:
                    src, s, e = idx, ptr[o], ptr[o + 1]
                else:
                    src, s, e = pool, start[o], stop[o]
                need = m + e - s
                if need > tmp.shape[0]:
                    tmp = np.empty(2 * need, np.int64)
                    work = _grow(work, 2 * need)
                m = _xor_into(work, m, src, s, e, tmp)
                work[:m] = tmp[:m]
                touched = True
            if m > 0:
                piv = work[0]
                if not touched:
                    start[j] = -1
                else:
                    pool = _grow(pool, used + m)
                    pool[used:used + m] = work[:m]
                    start[j] = used
                    stop[j] = used + m
                    used += m
                owner[piv] = j
                cleared[piv] = True
                cols[npair] = j
                pivs[npair] = piv
                npair += 1
            else:
                ess[ness] = j
                ness += 1
    return cols[:npair].copy(), pivs[:npair].copy(), ess[:ness].copy()


# ---------------------------------------------------------------------------
# implicit engine: coboundaries enumerated on the fly from the proximity graph


@njit(cache=True)
def _cofacets(P, indptr, indices, row, cap, n, codes, vals):
    """Cofacets of the simplex `row` (size 2 or 3) with value <= cap."""
    k1 = row.shape[0]
    u = row[0]
    cnt = 0
    full = np.empty(k1 + 1, np.int64)
    for a in range(indptr[u], indptr[u + 1]):
        w = indices[a]
        skip = False
        for t in range(k1):
            if row[t] == w:
                skip = True
                break
        if skip:
            continue
        ok = True
        for t in range(1, k1):
            if not _has_edge(indptr, indices, row[t], w):
                ok = False
                break
        if not ok:
            continue
        # sorted insertion of w
        q = 0
        placed = False
        for t in range(k1):
            if not placed and w < row[t]:
                full[q] = w
                q += 1
                placed = True
            full[q] = row[t]
            q += 1
        if not placed:
            full[q] = w
        if k1 == 2:
            v = tri_value(P, full[0], full[1], full[2])
        else:
            v = tet_value(P, full[0], full[1], full[2], full[3])
        if v > cap:
            continue
        if cnt == codes.shape[0]:
            codes = _grow(codes, cnt + 1)
            vals = _grow(vals, cnt + 1)
        codes[cnt] = encode(full, n)
        vals[cnt] = v
        cnt += 1
    return cnt, codes, vals


@njit(cache=True)
def _less(va, ca, vb, cb):
    return va < vb or (va == vb and ca < cb)


@njit(cache=True)
def _heap_push(hv, hc, size, v, c):
    if size == hv.shape[0]:
        hv = _grow(hv, size + 1)
        hc = _grow(hc, size + 1)
    i = size
    hv[i] = v
    hc[i] = c
    while i > 0:
        p = (i - 1) >> 1
        if _less(hv[i], hc[i], hv[p], hc[p]):
            hv[i], hv[p] = hv[p], hv[i]
            hc[i], hc[p] = hc[p], hc[i]
            i = p
        else:
            break
    return hv, hc, size + 1


@njit(cache=True)
def _heap_pop(hv, hc, size):
    size -= 1
    hv[0] = hv[size]
    hc[0] = hc[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        m = l
        if l + 1 < size and _less(hv[l + 1], hc[l + 1], hv[l], hc[l]):
            m = l + 1
        if _less(hv[m], hc[m], hv[i], hc[i]):
            hv[i], hv[m] = hv[m], hv[i]
            hc[i], hc[m] = hc[m], hc[i]
            i = m
        else:
            break
    return size


@njit(cache=True)
def _heap_pivot(hv, hc, size):
    """Drop cancelling pairs at the top; returns (size, found)."""
    while size > 0:
        c = hc[0]
        v = hv[0]
        size = _heap_pop(hv, hc, size)
        if size > 0 and hc[0] == c:
            size = _heap_pop(hv, hc, size)
            continue
        hv, hc, size = _heap_push(hv, hc, size, v, c)
        return size, True
    return size, False


@njit(cache=True)
def _zero_cofacet(P, indptr, indices, row, val, n):
    """Code of the smallest cofacet whose value equals the simplex value, or -1.

    Candidates are visited in increasing vertex order, which is increasing
    code order, so the first hit is the (value, code)-minimal cofacet.
    """
    k1 = row.shape[0]
    center = np.empty(P.shape[1])
    if k1 == 2:
        for c in range(P.shape[1]):
            center[c] = 0.5 * (P[row[0], c] + P[row[1], c])
        r2 = 0.25 * sqdist(P, row[0], row[1])
    else:
        rr = _meb3_center(P, row[0], row[1], row[2], center)
        r2 = rr * rr
    full = np.empty(k1 + 1, np.int64)
    u = row[0]
    for a in range(indptr[u], indptr[u + 1]):
        w = indices[a]
        if not _in_ball(P, w, center, r2, 1e-6):
            continue
        skip = False
        for t in range(k1):
            if row[t] == w:
                skip = True
                break
        if skip:
            continue
        ok = True
        for t in range(1, k1):
            if not _has_edge(indptr, indices, row[t], w):
                ok = False
                break
        if not ok:
            continue
        q = 0
        placed = False
        for t in range(k1):
            if not placed and w < row[t]:
                full[q] = w
                q += 1
                placed = True
            full[q] = row[t]
            q += 1
        if not placed:
            full[q] = w
        if k1 == 2:
            v = tri_value(P, full[0], full[1], full[2])
        else:
            v = tet_value(P, full[0], full[1], full[2], full[3])
        if v == val:
            return encode(full, n)
    return -1


@njit(cache=True)
def _decode(code, n, k1, out):
    for t in range(k1 - 1, -1, -1):
        out[t] = code % n
        code //= n


@njit(cache=True)
def _value_of(P, row):
    if row.shape[0] == 2:
        return edge_value(P, row[0], row[1])
    if row.shape[0] == 3:
        return tri_value(P, row[0], row[1], row[2])
    return tet_value(P, row[0], row[1], row[2], row[3])


@njit(cache=True)
def _apparent_facet(P, indptr, indices, code, k1, n):
    """Facet code forming an apparent pair with the (k1+1)-vertex simplex `code`, or -1.

    The pair is apparent when the facet is the latest facet in filtration
    order and the simplex is its earliest cofacet; such pairs are persistence
    pairs, so they never need to be stored.
    """
    top = np.empty(k1 + 1, np.int64)
    _decode(code, n, k1 + 1, top)
    val = _value_of(P, top)
    f = np.empty(k1, np.int64)
    best_code = -1
    best_val = -1.0
    for drop in range(k1 + 1):
        q = 0
        for t in range(k1 + 1):
            if t != drop:
                f[q] = top[t]
                q += 1
        v = _value_of(P, f)
        c = encode(f, n)
        if v > best_val or (v == best_val and c > best_code):
            best_val = v
            best_code = c
    if best_val != val:
        return -1
    _decode(best_code, n, k1, f)
    if _zero_cofacet(P, indptr, indices, f, val, n) == code:
        return best_code
    return -1


@njit(cache=True)
def _compact(hv, hc, size):
    """Cancel duplicate heap entries in pairs and re-sort; a sorted array is a heap."""
    o = np.argsort(hc[:size])
    kc = np.empty(size, np.int64)
    kv = np.empty(size)
    keep = 0
    t = 0
    while t < size:
        run = 1
        while t + run < size and hc[o[t + run]] == hc[o[t]]:
            run += 1
        if run % 2 == 1:
            kc[keep] = hc[o[t]]
            kv[keep] = hv[o[t]]
            keep += 1
        t += run
    o2 = np.argsort(kv[:keep], kind="mergesort")
    for t in range(keep):
        hc[t] = kc[o2[t]]
        hv[t] = kv[o2[t]]
    return keep


@njit(cache=True)
def cohomology_stage(P, indptr, indices, Scodes, k1, Svals, skip, cap, n, want_piv, heap_budget):
    """One dimension of implicit cohomology reduction with clearing.

    Scodes holds the codes of simplices with k1 vertices (2 or 3) sorted by
    (value, code); entries flagged in skip are negative and not reduced.
    Apparent pairs are recognised on the fly and never stored.  Other
    reduced columns keep their cochain (simplex codes) and the coboundary is
    regenerated when the column is used; working columns live in a lazy heap
    that is compacted when it grows.

    Returns births, deaths (positive persistence only), essential births,
    pivot codes of every pair (only when want_piv) and a status that is 0 on
    success or the offending heap size when heap_budget was exceeded.
    """
    M = Scodes.shape[0]
    owner = Dict.empty(key_type=types.int64, value_type=types.int64)
    pool = np.empty(1024, np.int64)
    used = 0
    row = np.empty(k1, np.int64)
    cc = np.empty(256, np.int64)
    cv = np.empty(256)
    hv = np.empty(1024)
    hc = np.empty(1024, np.int64)
    vw = np.empty(64, np.int64)
    births = np.empty(64)
    deaths = np.empty(64)
    piv_codes = np.empty(1024 if want_piv else 1, np.int64)
    ess = np.empty(64)
    npair = 0
    npiv = 0
    ness = 0
    lim = 1 << 22
    for r in range(M - 1, -1, -1):
        if skip[r]:
            continue
        code = Scodes[r]
        _decode(code, n, k1, row)
        z = _zero_cofacet(P, indptr, indices, row, Svals[r], n)
        if z != -1 and _apparent_facet(P, indptr, indices, z, k1, n) == code:
            if want_piv:
                if npiv == piv_codes.shape[0]:
                    piv_codes = _grow(piv_codes, npiv + 1)
                piv_codes[npiv] = z
                npiv += 1
            continue
        m, cc, cv = _cofacets(P, indptr, indices, row, cap, n, cc, cv)
        size = 0
        for t in range(m):
            hv, hc, size = _heap_push(hv, hc, size, cv[t], cc[t])
        nv = 1
        vw[0] = code
        while True:
            size, found = _heap_pivot(hv, hc, size)
            if not found:
                break
            p = hc[0]
            f = -1
            if p in owner:
                lo = owner[p]
                hi = lo + 1 + pool[lo]
                lo += 1
            else:
                f = _apparent_facet(P, indptr, indices, p, k1, n)
                if f == -1:
                    break
                lo = -1
                hi = 0
            for q in range(lo, hi):
                s = f if lo == -1 else pool[q]
                if nv == vw.shape[0]:
                    vw = _grow(vw, nv + 1)
                vw[nv] = s
                nv += 1
                _decode(s, n, k1, row)
                m2, cc, cv = _cofacets(P, indptr, indices, row, cap, n, cc, cv)
                for t in range(m2):
                    hv, hc, size = _heap_push(hv, hc, size, cv[t], cc[t])
            if size > lim:
                size = _compact(hv, hc, size)
                if size > heap_budget:
                    return births[:npair].copy(), deaths[:npair].copy(), ess[:ness].copy(), piv_codes[:npiv].copy(), size
                lim = max(lim, min(2 * size, heap_budget))
        if not found:
            if ness == ess.shape[0]:
                ess = _grow(ess, ness + 1)
            ess[ness] = Svals[r]
            ness += 1
            continue
        piv = hc[0]
        pval = hv[0]
        # consolidate the cochain over GF(2) and store it behind its length
        vs = np.sort(vw[:nv])
        keep = 0
        t = 0
        while t < nv:
            if t + 1 < nv and vs[t + 1] == vs[t]:
                t += 2
                continue
            vs[keep] = vs[t]
            keep += 1
            t += 1
        pool = _grow(pool, used + keep + 1)
        pool[used] = keep
        pool[used + 1:used + 1 + keep] = vs[:keep]
        owner[piv] = used
        used += keep + 1
        if want_piv:
            if npiv == piv_codes.shape[0]:
                piv_codes = _grow(piv_codes, npiv + 1)
            piv_codes[npiv] = piv
            npiv += 1
        if pval > Svals[r]:
            if npair == births.shape[0]:
                births = _grow(births, npair + 1)
                deaths = _grow(deaths, npair + 1)
            births[npair] = Svals[r]
            deaths[npair] = pval
            npair += 1
    return births[:npair].copy(), deaths[:npair].copy(), ess[:ness].copy(), piv_codes[:npiv].copy(), 0


@njit(cache=True)
def edge_list(P, pairs, cap):
    """Edges (i<j) from candidate pairs with value <= cap."""
    E = pairs.shape[0]
    keep = np.empty(E, np.bool_)
    vals = np.empty(E)
    for e in range(E):
        i = pairs[e, 0]
        j = pairs[e, 1]
        v = edge_value(P, min(i, j), max(i, j))
        vals[e] = v
        keep[e] = v <= cap
    return keep, vals


@njit(cache=True)
def _triangle_pass(P, indptr, indices, cap, codes, vals, fill):
    n = indptr.shape[0] - 1
    cnt = 0
    for i in range(n):
        for a in range(indptr[i], indptr[i + 1]):
            j = indices[a]
            if j <= i:
                continue
            p = a + 1
            q = indptr[j]
            pe = indptr[i + 1]
            qe = indptr[j + 1]
            while p < pe and q < qe:
                x = indices[p]
                y = indices[q]
                if x < y:
                    p += 1
                elif y < x:
                    q += 1
                else:
                    v = tri_value(P, i, j, x)
                    if v <= cap:
                        if fill:
                            codes[cnt] = (i * n + j) * n + x
                            vals[cnt] = v
                        cnt += 1
                    p += 1
                    q += 1
    return cnt


@njit(cache=True)
def triangles(P, indptr, indices, cap):
    """Codes and values of all triangles of value <= cap, in code order."""
    cnt = _triangle_pass(P, indptr, indices, cap, np.empty(0, np.int64), np.empty(0), False)
    codes = np.empty(cnt, np.int64)
    vals = np.empty(cnt)
    _triangle_pass(P, indptr, indices, cap, codes, vals, True)
    return codes, vals


@njit(cache=True)
def union_find_h0(n, E, order):
    """Kruskal over edges in filtration order; returns mask of merging edges."""
    parent = np.arange(n)
    rank = np.zeros(n, np.int64)
    neg = np.zeros(order.shape[0], np.bool_)
    for t in range(order.shape[0]):
        e = order[t]
        a = E[e, 0]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = E[e, 1]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        neg[e] = True
    return neg
