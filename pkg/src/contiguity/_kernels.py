"""Compiled inner loops for the randomized contiguity walk."""
import numba as nb
import numpy as np


@nb.njit(cache=True, inline="always")
def _sorted_unique(buf, m):
    # insertion sort of buf[:m] followed by in-place dedup; returns new length
    for i in range(1, m):
        key = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > key:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = key
    k = 1
    for i in range(1, m):
        if buf[i] != buf[k - 1]:
            buf[k] = buf[i]
            k += 1
    return k


@nb.njit(cache=True)
def is_simplex(buf, m, edge_tab, tri_tab, use_tables, codes, base, max_size):
    """Is the vertex multiset ``buf[:m]`` a simplex?  ``buf`` is clobbered."""
    k = _sorted_unique(buf, m)
    if k == 1:
        return True
    if k > max_size:
        return False
    if use_tables:
        if k == 2:
            return edge_tab[buf[0], buf[1]]
        if k == 3:
            return tri_tab[buf[0], buf[1], buf[2]]
    code = 0
    mult = 1
    for i in range(k):
        code += (buf[i] + 1) * mult
        mult *= base
    pos = np.searchsorted(codes, code)
    return pos < codes.shape[0] and codes[pos] == code


@nb.njit(cache=True)
def _admissible(f, v, cand, buf, xfacets, star_ptr, star_idx, nbr_ptr, nbr_idx, ny,
                edge_tab, tri_tab, use_tables, codes, base, max_size, contiguous):
    """Fill ``cand`` with values u != f[v] keeping the map simplicial
    (and contiguous to ``f`` when ``contiguous``); return how many."""
    s0 = star_ptr[v]
    s1 = star_ptr[v + 1]
    # u must be adjacent or equal to the image of some other vertex in a star facet
    anchor = -1
    for t in range(s0, s1):
        fac = star_idx[t]
        for j in range(xfacets.shape[1]):
            w = xfacets[fac, j]
            if w < 0:
                break
            if w != v:
                anchor = f[w]
                break
        if anchor >= 0:
            break
    nc = 0
    if anchor >= 0:
        lo = nbr_ptr[anchor]
        hi = nbr_ptr[anchor + 1]
    else:
        lo = 0
        hi = ny
    fv = f[v]
    for q in range(lo, hi):
        u = nbr_idx[q] if anchor >= 0 else q
        if u == fv:
            continue
        ok = True
        for t in range(s0, s1):
            fac = star_idx[t]
            m = 0
            for j in range(xfacets.shape[1]):
                w = xfacets[fac, j]
                if w < 0:
                    break
                buf[m] = u if w == v else f[w]
                m += 1
            if contiguous:
                buf[m] = fv
                m += 1
            if not is_simplex(buf, m, edge_tab, tri_tab, use_tables, codes, base, max_size):
                ok = False
                break
        if ok:
            cand[nc] = u
            nc += 1
    return nc


@nb.njit(cache=True, inline="always")
def _admissible_graph(f, v, cand, xnbr_ptr, xnbr_idx, nbr_ptr, nbr_idx, ny,
                      pair_tab, triple_tab, contiguous):
    """Graph-domain version of :func:`_admissible` using full ordered lookup tables."""
    lo_x = xnbr_ptr[v]
    hi_x = xnbr_ptr[v + 1]
    fv = f[v]
    nc = 0
    if lo_x == hi_x:
        for u in range(ny):
            if u != fv:
                cand[nc] = u
                nc += 1
        return nc
    anchor = f[xnbr_idx[lo_x]]
    for q in range(nbr_ptr[anchor], nbr_ptr[anchor + 1]):
        u = nbr_idx[q]
        if u == fv:
            continue
        ok = True
        for t in range(lo_x, hi_x):
            fw = f[xnbr_idx[t]]
            if contiguous:
                if not triple_tab[fw, fv, u]:
                    ok = False
                    break
            elif not pair_tab[fw, u]:
                ok = False
                break
        if ok:
            cand[nc] = u
            nc += 1
    return nc


@nb.njit(cache=True, nogil=True)
def walk(f0, g, movable, xfacets, star_ptr, star_idx, nbr_ptr, nbr_idx, ny,
         edge_tab, tri_tab, use_tables, codes, base, max_size, dist,
         kappa, max_iters, contiguous, max_attempts, seed, record,
         graph_mode, xnbr_ptr, xnbr_idx, pair_tab, triple_tab):
    """Randomized local search from ``f0`` towards ``g``.

    Returns ``(found, iterations, vertices, values)``; when ``record`` is set
    the last two hold the accepted single-vertex changes in order.
    """
    np.random.seed(seed)
    f = f0.copy()
    n = f.shape[0]
    mismatch = 0
    for i in range(n):
        if f[i] != g[i]:
            mismatch += 1
    cap = max_iters if record else 0
    rec_v = np.empty(cap, dtype=np.int64)
    rec_u = np.empty(cap, dtype=np.int64)
    nrec = 0
    cand = np.empty(ny, dtype=np.int64)
    buf = np.empty(2 * xfacets.shape[1] + 2, dtype=np.int64)
    nmov = movable.shape[0]
    it = 0
    while True:
        if mismatch == 0:
            return True, it, rec_v[:nrec], rec_u[:nrec]
        if it >= max_iters or nmov == 0:
            return False, it, rec_v[:nrec], rec_u[:nrec]
        it += 1
        for _ in range(max_attempts):
            v = movable[np.random.randint(nmov)]
            if graph_mode:
                nc = _admissible_graph(f, v, cand, xnbr_ptr, xnbr_idx, nbr_ptr, nbr_idx, ny,
                                       pair_tab, triple_tab, contiguous)
            else:
                nc = _admissible(f, v, cand, buf, xfacets, star_ptr, star_idx, nbr_ptr, nbr_idx,
                                 ny, edge_tab, tri_tab, use_tables, codes, base, max_size,
                                 contiguous)
            if nc == 0:
                continue
            u = cand[np.random.randint(nc)]
            alpha = np.random.random()
            gv = g[v]
            if alpha < kappa or dist[u, gv] <= dist[f[v], gv]:
                if f[v] == gv:
                    mismatch += 1
                elif u == gv:
                    mismatch -= 1
                f[v] = u
                if record:
                    rec_v[nrec] = v
                    rec_u[nrec] = u
                    nrec += 1
                break


@nb.njit(cache=True)
def sum_distances(dist, f, catalog):
    """Map distance from ``f`` to every row of ``catalog``."""
    out = np.zeros(catalog.shape[0], dtype=np.int64)
    for r in range(catalog.shape[0]):
        s = 0
        for i in range(f.shape[0]):
            s += dist[f[i], catalog[r, i]]
        out[r] = s
    return out


@nb.njit(cache=True, nogil=True)
def walk_circle(f0, g, base_fixed, adm_count, adm_list, dist, kappa, max_iters,
                max_attempts, seed, record):
    """:func:`walk` specialised to the k-gon domain.

    ``adm_list[a, b, c, :adm_count[a, b, c]]`` lists the admissible new values
    at a vertex whose left neighbour, current value and right neighbour map
    to ``a``, ``b`` and ``c``.
    """
    np.random.seed(seed)
    f = f0.copy()
    k = f.shape[0]
    mismatch = 0
    for i in range(k):
        if f[i] != g[i]:
            mismatch += 1
    cap = max_iters if record else 0
    rec_v = np.empty(cap, dtype=np.int64)
    rec_u = np.empty(cap, dtype=np.int64)
    nrec = 0
    lo = 1 if base_fixed else 0
    nmov = k - lo
    it = 0
    while True:
        if mismatch == 0:
            return True, it, rec_v[:nrec], rec_u[:nrec]
        if it >= max_iters or nmov == 0:
            return False, it, rec_v[:nrec], rec_u[:nrec]
        it += 1
        for _ in range(max_attempts):
            v = lo + np.random.randint(nmov)
            left = f[v - 1] if v > 0 else f[k - 1]
            right = f[v + 1] if v < k - 1 else f[0]
            fv = f[v]
            nc = adm_count[left, fv, right]
            if nc == 0:
                continue
            u = adm_list[left, fv, right, np.random.randint(nc)]
            alpha = np.random.random()
            gv = g[v]
            if alpha < kappa or dist[u, gv] <= dist[fv, gv]:
                if fv == gv:
                    mismatch += 1
                elif u == gv:
                    mismatch -= 1
                f[v] = u
                if record:
                    rec_v[nrec] = v
                    rec_u[nrec] = u
                    nrec += 1
                break


@nb.njit(cache=True)
def circle_tables(pair_tab, triple_tab, contiguous):
    """Admissible-value lists for :func:`walk_circle`, indexed by (left, current, right)."""
    ny = pair_tab.shape[0]
    count = np.zeros((ny, ny, ny), dtype=np.int32)
    width = 1
    for a in range(ny):
        deg = 0
        for b in range(ny):
            if pair_tab[a, b]:
                deg += 1
        width = max(width, deg)
    lists = np.zeros((ny, ny, ny, width), dtype=np.int32)
    for a in range(ny):
        for b in range(ny):
            for c in range(ny):
                n = 0
                for u in range(ny):
                    if u == b or not pair_tab[a, u]:
                        continue
                    if contiguous:
                        ok = triple_tab[a, b, u] and triple_tab[b, u, c]
                    else:
                        ok = pair_tab[u, c]
                    if ok:
                        lists[a, b, c, n] = u
                        n += 1
                count[a, b, c] = n
    return count, lists


@nb.njit(cache=True)
def enumerate_closed_walks(nbr_ptr, nbr_idx, reach, base, k, limit):
    """Sorted codes of all closed walks of length ``k`` at ``base``.

    A walk ``w`` is coded as ``sum(w[i] * ny**(k-1-i))``; ``reach[j, a]`` is
    nonzero when a walk of length ``j`` leads from ``a`` back to ``base``.
    Returns an empty array when more than ``limit`` walks exist.
    """
    ny = nbr_ptr.shape[0] - 1
    out = np.empty(min(limit, 1 << 20), dtype=np.int64)
    n = 0
    walk = np.zeros(k, dtype=np.int64)
    pos = np.zeros(k, dtype=np.int64)  # next neighbour slot to try at each depth
    walk[0] = base
    depth = 1
    pos[1] = nbr_ptr[base]
    while depth > 0:
        if depth == k:
            code = 0
            for i in range(k):
                code = code * ny + walk[i]
            if n == out.shape[0]:
                if n >= limit:
                    return np.empty(0, dtype=np.int64)
                grown = np.empty(min(limit, 2 * n), dtype=np.int64)
                grown[:n] = out[:n]
                out = grown
            out[n] = code
            n += 1
            depth -= 1
            continue
        prev = walk[depth - 1]
        if pos[depth] >= nbr_ptr[prev + 1]:
            depth -= 1
            continue
        a = nbr_idx[pos[depth]]
        pos[depth] += 1
        if reach[k - depth, a]:
            walk[depth] = a
            depth += 1
            if depth < k:
                pos[depth] = nbr_ptr[a]
    return np.sort(out[:n])


@nb.njit(cache=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@nb.njit(cache=True)
def closed_walk_classes(codes, ny, k, adm_count, adm_list):
    """Union-find over single-vertex contiguous moves between based closed walks.

    Returns the root label of every walk.
    """
    m = codes.shape[0]
    parent = np.arange(m)
    powers = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        powers[i] = powers[i + 1] * ny
    f = np.zeros(k, dtype=np.int64)
    for idx in range(m):
        c = codes[idx]
        for i in range(k - 1, -1, -1):
            f[i] = c % ny
            c //= ny
        for v in range(1, k):
            left = f[v - 1]
            right = f[v + 1] if v < k - 1 else f[0]
            fv = f[v]
            for t in range(adm_count[left, fv, right]):
                u = adm_list[left, fv, right, t]
                other = codes[idx] + (u - fv) * powers[v]
                j = np.searchsorted(codes, other)
                ra = _find(parent, idx)
                rb = _find(parent, j)
                if ra != rb:
                    parent[rb] = ra
    for idx in range(m):
        parent[idx] = _find(parent, idx)
    return parent
