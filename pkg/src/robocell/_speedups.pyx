# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel.

C-level twin of :mod:`robocell._pykernel`; same contract, same results.
Weights must fit comfortably in 64-bit signed integers (the selector in
:mod:`robocell.exact` checks the headroom before routing work here).
"""

ctypedef long long i64

DEF MAXN = 32          # up to 16 machines
DEF MAXARC = 64


cdef struct Leaf:
    int n
    int fcnt
    int bcnt
    int fu[MAXARC]
    int fv[MAXARC]
    i64 fw[MAXARC]
    int bu[MAXARC]
    int bv[MAXARC]
    i64 bw[MAXARC]


cdef void _leaf_arcs(Leaf* g, int m, int* order, i64* dist, i64* sep) noexcept:
    cdef int n = 2 * m
    cdef int q, i, ql, qu
    cdef int pos[MAXN]
    g.n = n
    g.fcnt = 0
    g.bcnt = 0
    for q in range(n):
        pos[order[q]] = q
    for q in range(n - 1):
        g.fu[g.fcnt] = q
        g.fv[g.fcnt] = q + 1
        g.fw[g.fcnt] = dist[order[q] * n + order[q + 1]]
        g.fcnt += 1
    g.bu[0] = n - 1
    g.bv[0] = 0
    g.bw[0] = dist[order[n - 1] * n]
    g.bcnt = 1
    for i in range(m):
        ql = pos[i]
        qu = pos[m + i]
        if ql < qu:
            g.fu[g.fcnt] = ql
            g.fv[g.fcnt] = qu
            g.fw[g.fcnt] = sep[i]
            g.fcnt += 1
        else:
            g.bu[g.bcnt] = ql
            g.bv[g.bcnt] = qu
            g.bw[g.bcnt] = sep[i]
            g.bcnt += 1


cdef bint _feasible(Leaf* g, i64 c) noexcept:
    cdef i64 t[MAXN]
    cdef int n = g.n
    cdef int rounds, a, u, v
    cdef i64 tv
    cdef bint changed
    t[0] = 0
    for u in range(1, n):
        t[u] = -1
    for rounds in range(n + 1):
        changed = False
        for a in range(g.fcnt):
            u = g.fu[a]
            if t[u] < 0:
                continue
            tv = t[u] + g.fw[a]
            v = g.fv[a]
            if tv > t[v]:
                t[v] = tv
                changed = True
        for a in range(g.bcnt):
            u = g.bu[a]
            if t[u] < 0:
                continue
            tv = t[u] + g.bw[a] - c
            v = g.bv[a]
            if v == 0:
                if tv > 0:
                    return False
                continue
            if tv > t[v]:
                t[v] = tv
                changed = True
        if not changed:
            return True
    return False


cdef i64 _leaf_time(int m, int* order, i64* dist, i64* sep,
                    i64 cap, bint capped) noexcept:
    """Exact cycle time of a complete order, -1 when it exceeds cap."""
    cdef Leaf g
    cdef int n = 2 * m
    cdef int a, b, q, src, dst
    cdef i64 lo = 0, hi, mid, w
    cdef i64 dp[MAXN]
    _leaf_arcs(&g, m, order, dist, sep)
    for b in range(g.bcnt):
        src = g.bu[b]
        dst = g.bv[b]
        w = g.bw[b]
        for q in range(dst, src + 1):
            dp[q] = 0 if q == dst else -1
        for q in range(dst, src):
            if dp[q] < 0:
                continue
            for a in range(g.fcnt):
                if g.fu[a] != q:
                    continue
                if g.fv[a] <= src and dp[q] + g.fw[a] > dp[g.fv[a]]:
                    dp[g.fv[a]] = dp[q] + g.fw[a]
        if dp[src] >= 0 and w + dp[src] > lo:
            lo = w + dp[src]
    if capped and lo > cap:
        return -1
    if _feasible(&g, lo):
        return lo
    if capped:
        hi = cap
    else:
        hi = 0
        for a in range(g.fcnt):
            hi += g.fw[a]
        for a in range(g.bcnt):
            hi += g.bw[a]
    if not _feasible(&g, hi):
        return -1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(&g, mid):
            hi = mid
        else:
            lo = mid
    return hi


cdef struct SState:
    int n
    int m
    i64 dist[MAXN * MAXN]
    i64 sep[MAXN]
    i64 min_in[MAXN]
    int order[MAXN]
    i64 te[MAXN]
    i64 pd[MAXN]
    int lpos[MAXN]
    int upos[MAXN]
    bint used[MAXN]
    bint strict
    bint prune
    bint have_best
    bint have_order
    i64 best
    int best_order[MAXN]
    long long nodes
    long long leaves
    long long node_limit  # -1: unlimited
    int first             # -1: all


cdef i64 _bound(SState* s, int q, i64 loop_lb, i64 rem_in) noexcept:
    cdef int n = s.n, m = s.m
    cdef int a = s.order[q], u, i
    cdef i64 lb = loop_lb, closing = -1, c, v
    for u in range(1, n):
        if not s.used[u]:
            c = s.dist[u * n]
            if closing < 0 or c < closing:
                closing = c
    if closing < 0:
        closing = s.dist[a * n]
    v = s.te[q] + rem_in + closing
    if v > lb:
        lb = v
    for i in range(m):
        if s.upos[i] >= 0 and s.lpos[i] < 0:
            v = s.sep[i] + (s.pd[q] - s.pd[s.upos[i]]) + s.dist[a * n + i]
            if v > lb:
                lb = v
        elif s.lpos[i] >= 0 and s.upos[i] < 0:
            v = s.te[s.lpos[i]] + s.sep[i] + s.dist[(m + i) * n]
            if v > lb:
                lb = v
    return lb


cdef int _descend(SState* s, int q, i64 loop_lb, i64 rem_in) noexcept:
    """Returns 1 if the node limit tripped, else 0."""
    cdef int n = s.n, m = s.m
    cdef int a, i, a_lo, a_hi, prev
    cdef i64 d, t, new_loop, new_in, cap, c, lb, v
    cdef bint capped, skip
    if q == 1 and s.first >= 0:
        a_lo = s.first
        a_hi = s.first + 1
    else:
        a_lo = 1
        a_hi = n
    prev = s.order[q - 1]
    for a in range(a_lo, a_hi):
        if s.used[a]:
            continue
        s.nodes += 1
        if s.node_limit >= 0 and s.nodes > s.node_limit:
            return 1
        d = s.dist[prev * n + a]
        t = s.te[q - 1] + d
        i = a if a < m else a - m
        new_loop = loop_lb
        if a < m:
            if s.upos[i] >= 0:
                v = s.sep[i] + (s.pd[q - 1] + d - s.pd[s.upos[i]])
                if v > new_loop:
                    new_loop = v
        else:
            if s.lpos[i] >= 0 and s.te[s.lpos[i]] + s.sep[i] > t:
                t = s.te[s.lpos[i]] + s.sep[i]
        s.order[q] = a
        s.te[q] = t
        s.pd[q] = s.pd[q - 1] + d
        if q == n - 1:
            s.leaves += 1
            capped = s.have_best
            cap = 0
            if s.have_best:
                cap = s.best if (s.strict and not s.have_order) else s.best - 1
            c = _leaf_time(m, s.order, s.dist, s.sep, cap, capped)
            if c >= 0 and (not s.have_best or c < s.best or not s.have_order):
                s.best = c
                s.have_best = True
                s.have_order = True
                for i in range(n):
                    s.best_order[i] = s.order[i]
        else:
            s.used[a] = True
            if a < m:
                s.lpos[i] = q
            else:
                s.upos[i] = q
            new_in = rem_in - s.min_in[a]
            skip = False
            if s.prune and s.have_best:
                lb = _bound(s, q, new_loop, new_in)
                skip = lb > s.best or (not s.strict and lb == s.best)
            if not skip:
                if _descend(s, q + 1, new_loop, new_in):
                    s.used[a] = False
                    return 1
            s.used[a] = False
            if a < m:
                s.lpos[i] = -1
            else:
                s.upos[i] = -1
    return 0


def leaf_cycle_time(int m, order, dist, sep, cap=None):
    """Exact cycle time of a complete order, or None above ``cap``."""
    cdef int n = 2 * m
    cdef int c_order[MAXN]
    cdef i64 c_dist[MAXN * MAXN]
    cdef i64 c_sep[MAXN]
    cdef int i
    if n > MAXN:
        raise ValueError(f"compiled kernel supports at most {MAXN // 2} machines")
    for i in range(n):
        c_order[i] = order[i]
    for i in range(n * n):
        c_dist[i] = dist[i]
    for i in range(m):
        c_sep[i] = sep[i]
    cdef bint capped = cap is not None
    cdef i64 c_cap = cap if capped else 0
    cdef i64 out = _leaf_time(m, c_order, c_dist, c_sep, c_cap, capped)
    return None if out < 0 else out


def search(int m, dist, sep, prune=True, strict=False, ub=None,
           ub_order=None, node_limit=None, first=None):
    """Scan all cycle orders; see the pure twin for the full contract."""
    cdef SState s
    cdef int n = 2 * m
    cdef int i, u, v
    cdef i64 w, rem0
    if n > MAXN:
        raise ValueError(f"compiled kernel supports at most {MAXN // 2} machines")
    if ub is not None and ub_order is None and not strict:
        raise ValueError("fast mode needs an order alongside ub")
    s.n = n
    s.m = m
    for i in range(n * n):
        s.dist[i] = dist[i]
    for i in range(m):
        s.sep[i] = sep[i]
    for u in range(n):
        w = -1
        for v in range(n):
            if v != u and (w < 0 or s.dist[v * n + u] < w):
                w = s.dist[v * n + u]
        s.min_in[u] = w
        s.used[u] = False
        s.te[u] = 0
        s.pd[u] = 0
        s.order[u] = 0
    for i in range(m):
        s.lpos[i] = -1
        s.upos[i] = -1
    s.lpos[0] = 0
    s.used[0] = True
    s.strict = bool(strict)
    s.prune = bool(prune)
    s.have_best = ub is not None
    s.best = ub if ub is not None else 0
    s.have_order = ub_order is not None
    if ub_order is not None:
        for i in range(n):
            s.best_order[i] = ub_order[i]
    s.nodes = 0
    s.leaves = 0
    s.node_limit = node_limit if node_limit is not None else -1
    s.first = first if first is not None else -1
    rem0 = 0
    for u in range(1, n):
        rem0 += s.min_in[u]
    cdef int tripped = _descend(&s, 1, 0, rem0)
    best = s.best if s.have_best else None
    border = [s.best_order[i] for i in range(n)] if s.have_order else None
    return best, border, s.nodes, s.leaves, not tripped
