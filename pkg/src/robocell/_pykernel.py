"""Search kernel over cycle orders (pure-Python variant).

Everything here works on pre-scaled integer data in flat lists so the
compiled twin (``_speedups``) can mirror it with C arrays.  Activities are
dense ids ``0..2m-1`` (load i -> ``i-1``, unload i -> ``m+i-1``); distances
come as one flat ``n*n`` list; separations as a length-``m`` list.

``search`` runs a depth-first scan over every cycle order starting at id 0
and returns a proven optimum: interior nodes are cut with admissible lower
bounds, leaves are priced exactly by the parametric longest-path method.
With ``strict=True`` cuts keep ties alive and the scan returns the
lexicographically least optimal order; with ``strict=False`` ties are cut
and whichever optimal order survives is returned.
"""

from __future__ import annotations

from typing import Optional

INF = float("inf")


def leaf_cycle_time(
    m: int,
    order: list[int],
    dist: list[int],
    sep: list[int],
    cap: Optional[int] = None,
) -> Optional[int]:
    """Exact cycle time of a complete order, or None if it exceeds ``cap``.

    ``order`` holds all 2m activity ids, position 0 being the anchor load.
    The value is the least C admitted by the difference constraints: chain
    and same-cycle separations need no period, the closing arc and
    cross-cycle separations borrow one.
    """
    n = 2 * m
    # forward (period-free) arcs by source position: chain + same-cycle seps
    fw: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    pos = [0] * n
    for q, a in enumerate(order):
        pos[a] = q
    for q in range(n - 1):
        fw[q].append((q + 1, dist[order[q] * n + order[q + 1]]))
    back: list[tuple[int, int, int]] = []  # (src, dst, w) arcs carrying one period
    back.append((n - 1, 0, dist[order[n - 1] * n]))
    for i in range(m):
        ql, qu = pos[i], pos[m + i]
        if ql < qu:
            fw[ql].append((qu, sep[i]))
        else:
            back.append((ql, qu, sep[i]))

    # lower bound: every simple cycle uses one backward arc plus a forward path
    lo = 0
    dp = [0] * n
    for src, dst, w in back:
        # longest forward path dst -> src (forward arcs only increase position)
        for q in range(dst, src + 1):
            dp[q] = 0 if q == dst else -1
        for q in range(dst, src):
            if dp[q] < 0:
                continue
            for v, wv in fw[q]:
                if v <= src and dp[q] + wv > dp[v]:
                    dp[v] = dp[q] + wv
        if dp[src] >= 0 and w + dp[src] > lo:
            lo = w + dp[src]
    if cap is not None and lo > cap:
        return None

    arcs = [(q, v, w, 0) for q in range(n) for v, w in fw[q]]
    arcs += [(u, v, w, 1) for u, v, w in back]

    def feasible(c: int) -> bool:
        t = [0] + [-1] * (n - 1)  # -1 marks unreached; completions are >= 0
        for _ in range(n + 1):
            changed = False
            for u, v, w, k in arcs:
                if t[u] < 0:
                    continue
                tv = t[u] + w - k * c
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

    if feasible(lo):
        return lo
    hi = cap if cap is not None else sum(w for _, _, w, _ in arcs)
    if not feasible(hi):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def search(
    m: int,
    dist: list[int],
    sep: list[int],
    prune: bool = True,
    strict: bool = False,
    ub: Optional[int] = None,
    ub_order: Optional[list[int]] = None,
    node_limit: Optional[int] = None,
    first: Optional[int] = None,
) -> tuple[Optional[int], Optional[list[int]], int, int, bool]:
    """Scan all cycle orders, returning (best, order, nodes, leaves, complete).

    ``ub``/``ub_order`` warm-start the incumbent.  ``first`` restricts the
    scan to orders whose second activity is the given id (shard for
    parallel runs).  When ``node_limit`` interior expansions are exhausted
    the scan stops early and reports ``complete=False``.
    """
    n = 2 * m
    if ub is None:
        best = None
    else:
        best = ub
        if ub_order is None and not strict:
            raise ValueError("fast mode needs an order alongside ub")
    best_order = list(ub_order) if ub_order is not None else None

    min_in = [min(dist[v * n + u] for v in range(n) if v != u) for u in range(n)]
    order = [0] * n
    used = [False] * n
    used[0] = True
    te = [0] * n  # earliest completion by position (period-free arcs only)
    pd = [0] * n  # chain distance prefix sum by position
    lpos = [-1] * m
    upos = [-1] * m
    lpos[0] = 0
    nodes = 0
    leaves = 0
    hit_limit = False

    def bound(q: int, loop_lb: int, rem_in: int) -> int:
        a = order[q]
        lb = loop_lb
        closing = None
        for u in range(1, n):
            if not used[u]:
                c = dist[u * n]
                if closing is None or c < closing:
                    closing = c
        if closing is None:
            closing = dist[a * n]
        chain = te[q] + rem_in + closing
        if chain > lb:
            lb = chain
        for i in range(m):
            if upos[i] >= 0 and lpos[i] < 0:
                v = sep[i] + (pd[q] - pd[upos[i]]) + dist[a * n + i]
                if v > lb:
                    lb = v
            elif lpos[i] >= 0 and upos[i] < 0:
                v = te[lpos[i]] + sep[i] + dist[(m + i) * n]
                if v > lb:
                    lb = v
        return lb

    def descend(q: int, loop_lb: int, rem_in: int) -> None:
        nonlocal best, best_order, nodes, leaves, hit_limit
        if hit_limit:
            return
        lo_a = 1 if q > 1 or first is None else first
        hi_a = n if q > 1 or first is None else first + 1
        for a in range(lo_a, hi_a):
            if used[a]:
                continue
            nodes += 1
            if node_limit is not None and nodes > node_limit:
                hit_limit = True
                return
            prev = order[q - 1]
            d = dist[prev * n + a]
            t = te[q - 1] + d
            i = a if a < m else a - m
            new_loop = loop_lb
            if a < m:  # load: a cross pair closes if the unload came first
                if upos[i] >= 0:
                    v = sep[i] + (pd[q - 1] + d - pd[upos[i]])
                    if v > new_loop:
                        new_loop = v
            else:  # unload: same-cycle separation pushes the completion
                if lpos[i] >= 0 and te[lpos[i]] + sep[i] > t:
                    t = te[lpos[i]] + sep[i]
            order[q] = a
            te[q] = t
            pd[q] = pd[q - 1] + d
            if q == n - 1:
                leaves += 1
                if best is None:
                    cap = None
                elif strict:
                    cap = best if best_order is None else best - 1
                else:
                    cap = best - 1
                c = leaf_cycle_time(m, order, dist, sep, cap)
                if c is not None and (best is None or c < best or best_order is None):
                    best = c
                    best_order = order.copy()
            else:
                used[a] = True
                if a < m:
                    lpos[i] = q
                else:
                    upos[i] = q
                new_in = rem_in - min_in[a]
                skip = False
                if prune and best is not None:
                    lb = bound(q, new_loop, new_in)
                    skip = lb > best or (not strict and lb == best)
                if not skip:
                    descend(q + 1, new_loop, new_in)
                used[a] = False
                if a < m:
                    lpos[i] = -1
                else:
                    upos[i] = -1
            if hit_limit:
                return

    descend(1, 0, sum(min_in[1:]))
    return best, best_order, nodes, leaves, not hit_limit
