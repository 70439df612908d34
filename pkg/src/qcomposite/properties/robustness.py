"""k-robustness.

Call a node set S *closed* when no member has k or more neighbours outside
S.  A graph is k-robust exactly when it has no two disjoint non-empty closed
sets.  Closed sets are closed under union, so every S contains a unique
maximal closed subset, ``core(S)``, obtained by repeatedly discarding members
with k or more outside neighbours.  Given any closed A, the best partner is
``core(V \\ A)``; the search below only has to propose candidates for A.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..graph import UndirectedGraph
from .connectivity import components, is_k_connected
from .types import Budget, CheckOutcome, Verdict, WorkCounter

EXHAUSTIVE_MAX_N = 16
BALL_CENTRES = 64


def core(g: UndirectedGraph, members, k: int, counter: WorkCounter | None = None) -> set[int]:
    """Maximal closed subset of ``members``."""
    inside = set(members)
    adj = g.adj
    outside = {}
    queue = deque()
    for v in inside:
        c = 0
        for u in adj[v]:
            if u not in inside:
                c += 1
        outside[v] = c
        if c >= k:
            queue.append(v)
    if counter is not None:
        counter.spend(len(inside))
    while queue:
        v = queue.popleft()
        if v not in inside:
            continue
        inside.discard(v)
        for u in adj[v]:
            if u in inside:
                outside[u] += 1
                if outside[u] == k:
                    queue.append(u)
        if counter is not None:
            counter.spend(1)
    return inside


def _pair_from(g: UndirectedGraph, a: set[int], k: int, counter=None) -> dict | None:
    if not a:
        return None
    b = core(g, set(range(g.n)) - a, k, counter)
    if not b:
        return None
    return {"A": sorted(a), "B": sorted(b)}


def _pair_from_cut(g: UndirectedGraph, cut: list[int]) -> dict:
    rest = g.without_nodes(cut)
    keep = [v for v in range(g.n) if v not in set(cut)]
    _, labels = components(rest)
    first = labels[0]
    a = [keep[i] for i in range(len(keep)) if labels[i] == first]
    b = [keep[i] for i in range(len(keep)) if labels[i] != first]
    return {"A": a, "B": b}


def _exhaustive(g: UndirectedGraph, k: int) -> dict | None:
    n = g.n
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)
    closed = np.ones(1 << n, dtype=bool)
    for v, nb in enumerate(g.adj_bits):
        inside = (masks >> v) & 1 == 1
        out = np.bitwise_count(np.int64(nb) & ~masks)
        closed &= ~(inside & (out >= k))
    closed[0] = False
    # has_sub[m]: some non-empty closed subset of m exists (subset-sum over bits).
    has_sub = closed.copy()
    for bit in range(n):
        view = has_sub.reshape(-1, 2, 1 << bit)
        view[:, 1, :] |= view[:, 0, :]
    hits = np.flatnonzero(closed & has_sub[full ^ masks])
    if not len(hits):
        return None
    a = int(hits[0])
    comp = full ^ a
    sub = comp
    while sub:
        if closed[sub]:
            break
        sub = (sub - 1) & comp
    bits = lambda m: [v for v in range(n) if m >> v & 1]
    return {"A": bits(a), "B": bits(sub)}


def _heuristic_search(g: UndirectedGraph, k: int, counter: WorkCounter) -> dict | None:
    n = g.n
    adj = g.adj
    deg = g.degrees
    # Single nodes and closed neighbourhoods, lowest degree first.
    order = np.lexsort((np.arange(n), deg)).tolist()
    for v in order:
        if counter.exhausted:
            return None
        for cand in ({v}, {v, *adj[v]}):
            a = core(g, cand, k, counter)
            pair = _pair_from(g, a, k, counter)
            if pair:
                return pair
    # BFS balls of doubling size around the lowest-degree nodes.
    for v in order[:BALL_CENTRES]:
        seen = [v]
        mark = {v}
        head = 0
        size = 2
        while head < len(seen) and size <= n // 2:
            u = seen[head]
            head += 1
            for w in adj[u]:
                if w not in mark:
                    mark.add(w)
                    seen.append(w)
            if len(seen) >= size:
                if counter.exhausted:
                    return None
                pair = _pair_from(g, core(g, seen[:size], k, counter), k, counter)
                if pair:
                    return pair
                size *= 2
    # Random bisections from a fixed stream.
    rng = np.random.default_rng(0x5EED)
    while not counter.exhausted:
        perm = rng.permutation(n)
        pair = _pair_from(g, core(g, perm[: n // 2].tolist(), k, counter), k, counter)
        if pair:
            return pair
    return None


def is_k_robust(g: UndirectedGraph, k: int, budget: Budget | None = None) -> CheckOutcome:
    """Three-valued k-robustness check.

    No carries a violating pair (A, B).  Yes comes from exhaustive subset
    enumeration (n <= 16, when it fits the budget) or, for k = 1, from
    connectivity, which is equivalent.  Otherwise a budgeted certificate
    search runs and Unknown is returned if it finds nothing.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = budget or Budget()
    n = g.n
    if n <= 1:
        return CheckOutcome.yes({"reason": "fewer_than_two_nodes"})
    counter = WorkCounter(budget.max_work)
    if k == 1:
        ncomp, labels = components(g)
        if ncomp == 1:
            return CheckOutcome.yes({"reason": "connected"})
        a = np.flatnonzero(labels == labels[0]).tolist()
        b = np.flatnonzero(labels != labels[0]).tolist()
        return CheckOutcome.no({"A": a, "B": b})

    conn = is_k_connected(g, k)
    if conn.verdict is Verdict.NO:
        return CheckOutcome.no(_pair_from_cut(g, conn.certificate["cut"]), work=counter.used)

    if n <= EXHAUSTIVE_MAX_N and n * (1 << n) <= budget.max_work:
        pair = _exhaustive(g, k)
        work = n * (1 << n)
        if pair:
            return CheckOutcome.no(pair, work=work)
        return CheckOutcome.yes({"reason": "exhaustive"}, work=work)

    pair = _heuristic_search(g, k, counter)
    if pair:
        return CheckOutcome.no(pair, work=counter.used)
    return CheckOutcome.unknown(work=counter.used)
