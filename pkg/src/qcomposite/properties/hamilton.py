"""Hamilton cycle containment.

Pipeline: cheap necessary conditions (minimum degree 2, 2-connectivity),
then a Posa rotation-extension search for a cycle, then exact backtracking
for whatever budget is left.  A No verdict only ever comes from a failed
necessary condition or a completed backtracking search.
"""

from __future__ import annotations

import random

import numpy as np

from ..graph import UndirectedGraph
from .connectivity import articulation_point, components
from .types import Budget, CheckOutcome, WorkCounter

# Share of the budget the heuristic may use before backtracking starts,
# further capped at HEURISTIC_PER_NODE_SQ * n^2 steps so small graphs
# without a cycle reach the exact search quickly.
HEURISTIC_SHARE = 0.5
HEURISTIC_PER_NODE_SQ = 64


def _posa(g: UndirectedGraph, counter: WorkCounter, limit: int, rng: random.Random) -> list[int] | None:
    n = g.n
    adj = g.adj
    adjs = g.adj_sets
    deg = [len(a) for a in adj]
    starts = sorted(range(n), key=lambda v: (deg[v], v))
    attempt = 0
    while counter.used < limit:
        start = starts[attempt % n] if attempt < n else rng.randrange(n)
        attempt += 1
        path = [start]
        pos = [-1] * n
        pos[start] = 0
        free = deg[:]
        for w in adj[start]:
            free[w] -= 1
        stall = 0
        max_stall = 4 * n
        while counter.used < limit:
            counter.used += 1
            end = path[-1]
            best = -1
            best_free = n + 1
            for u in adj[end]:
                if pos[u] < 0 and free[u] < best_free:
                    best, best_free = u, free[u]
            if best >= 0:
                pos[best] = len(path)
                path.append(best)
                for w in adj[best]:
                    free[w] -= 1
                stall = 0
                continue
            L = len(path)
            if path[0] in adjs[end]:
                if L == n:
                    return path
                # Closed a cycle short of n: reopen it next to a vertex
                # that still has an unvisited neighbour.
                idx = next(i for i in range(L) if free[path[i]] > 0)
                path = path[idx + 1:] + path[:idx + 1]
                for t, w in enumerate(path):
                    pos[w] = t
                continue
            stall += 1
            if stall > max_stall:
                break
            if rng.random() < 0.1:
                path.reverse()
                for t, w in enumerate(path):
                    pos[w] = t
                continue
            cands = [v for v in adj[end] if pos[v] != L - 2]
            i = pos[rng.choice(cands)]
            path[i + 1:] = path[:i:-1]
            for t in range(i + 1, L):
                pos[path[t]] = t
    return None


def _backtrack(g: UndirectedGraph, counter: WorkCounter) -> list[int] | None:
    """Exact search; returns a cycle, or None (check counter.exhausted)."""
    n = g.n
    adj = g.adj
    adjs = g.adj_sets
    deg = [len(a) for a in adj]
    start = min(range(n), key=lambda v: (deg[v], v))
    near_start = adjs[start]
    visited = [False] * n
    visited[start] = True
    free = deg[:]
    for w in adj[start]:
        free[w] -= 1
    path = [start]

    def order(v):
        return sorted((u for u in adj[v] if not visited[u]), key=lambda u: (free[u], u))

    def feasible(u):
        # Every unvisited vertex needs two usable neighbours: unvisited ones,
        # the new end u, or the start.
        for w in adj[u]:
            if not visited[w]:
                usable = free[w] + 1 + (w in near_start and w != u)
                if usable < 2:
                    return False
        return True

    iters = [iter(order(start))]
    while iters:
        if len(path) == n:
            if start in adjs[path[-1]]:
                return path[:]
            u = None
        else:
            u = next(iters[-1], None)
        if u is None:
            iters.pop()
            if len(path) > 1:
                v = path.pop()
                visited[v] = False
                for w in adj[v]:
                    free[w] += 1
            continue
        if not counter.spend():
            return None
        visited[u] = True
        for w in adj[u]:
            free[w] -= 1
        path.append(u)
        if len(path) < n and not feasible(u):
            path.pop()
            visited[u] = False
            for w in adj[u]:
                free[w] += 1
            continue
        iters.append(iter(order(u)))
    return None


def has_hamilton_cycle(g: UndirectedGraph, budget: Budget | None = None, seed: int = 0) -> CheckOutcome:
    n = g.n
    if n < 3:
        raise ValueError(f"Hamilton cycles need n >= 3, got n={n}")
    budget = budget or Budget()
    deg = g.degrees
    v = int(np.argmin(deg))
    if deg[v] < 2:
        return CheckOutcome.no({"reason": "min_degree", "node": v})
    if components(g)[0] > 1:
        return CheckOutcome.no({"reason": "disconnected", "cut": []})
    a = articulation_point(g)
    if a is not None:
        return CheckOutcome.no({"reason": "articulation_point", "cut": [a]})

    counter = WorkCounter(budget.max_work)
    rng = random.Random(seed)
    limit = min(int(budget.max_work * HEURISTIC_SHARE), HEURISTIC_PER_NODE_SQ * n * n)
    cycle = _posa(g, counter, limit, rng)
    if cycle is None:
        cycle = _backtrack(g, counter)
        if cycle is None:
            if counter.exhausted:
                return CheckOutcome.unknown(work=counter.used)
            return CheckOutcome.no({"reason": "exhaustive_search"}, work=counter.used)
    return CheckOutcome.yes({"cycle": cycle}, work=counter.used)
