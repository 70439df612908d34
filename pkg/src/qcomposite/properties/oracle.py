"""Exhaustive reference deciders for small graphs.

Deliberately naive and independent of the production checkers: plain Python
sets, no numpy, no shared helpers beyond the graph's neighbour sets.
"""

from __future__ import annotations

from itertools import combinations, permutations

from ..graph import UndirectedGraph
from .types import CheckOutcome, Kind, PropertySpec

ORACLE_MAX_N = 12
ORACLE_MAX_N_ROBUST = 16


def _connected(nodes: set[int], nbrs) -> bool:
    if len(nodes) <= 1:
        return True
    first = next(iter(nodes))
    seen = {first}
    stack = [first]
    while stack:
        v = stack.pop()
        for u in nbrs[v]:
            if u in nodes and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(nodes)


def _k_connected(g: UndirectedGraph, k: int) -> bool:
    nbrs = g.adj_sets
    n = g.n
    if n <= k:
        return g.m == n * (n - 1) // 2
    everyone = set(range(n))
    for size in range(k):
        for removed in combinations(range(n), size):
            if not _connected(everyone - set(removed), nbrs):
                return False
    return True


def _hamiltonian(g: UndirectedGraph) -> bool:
    n = g.n
    nbrs = g.adj_sets
    for rest in permutations(range(1, n)):
        if rest[0] > rest[-1]:
            continue
        order = (0,) + rest
        if all(order[i + 1] in nbrs[order[i]] for i in range(n - 1)) and 0 in nbrs[order[-1]]:
            return True
    return False


def _perfect_matching(g: UndirectedGraph) -> bool:
    nbrs = g.adj_sets

    def rec(left: frozenset) -> bool:
        if not left:
            return True
        v = min(left)
        return any(rec(left - {v, u}) for u in nbrs[v] if u in left)

    return g.n % 2 == 0 and rec(frozenset(range(g.n)))


def _robust(g: UndirectedGraph, k: int) -> bool:
    n = g.n
    nbrs = g.adj_sets

    def closed(members: set[int]) -> bool:
        return all(len(nbrs[v] - members) < k for v in members)

    closed_mask = []
    for mask in range(1 << n):
        s = {v for v in range(n) if mask >> v & 1}
        closed_mask.append(bool(s) and closed(s))
    full = (1 << n) - 1
    for a in range(1, 1 << n):
        if not closed_mask[a]:
            continue
        comp = full ^ a
        b = comp
        while b:
            if closed_mask[b]:
                return False
            b = (b - 1) & comp
    return True


def oracle_check(g: UndirectedGraph, spec: PropertySpec) -> CheckOutcome:
    limit = ORACLE_MAX_N_ROBUST if spec.kind is Kind.K_ROBUSTNESS else ORACLE_MAX_N
    if g.n > limit:
        raise ValueError(f"oracle is limited to n <= {limit}, got n={g.n}")
    kind = spec.kind
    if kind is Kind.MIN_DEGREE:
        ok = all(len(s) >= spec.k for s in g.adj_sets)
    elif kind is Kind.K_CONNECTIVITY:
        ok = _k_connected(g, spec.k)
    elif kind is Kind.K_ROBUSTNESS:
        ok = _robust(g, spec.k)
    elif kind is Kind.HAMILTON_CYCLE:
        if g.n < 3:
            raise ValueError("Hamilton cycles need n >= 3")
        ok = _hamiltonian(g)
    else:
        ok = _perfect_matching(g)
    return CheckOutcome.yes() if ok else CheckOutcome.no()
