"""Polynomial-time certificate verifiers.

Each returns True only if the certificate proves the verdict it came with.
They avoid the checkers' code paths on purpose.
"""

from __future__ import annotations

from ..graph import UndirectedGraph
from .types import CheckOutcome, Kind, PropertySpec, Verdict


def _reach(g: UndirectedGraph, start: int, banned: set[int]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in g.adj[v]:
            if u not in banned and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def verify_cut(g: UndirectedGraph, cut, k: int) -> bool:
    """``cut`` has < k nodes and its removal disconnects g (or leaves two
    non-adjacent nodes apart)."""
    cut = set(cut)
    if len(cut) >= k or any(not 0 <= v < g.n for v in cut):
        return False
    rest = [v for v in range(g.n) if v not in cut]
    if len(rest) < 2:
        return False
    return len(_reach(g, rest[0], cut)) < len(rest)


def verify_robust_pair(g: UndirectedGraph, a, b, k: int) -> bool:
    a, b = set(a), set(b)
    if not a or not b or a & b:
        return False
    if any(not 0 <= v < g.n for v in a | b):
        return False
    for s in (a, b):
        for v in s:
            if sum(1 for u in g.adj[v] if u not in s) >= k:
                return False
    return True


def verify_cycle(g: UndirectedGraph, cycle) -> bool:
    if len(cycle) != g.n or sorted(cycle) != list(range(g.n)):
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % g.n]) for i in range(g.n))


def verify_matching(g: UndirectedGraph, pairs) -> bool:
    if 2 * len(pairs) != g.n:
        return False
    covered = [v for pair in pairs for v in pair]
    if sorted(covered) != list(range(g.n)):
        return False
    return all(g.has_edge(i, j) for i, j in pairs)


def verify_barrier(g: UndirectedGraph, barrier) -> bool:
    """Tutte condition violated: more odd components than barrier nodes."""
    banned = set(barrier)
    seen: set[int] = set()
    odd = 0
    for v in range(g.n):
        if v in banned or v in seen:
            continue
        comp = _reach(g, v, banned)
        seen |= comp
        odd += len(comp) % 2
    return odd > len(banned)


def verify_outcome(g: UndirectedGraph, spec: PropertySpec, out: CheckOutcome) -> bool:
    """Check whichever certificate the outcome carries.

    Outcomes without a checkable certificate (e.g. an exhaustive-search No)
    verify trivially.
    """
    cert = out.certificate or {}
    kind = spec.kind
    if out.verdict is Verdict.NO:
        if kind is Kind.K_CONNECTIVITY and "cut" in cert:
            return verify_cut(g, cert["cut"], spec.k)
        if kind is Kind.K_ROBUSTNESS and "A" in cert:
            return verify_robust_pair(g, cert["A"], cert["B"], spec.k)
        if kind is Kind.HAMILTON_CYCLE:
            if cert.get("reason") == "min_degree":
                return len(g.adj[cert["node"]]) < 2
            if "cut" in cert:
                return verify_cut(g, cert["cut"], 2)
        if kind is Kind.PERFECT_MATCHING:
            if cert.get("reason") == "odd_order":
                return g.n % 2 == 1
            if "barrier" in cert:
                return verify_barrier(g, cert["barrier"])
        return True
    if out.verdict is Verdict.YES:
        if kind is Kind.HAMILTON_CYCLE:
            return verify_cycle(g, cert.get("cycle", []))
        if kind is Kind.PERFECT_MATCHING:
            return verify_matching(g, cert.get("matching", []))
    return True
