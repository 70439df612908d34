"""Maximum matching in general graphs (Edmonds' blossom algorithm) and the
perfect-matching decision built on it."""

from __future__ import annotations

from collections import deque

from ..graph import UndirectedGraph
from .connectivity import components
from .types import CheckOutcome


class _Blossom:
    """One augmenting-path search state; the BFS formulation with base[]
    relabelling instead of explicit contraction."""

    def __init__(self, adj: list[list[int]], match: list[int]):
        self.adj = adj
        self.match = match
        self.n = len(adj)

    def search(self, root: int) -> int:
        n, adj, match = self.n, self.adj, self.match
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        self.used, self.parent, self.base = used, parent, base
        used[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    b = self._lca(v, to)
                    in_blossom = [False] * n
                    self._mark(v, b, to, in_blossom)
                    self._mark(to, b, v, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = b
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        return to
                    used[match[to]] = True
                    queue.append(match[to])
        return -1

    def _lca(self, a: int, b: int) -> int:
        match, parent, base = self.match, self.parent, self.base
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[match[b]]

    def _mark(self, v: int, b: int, child: int, in_blossom: list[bool]) -> None:
        match, parent, base = self.match, self.parent, self.base
        while base[v] != b:
            in_blossom[base[v]] = in_blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def augment(self, end: int) -> None:
        match, parent = self.match, self.parent
        v = end
        while v != -1:
            pv = parent[v]
            nxt = match[pv]
            match[v] = pv
            match[pv] = v
            v = nxt

    def odd_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self.parent[v] != -1 and not self.used[v]]


def _greedy(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    deg = [len(a) for a in adj]
    match = [-1] * n
    for v in sorted(range(n), key=lambda v: (deg[v], v)):
        if match[v] != -1:
            continue
        best = -1
        for u in adj[v]:
            if match[u] == -1 and (best == -1 or deg[u] < deg[best]):
                best = u
        if best != -1:
            match[v], match[best] = best, v
    return match


def maximum_matching(g: UndirectedGraph) -> list[tuple[int, int]]:
    """A maximum-cardinality matching as sorted (i, j) pairs with i < j."""
    adj = g.adj
    match = _greedy(adj)
    state = _Blossom(adj, match)
    for root in range(g.n):
        if match[root] == -1:
            end = state.search(root)
            if end != -1:
                state.augment(end)
    return sorted((v, u) for v, u in enumerate(match) if u > v)


def _is_tutte_barrier(g: UndirectedGraph, barrier: list[int]) -> bool:
    rest = g.without_nodes(barrier)
    if rest.n == 0:
        return False
    _, labels = components(rest)
    sizes = {}
    for lab in labels.tolist():
        sizes[lab] = sizes.get(lab, 0) + 1
    odd = sum(1 for s in sizes.values() if s % 2)
    return odd > len(barrier)


def has_perfect_matching(g: UndirectedGraph) -> CheckOutcome:
    """Yes carries the n/2 matching edges.  Odd n gives No.

    A No found by the blossom search carries a Tutte barrier: a node set
    whose removal leaves more odd components than it has nodes.
    """
    n = g.n
    if n % 2:
        return CheckOutcome.no({"reason": "odd_order"})
    deg = g.degrees
    if n and deg.min() == 0:
        v = int(deg.argmin())
        return CheckOutcome.no({"reason": "isolated_node", "node": v, "barrier": []})
    adj = g.adj
    match = _greedy(adj)
    state = _Blossom(adj, match)
    work = 0
    for root in range(n):
        if match[root] != -1:
            continue
        work += 1
        end = state.search(root)
        if end == -1:
            # A root without an augmenting path stays exposed in every
            # maximum matching.
            cert = {"reason": "no_augmenting_path", "exposed": root}
            barrier = state.odd_vertices()
            if _is_tutte_barrier(g, barrier):
                cert["barrier"] = barrier
            return CheckOutcome.no(cert, work=work)
        state.augment(end)
    edges = sorted([v, u] for v, u in enumerate(match) if u > v)
    return CheckOutcome.yes({"matching": edges}, work=work)
