"""Minimum degree and vertex k-connectivity."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components, maximum_flow

from ..graph import UndirectedGraph
from .types import CheckOutcome


def min_degree(g: UndirectedGraph) -> int:
    if g.n < 1:
        raise ValueError("min_degree needs at least one node")
    return int(g.degrees.min())


def components(g: UndirectedGraph) -> tuple[int, np.ndarray]:
    if g.n == 0:
        return 0, np.zeros(0, dtype=np.int32)
    return connected_components(g.csr, directed=False)


def is_connected(g: UndirectedGraph) -> bool:
    return components(g)[0] <= 1


def articulation_point(g: UndirectedGraph) -> int | None:
    """Some cut vertex of a connected graph, or None if it has none.

    Iterative Tarjan low-link DFS from node 0.
    """
    n = g.n
    if n < 3:
        return None
    adj = g.adj
    disc = [-1] * n
    low = [0] * n
    parent = [-1] * n
    it = [0] * n
    disc[0] = low[0] = 0
    t = 1
    root_children = 0
    stack = [0]
    while stack:
        v = stack[-1]
        nb = adj[v]
        if it[v] < len(nb):
            u = nb[it[v]]
            it[v] += 1
            if disc[u] < 0:
                parent[u] = v
                disc[u] = low[u] = t
                t += 1
                stack.append(u)
                if v == 0:
                    root_children += 1
            elif u != parent[v] and disc[u] < low[v]:
                low[v] = disc[u]
        else:
            stack.pop()
            p = parent[v]
            if p >= 0:
                if low[v] < low[p]:
                    low[p] = low[v]
                if p != 0 and low[v] >= disc[p]:
                    return p
    if root_children > 1:
        return 0
    return None


def _tiny_case(g: UndirectedGraph, k: int) -> CheckOutcome:
    # n <= k: only the complete graph qualifies (vacuous "remove k-1 nodes").
    n = g.n
    if g.m == n * (n - 1) // 2:
        return CheckOutcome.yes({"reason": "complete_graph_with_n_le_k"})
    have = g.adj_sets
    for u in range(n):
        for v in range(u + 1, n):
            if v not in have[u]:
                cut = [w for w in range(n) if w not in (u, v)]
                return CheckOutcome.no({"cut": cut, "separates": [u, v]})
    raise AssertionError("unreachable")


def _split_capacities(g: UndirectedGraph) -> sp.csr_matrix:
    # Node v -> (v_in = 2v, v_out = 2v + 1); unit capacity on v_in -> v_out,
    # capacity n on the arcs carrying each undirected edge both ways.
    n = g.n
    big = n
    i, j = g.edges[:, 0], g.edges[:, 1]
    v = np.arange(n)
    rows = np.concatenate([2 * v, 2 * i + 1, 2 * j + 1])
    cols = np.concatenate([2 * v + 1, 2 * j, 2 * i])
    data = np.concatenate([np.ones(n, dtype=np.int32),
                           np.full(2 * g.m, big, dtype=np.int32)])
    c = sp.csr_matrix((data, (rows, cols)), shape=(2 * n, 2 * n))
    c.sort_indices()
    return c


def _min_vertex_cut(cap: sp.csr_matrix, flow: sp.csr_matrix, source: int) -> list[int]:
    resid = (cap - flow).tocsr()
    resid.data = (resid.data > 0).astype(np.int8)
    resid.eliminate_zeros()
    reach = np.zeros(cap.shape[0], dtype=bool)
    reach[breadth_first_order(resid, source, directed=True, return_predecessors=False)] = True
    nodes = np.arange(cap.shape[0] // 2)
    return nodes[reach[2 * nodes] & ~reach[2 * nodes + 1]].tolist()


def local_vertex_connectivity(g: UndirectedGraph, x: int, y: int) -> tuple[int, list[int]]:
    """Max number of internally disjoint x-y paths and a minimum x-y separator,
    for non-adjacent x != y."""
    cap = _split_capacities(g)
    res = maximum_flow(cap, 2 * x + 1, 2 * y)
    return int(res.flow_value), _min_vertex_cut(cap, res.flow, 2 * x + 1)


def is_k_connected(g: UndirectedGraph, k: int) -> CheckOutcome:
    """Decide whether g is k-connected; No carries a separating set of < k nodes.

    A complete graph on n <= k nodes counts as k-connected.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    if n <= k:
        return _tiny_case(g, k)
    deg = g.degrees
    v = int(np.argmin(deg))
    if deg[v] < k:
        return CheckOutcome.no({"cut": list(g.adj[v]), "isolates": v, "reason": "min_degree"})
    ncomp, labels = components(g)
    if ncomp > 1:
        return CheckOutcome.no({"cut": [], "reason": "disconnected"})
    if k == 1:
        return CheckOutcome.yes()
    a = articulation_point(g)
    if a is not None:
        return CheckOutcome.no({"cut": [a], "reason": "articulation_point"})
    if k == 2:
        return CheckOutcome.yes()

    # Any separator S with |S| < k misses some anchor x; x then has a
    # non-neighbour y on the far side of S.  Checking every anchor against
    # every non-neighbour is therefore exhaustive.
    cap = _split_capacities(g)
    order = np.lexsort((np.arange(n), deg))
    anchors = order[:k].tolist()
    work = 0
    for x in anchors:
        near = g.adj_sets[x]
        for y in range(n):
            if y == x or y in near:
                continue
            work += 1
            res = maximum_flow(cap, 2 * x + 1, 2 * y)
            if res.flow_value < k:
                cut = _min_vertex_cut(cap, res.flow, 2 * x + 1)
                return CheckOutcome.no({"cut": cut, "separates": [x, y], "reason": "max_flow"},
                                       work=work)
    return CheckOutcome.yes(work=work)
