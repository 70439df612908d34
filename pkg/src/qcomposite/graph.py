"""Graph models: q-composite random key graphs, Erdos-Renyi graphs and
binomial q-intersection graphs, plus the immutable graph type they share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .seeding import RngSeed, as_seed

# Build-graph strategy switch; see build_graph.
DENSE_MAX_N = 256


@dataclass(frozen=True)
class ModelParams:
    """Parameters (n, q, K, P) of G_q(n, K, P)."""

    n: int
    q: int
    K: int
    P: int

    def __post_init__(self):
        for name in ("n", "q", "K", "P"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
        if self.n < 2:
            raise ValueError(f"need n >= 2, got n={self.n}")
        if not 1 <= self.q <= self.K <= self.P:
            raise ValueError(
                f"need 1 <= q <= K <= P, got q={self.q}, K={self.K}, P={self.P}")

    def replace(self, **kw) -> "ModelParams":
        d = {"n": self.n, "q": self.q, "K": self.K, "P": self.P}
        d.update(kw)
        return ModelParams(**d)

    def to_dict(self) -> dict:
        return {"n": self.n, "q": self.q, "K": self.K, "P": self.P}


@dataclass(frozen=True)
class ErParams:
    n: int
    s: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.s}")

    def to_dict(self) -> dict:
        return {"n": self.n, "s": self.s}


@dataclass(frozen=True)
class BinomialIntersectionParams:
    n: int
    x: float
    P: int
    q: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"inclusion probability must lie in [0, 1], got {self.x}")
        if self.q < 1 or self.P < 1:
            raise ValueError("need q >= 1 and P >= 1")

    def to_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "P": self.P, "q": self.q}


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class UndirectedGraph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are held canonically as an ``(m, 2)`` array with ``i < j`` in
    lexicographic order; adjacency views are derived lazily and cached.
    Instances are immutable and safe to share between threads.
    """

    __slots__ = ("n", "edges", "__dict__")

    def __init__(self, n: int, edges=()):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            codes = np.unique(lo * n + hi)
            e = np.stack([codes // n, codes % n], axis=1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", _freeze(e))

    def __setattr__(self, name, value):
        raise AttributeError("UndirectedGraph is immutable")

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, m={self.m})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        return _freeze(np.bincount(self.edges.ravel(), minlength=self.n))

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.int8)
        a = sp.csr_matrix((data, (np.concatenate([i, j]), np.concatenate([j, i]))),
                          shape=(self.n, self.n))
        a.sort_indices()
        return a

    @cached_property
    def adj(self) -> list[list[int]]:
        """Sorted neighbour lists as plain Python lists."""
        a = self.csr
        ind = a.indices.tolist()
        ptr = a.indptr.tolist()
        return [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    @cached_property
    def adj_sets(self) -> list[frozenset]:
        return [frozenset(nb) for nb in self.adj]

    @cached_property
    def adj_bits(self) -> list[int]:
        """Neighbourhoods as Python-int bitmasks (small graphs)."""
        out = []
        for nb in self.adj:
            b = 0
            for u in nb:
                b |= 1 << u
            out.append(b)
        return out

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj_sets[i]

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    def with_edge(self, i: int, j: int) -> "UndirectedGraph":
        return UndirectedGraph(self.n, np.vstack([self.edges, [[i, j]]]))

    def without_nodes(self, nodes) -> "UndirectedGraph":
        """Induced subgraph on the remaining nodes, relabelled in order."""
        drop = np.zeros(self.n, dtype=bool)
        drop[list(nodes)] = True
        keep = np.flatnonzero(~drop)
        relabel = -np.ones(self.n, dtype=np.int64)
        relabel[keep] = np.arange(len(keep))
        e = self.edges
        ok = ~drop[e[:, 0]] & ~drop[e[:, 1]] if len(e) else np.zeros(0, dtype=bool)
        return UndirectedGraph(len(keep), relabel[e[ok]])

    @classmethod
    def complete(cls, n: int) -> "UndirectedGraph":
        i, j = np.triu_indices(n, k=1)
        return cls(n, np.stack([i, j], axis=1))

    @classmethod
    def cycle(cls, n: int) -> "UndirectedGraph":
        return cls(n, [(v, (v + 1) % n) for v in range(n)])

    @classmethod
    def path(cls, n: int) -> "UndirectedGraph":
        return cls(n, [(v, v + 1) for v in range(n - 1)])

    @classmethod
    def star(cls, leaves: int) -> "UndirectedGraph":
        return cls(leaves + 1, [(0, v) for v in range(1, leaves + 1)])

    @classmethod
    def petersen(cls) -> "UndirectedGraph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls(10, outer + spokes + inner)


@dataclass(frozen=True, eq=False)
class KeyAssignment:
    """Key rings of all nodes; ``rings[i]`` is sorted ascending."""

    params: ModelParams
    rings: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rings, dtype=np.int64)
        p = self.params
        if r.shape != (p.n, p.K):
            raise ValueError(f"expected rings of shape {(p.n, p.K)}, got {r.shape}")
        if r.size and (r.min() < 0 or r.max() >= p.P):
            raise ValueError("key identifier outside [0, P)")
        if p.K > 1 and np.any(np.diff(r, axis=1) <= 0):
            raise ValueError("rings must be strictly increasing")
        object.__setattr__(self, "rings", _freeze(r.copy()))

    def __eq__(self, other):
        if not isinstance(other, KeyAssignment):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.rings, other.rings)


def _sample_k_subsets(rng: np.random.Generator, rows: int, K: int, P: int) -> np.ndarray:
    """``rows`` independent uniform K-subsets of range(P), sorted per row.

    Floyd's algorithm run in lockstep over all rows: for j = P-K, ..., P-1
    draw t uniform on [0, j] (one ``integers`` call of ``rows`` values) and
    keep t, or j when t is already in the row.
    """
    out = np.empty((rows, K), dtype=np.int64)
    for c, j in enumerate(range(P - K, P)):
        t = rng.integers(0, j + 1, size=rows)
        if c:
            dup = (out[:, :c] == t[:, None]).any(axis=1)
            t = np.where(dup, j, t)
        out[:, c] = t
    out.sort(axis=1)
    return out


def sample_key_assignment(params: ModelParams, seed: RngSeed | int) -> KeyAssignment:
    rng = as_seed(seed, "rkg").generator()
    return KeyAssignment(params, _sample_k_subsets(rng, params.n, params.K, params.P))


def shared_key_count(a: KeyAssignment, i: int, j: int) -> int:
    n = a.params.n
    if i == j:
        raise ValueError("shared_key_count needs two distinct nodes")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"node id out of range for n={n}")
    return int(np.intersect1d(a.rings[i], a.rings[j], assume_unique=True).size)


def _edges_sparse(indptr: np.ndarray, keys: np.ndarray, n: int, P: int, q: int) -> np.ndarray:
    # Incidence Gram matrix: entry (i, j) counts keys held by both i and j.
    # Per-key co-occurrence counting, cost sum_k holders(k)^2.
    inc = sp.csr_matrix((np.ones(len(keys), dtype=np.int32), keys, indptr), shape=(n, P))
    gram = (inc @ inc.T).tocoo()
    keep = (gram.row < gram.col) & (gram.data >= q)
    return np.stack([gram.row[keep], gram.col[keep]], axis=1).astype(np.int64)


def _edges_dense(rows: Sequence[np.ndarray], n: int, q: int) -> np.ndarray:
    # Bitset path: keys relabelled to the used ones, rings packed in uint64 words.
    used = np.unique(np.concatenate(rows)) if len(rows) else np.zeros(0, dtype=np.int64)
    words = max(1, (len(used) + 63) // 64)
    bits = np.zeros((n, words), dtype=np.uint64)
    for v, r in enumerate(rows):
        idx = np.searchsorted(used, r)
        np.bitwise_or.at(bits[v], idx >> 6, np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64)))
    out = []
    for i in range(n - 1):
        common = np.bitwise_count(bits[i] & bits[i + 1:]).sum(axis=1)
        js = np.flatnonzero(common >= q) + i + 1
        out.extend((i, int(j)) for j in js)
    return np.asarray(out, dtype=np.int64).reshape(-1, 2)


def _edges_from_rings(rows: Sequence[np.ndarray], n: int, P: int, q: int, method: str) -> np.ndarray:
    if method == "auto":
        method = "sparse"
    if method == "dense":
        if n > DENSE_MAX_N:
            raise ValueError(f"dense construction is limited to n <= {DENSE_MAX_N}")
        return _edges_dense(rows, n, q)
    if method != "sparse":
        raise ValueError(f"unknown construction method {method!r}")
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=n)
    indptr = np.concatenate([[0], np.cumsum(lengths)])
    keys = np.concatenate(rows) if n else np.zeros(0, dtype=np.int64)
    return _edges_sparse(indptr, keys, n, P, q)


def build_graph(a: KeyAssignment, q: int | None = None, method: str = "auto") -> UndirectedGraph:
    """Edge (i, j) iff the rings of i and j share at least q keys.

    ``q`` defaults to ``a.params.q``.  ``method`` selects the sparse
    per-key co-occurrence count ("sparse", the default) or the packed
    bitset comparison ("dense", n <= 256).
    """
    p = a.params
    q = p.q if q is None else q
    if q < 1:
        raise ValueError("q must be >= 1")
    rows = list(a.rings)
    return UndirectedGraph(p.n, _edges_from_rings(rows, p.n, p.P, q, method))


def sample_rkg(params: ModelParams, seed: RngSeed | int, method: str = "auto") -> UndirectedGraph:
    return build_graph(sample_key_assignment(params, seed), method=method)


def _pair_from_index(k: np.ndarray, n: int) -> np.ndarray:
    # Row i of the strict upper triangle starts at i*n - i*(i+1)/2.
    starts = np.arange(n, dtype=np.int64)
    starts = starts * n - starts * (starts + 1) // 2
    i = np.searchsorted(starts, k, side="right") - 1
    j = k - starts[i] + i + 1
    return np.stack([i, j], axis=1)


def sample_er(p: ErParams, seed: RngSeed | int) -> UndirectedGraph:
    """G_ER(n, s): edge count ~ Binomial(C(n,2), s), then a uniform edge set of that size."""
    rng = as_seed(seed, "er").generator()
    total = p.n * (p.n - 1) // 2
    m = int(rng.binomial(total, p.s)) if total else 0
    if m == 0:
        return UndirectedGraph(p.n)
    idx = np.sort(rng.choice(total, size=m, replace=False))
    return UndirectedGraph(p.n, _pair_from_index(idx, p.n))


def sample_binomial_rings(p: BinomialIntersectionParams, seed: RngSeed | int) -> list[np.ndarray]:
    rng = as_seed(seed, "binq").generator()
    sizes = rng.binomial(p.P, p.x, size=p.n)
    return [np.sort(rng.choice(p.P, size=int(c), replace=False)) for c in sizes]


def sample_binomial_intersection(p: BinomialIntersectionParams, seed: RngSeed | int,
                                 method: str = "auto") -> UndirectedGraph:
    rows = sample_binomial_rings(p, seed)
    return UndirectedGraph(p.n, _edges_from_rings(rows, p.n, p.P, p.q, method))


# --- canonical JSON ---------------------------------------------------------

def graph_to_dict(g: UndirectedGraph, model: str, params, seed: RngSeed | int | None) -> dict:
    if model not in ("rkg", "er", "binq"):
        raise ValueError(f"unknown model {model!r}")
    if isinstance(seed, int):
        seed = as_seed(seed, model)
    return {
        "n": g.n,
        "model": model,
        "params": params.to_dict() if hasattr(params, "to_dict") else dict(params),
        "seed": None if seed is None else seed.to_dict(),
        "edges": g.edges.tolist(),
    }


def graph_to_json(g: UndirectedGraph, model: str, params, seed) -> str:
    return json.dumps(graph_to_dict(g, model, params, seed), separators=(",", ":")) + "\n"


def graph_from_dict(d: dict) -> UndirectedGraph:
    edges = d.get("edges", [])
    for e in edges:
        if len(e) != 2:
            raise ValueError(f"malformed edge {e!r}")
    return UndirectedGraph(int(d["n"]), edges)


def graph_from_json(text: str) -> UndirectedGraph:
    return graph_from_dict(json.loads(text))
