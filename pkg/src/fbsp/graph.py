"""Weighted complete digraphs with cost-sorted adjacency in both directions.

A :class:`SortedDigraph` stores, for every vertex, the outgoing and the
incoming edges sorted in non-decreasing order of cost.  Graphs are either
generated from a random weight model (:func:`gen_complete`) or built from an
explicit edge list (:func:`build_sorted_adjacency`), and can be saved to and
loaded from a plain text format.

Random edge costs are derived from a counter-based PRNG: the cost of edge
(u, v) is a pure function of (seed, u, v), so generation is reproducible and
independent of the order in which edges are materialized.  Undirected graphs
key both orientations of a pair on (min(u, v), max(u, v)), which makes the
cost matrix symmetric by construction.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

EXPONENTIAL = "exp"
UNIFORM = "uniform"
WEIBULL = "weibull"
EXPLICIT = "explicit"

_KINDS = (EXPONENTIAL, UNIFORM, WEIBULL, EXPLICIT)


class GraphError(ValueError):
    """Invalid graph parameters, edges, or graph file contents."""


@dataclass(frozen=True)
class WeightModel:
    """Edge-cost distribution: exponential, uniform on [0,1], a power of an
    exponential (``cost = Exp(1)**shape``), or explicit (caller-supplied)."""

    kind: str = EXPONENTIAL
    seed: int = 0
    shape: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GraphError(f"unknown weight model kind: {self.kind!r}")
        if self.kind == WEIBULL:
            if self.shape is None or not (self.shape > 0):
                raise GraphError("weibull model requires a positive shape")
        elif self.shape is not None:
            raise GraphError(f"shape is only meaningful for {WEIBULL!r}")


# SplitMix64 finalizer; applied to a counter it is the SplitMix64 generator.
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z):
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        z = np.bitwise_xor(z, z >> np.uint64(30)) * _MIX1
        z = np.bitwise_xor(z, z >> np.uint64(27)) * _MIX2
        return np.bitwise_xor(z, z >> np.uint64(31))


def _edge_uniform(base: np.uint64, idx) -> np.ndarray:
    """Uniform [0,1) variates for edge counters ``idx``, substream ``base``."""
    with np.errstate(over="ignore"):
        h = _mix64(base + (np.asarray(idx, dtype=np.uint64) + np.uint64(1)) * _GOLDEN)
    return np.ldexp((h >> np.uint64(11)).astype(np.float64), -53)


def _stream_base(seed: int) -> np.uint64:
    # 0-d array: numpy scalars warn on uint64 wraparound, arrays do not
    return _mix64(np.asarray(seed & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64))


def _costs_from_uniform(u: np.ndarray, model: WeightModel) -> np.ndarray:
    if model.kind == EXPONENTIAL:
        return -np.log1p(-u)
    if model.kind == UNIFORM:
        return u
    if model.kind == WEIBULL:
        return (-np.log1p(-u)) ** model.shape
    raise GraphError(f"cannot sample from model kind {model.kind!r}")


class SortedDigraph:
    """Immutable weighted digraph with cost-sorted adjacency, both directions.

    Adjacency is stored CSR-style: the outgoing edges of vertex ``u`` are
    ``out_to[out_ptr[u]:out_ptr[u+1]]`` with costs ``out_w[...]``, sorted by
    (cost, target).  Incoming edges are stored symmetrically, sorted by
    (cost, source).  Both views describe the same edge multiset.
    """

    __slots__ = ("n", "directed", "out_ptr", "out_to", "out_w",
                 "in_ptr", "in_from", "in_w")

    def __init__(self, n, directed, out_ptr, out_to, out_w, in_ptr, in_from, in_w):
        self.n = int(n)
        self.directed = bool(directed)
        self.out_ptr = out_ptr
        self.out_to = out_to
        self.out_w = out_w
        self.in_ptr = in_ptr
        self.in_from = in_from
        self.in_w = in_w

    @property
    def num_edges(self) -> int:
        return int(self.out_to.shape[0])

    def out_edges(self, u: int) -> Tuple[np.ndarray, np.ndarray]:
        """(targets, costs) of u's outgoing edges, non-decreasing cost."""
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return self.out_to[lo:hi], self.out_w[lo:hi]

    def in_edges(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        """(sources, costs) of v's incoming edges, non-decreasing cost."""
        lo, hi = self.in_ptr[v], self.in_ptr[v + 1]
        return self.in_from[lo:hi], self.in_w[lo:hi]

    def out_degree(self, u: int) -> int:
        return int(self.out_ptr[u + 1] - self.out_ptr[u])

    def in_degree(self, v: int) -> int:
        return int(self.in_ptr[v + 1] - self.in_ptr[v])

    def cost_matrix(self) -> np.ndarray:
        """Dense n*n cost matrix; +inf marks absent edges, 0 on the diagonal.

        Intended for small graphs (tests, exhaustive classification); the
        matrix is rebuilt on every call.
        """
        m = np.full((self.n, self.n), np.inf)
        np.fill_diagonal(m, 0.0)
        for u in range(self.n):
            to, w = self.out_edges(u)
            m[u, to] = w
        return m

    def edge_list(self) -> np.ndarray:
        """Structured copy of all edges as (u, v, cost) arrays in one record."""
        n = self.n
        src = np.repeat(np.arange(n, dtype=np.int32), np.diff(self.out_ptr))
        return np.rec.fromarrays([src, self.out_to, self.out_w],
                                 names=["u", "v", "cost"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SortedDigraph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and np.array_equal(self.out_ptr, other.out_ptr)
                and np.array_equal(self.out_to, other.out_to)
                and np.array_equal(self.out_w, other.out_w)
                and np.array_equal(self.in_ptr, other.in_ptr)
                and np.array_equal(self.in_from, other.in_from)
                and np.array_equal(self.in_w, other.in_w))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"SortedDigraph(n={self.n}, edges={self.num_edges}, {kind})"


def _complete_row_costs(n: int, u: int, model: WeightModel, directed: bool,
                        base: np.uint64, targets: np.ndarray) -> np.ndarray:
    if directed:
        idx = np.uint64(u) * np.uint64(n) + targets.astype(np.uint64)
    else:
        lo = np.minimum(targets, u).astype(np.uint64)
        hi = np.maximum(targets, u).astype(np.uint64)
        idx = lo * np.uint64(n) + hi
    return _costs_from_uniform(_edge_uniform(base, idx), model)


def gen_complete(n: int, model: WeightModel, directed: bool = True) -> SortedDigraph:
    """Generate the complete graph on ``n`` vertices with random edge costs.

    All n(n-1) directed costs are i.i.d. draws from ``model`` (for an
    undirected graph, the n(n-1)/2 pair costs are mirrored).  The result is a
    pure function of (n, model.kind, model.shape, model.seed, directed).
    """
    if n < 1:
        raise GraphError("graph must have at least one vertex")
    if model.kind == EXPLICIT:
        raise GraphError("gen_complete needs a samplable weight model")
    n = int(n)
    base = _stream_base(model.seed)

    deg = n - 1
    if deg == 0:
        empty_ptr = np.zeros(2, dtype=np.int64)
        none32 = np.empty(0, dtype=np.int32)
        none64 = np.empty(0, dtype=np.float64)
        return SortedDigraph(1, directed, empty_ptr, none32, none64,
                             empty_ptr.copy(), none32.copy(), none64.copy())
    out_ptr = np.arange(0, n * deg + 1, deg, dtype=np.int64)
    out_to = np.empty(n * deg, dtype=np.int32)
    out_w = np.empty(n * deg, dtype=np.float64)
    in_ptr = out_ptr.copy()
    in_from = np.empty(n * deg, dtype=np.int32)
    in_w = np.empty(n * deg, dtype=np.float64)

    all_v = np.arange(n, dtype=np.int32)
    for u in range(n):
        others = np.concatenate([all_v[:u], all_v[u + 1:]])
        w = _complete_row_costs(n, u, model, directed, base, others)
        order = np.argsort(w, kind="stable")  # ties fall back to vertex order
        lo = u * deg
        out_to[lo:lo + deg] = others[order]
        out_w[lo:lo + deg] = w[order]
        if directed:
            # incoming edge (v, u) has counter v*n + u
            idx = others.astype(np.uint64) * np.uint64(n) + np.uint64(u)
            win = _costs_from_uniform(_edge_uniform(base, idx), model)
        else:
            win = w
        order = np.argsort(win, kind="stable")
        in_from[lo:lo + deg] = others[order]
        in_w[lo:lo + deg] = win[order]

    return SortedDigraph(n, directed, out_ptr, out_to, out_w, in_ptr, in_from, in_w)


def complete_cost_matrix(n: int, model: WeightModel, directed: bool = True) -> np.ndarray:
    """Dense cost matrix of the same graph :func:`gen_complete` would build."""
    if n < 1:
        raise GraphError("graph must have at least one vertex")
    if model.kind == EXPLICIT:
        raise GraphError("complete_cost_matrix needs a samplable weight model")
    base = _stream_base(model.seed)
    all_v = np.arange(n, dtype=np.int32)
    m = np.zeros((n, n))
    for u in range(n):
        others = np.concatenate([all_v[:u], all_v[u + 1:]])
        m[u, others] = _complete_row_costs(n, u, model, directed, base, others)
    return m


def _exp_bucket_ids(costs: np.ndarray, nbuckets: int) -> np.ndarray:
    # Quantile buckets for Exp(1): boundaries -ln(1 - i/N), i.e. bucket of a
    # cost c is floor(N * (1 - e^-c)), which spreads costs uniformly.
    ids = np.floor(nbuckets * (-np.expm1(-costs))).astype(np.int64)
    return np.clip(ids, 0, nbuckets - 1)


def _bucket_cost_order(costs: np.ndarray, tie: np.ndarray,
                       model: Optional[WeightModel]) -> np.ndarray:
    """Indices sorting edges by (cost, tie).

    When the cost distribution is known to be Exp(1), edges are first
    scattered into equal-probability quantile buckets (one per edge) and each
    bucket is then finished with heapsort; otherwise a comparison sort is
    used.  Either way the result is identical to a full comparison sort.
    """
    m = costs.shape[0]
    if model is None or model.kind != EXPONENTIAL or m < 2:
        return np.lexsort((tie, costs))

    ids = _exp_bucket_ids(costs, m)
    order = np.argsort(ids, kind="stable")
    counts = np.bincount(ids, minlength=m)
    out = np.empty(m, dtype=np.int64)
    pos = 0
    filled = 0
    for b in np.nonzero(counts)[0]:
        cnt = int(counts[b])
        members = order[filled:filled + cnt]
        filled += cnt
        if cnt == 1:
            out[pos] = members[0]
            pos += 1
            continue
        heap = [(costs[i], tie[i], i) for i in members.tolist()]
        heapq.heapify(heap)
        while heap:
            out[pos] = heapq.heappop(heap)[2]
            pos += 1
    return out


def build_sorted_adjacency(edges: Iterable[Tuple[int, int, float]], n: int,
                           directed: bool = True,
                           model: Optional[WeightModel] = None) -> SortedDigraph:
    """Build a :class:`SortedDigraph` from explicit (u, v, cost) edges.

    Costs must be finite and non-negative, endpoints in [0, n) and distinct.
    ``model`` may describe the cost distribution to enable quantile-bucket
    sorting; the output is the same either way.
    """
    if n < 1:
        raise GraphError("graph must have at least one vertex")
    edges = list(edges)
    m = len(edges)
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=m)
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=m)
    w = np.fromiter((e[2] for e in edges), dtype=np.float64, count=m)

    if m:
        if src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n:
            raise GraphError("edge endpoint out of range")
        if np.any(src == dst):
            raise GraphError("self-loops are not allowed")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise GraphError("edge costs must be finite and non-negative")

    def _csr(key_src, key_dst, key_w):
        order = _bucket_cost_order(key_w, key_dst, model)
        s, d, ww = key_src[order], key_dst[order], key_w[order]
        by_vertex = np.argsort(s, kind="stable")  # stable: keeps cost order
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(s, minlength=n), out=ptr[1:])
        return ptr, d[by_vertex].astype(np.int32), ww[by_vertex]

    out_ptr, out_to, out_w = _csr(src, dst, w)
    in_ptr, in_from, in_w = _csr(dst, src, w)
    return SortedDigraph(n, directed, out_ptr, out_to, out_w, in_ptr, in_from, in_w)


def save(graph: SortedDigraph, path) -> None:
    """Write a graph as text: header ``n directed`` then one ``u v cost`` line
    per edge (undirected graphs store each edge once, as its u < v copy)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{graph.n} {int(graph.directed)}\n")
        for u in range(graph.n):
            to, w = graph.out_edges(u)
            for v, c in zip(to.tolist(), w.tolist()):
                if graph.directed or u < v:
                    fh.write(f"{u} {v} {c!r}\n")


def load(path) -> SortedDigraph:
    """Load a graph saved by :func:`save`, validating and re-sorting it.

    Rejects malformed headers, out-of-range endpoints, negative costs, and
    files whose per-vertex edge sequences are not in non-decreasing cost
    order (i.e. files not produced by :func:`save`).
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise GraphError("malformed graph header")
        try:
            n = int(header[0])
            directed = bool(int(header[1]))
        except ValueError as exc:
            raise GraphError("malformed graph header") from exc
        if n < 1:
            raise GraphError("graph must have at least one vertex")

        edges = []
        last_cost = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise GraphError(f"malformed edge on line {lineno}")
            try:
                u, v, c = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise GraphError(f"malformed edge on line {lineno}") from exc
            if c < last_cost.get(u, 0.0):
                raise GraphError(
                    f"adjacency of vertex {u} not sorted (line {lineno})")
            last_cost[u] = c
            edges.append((u, v, c))
            if not directed:
                edges.append((v, u, c))

    return build_sorted_adjacency(edges, n, directed=directed)


def check_invariants(graph: SortedDigraph) -> None:
    """Assert the structural invariants of a graph (O(n^2); for tests)."""
    n = graph.n
    seen_out = set()
    seen_in = set()
    for u in range(n):
        to, w = graph.out_edges(u)
        assert np.all(np.diff(w) >= 0), f"out_adj[{u}] not sorted"
        assert not np.any(to == u), "self-loop"
        eq = np.diff(w) == 0
        if eq.any():
            assert np.all(np.diff(to)[eq] > 0), f"out_adj[{u}] tie order"
        seen_out.update((u, int(v), float(c)) for v, c in zip(to, w))
    for v in range(n):
        frm, w = graph.in_edges(v)
        assert np.all(np.diff(w) >= 0), f"in_adj[{v}] not sorted"
        eq = np.diff(w) == 0
        if eq.any():
            assert np.all(np.diff(frm)[eq] > 0), f"in_adj[{v}] tie order"
        seen_in.update((int(u), v, float(c)) for u, c in zip(frm, w))
    assert seen_out == seen_in, "out/in adjacency views disagree"
