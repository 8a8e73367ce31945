"""Single-source shortest paths on cost-sorted adjacency.

Three algorithms over a :class:`~fbsp.graph.SortedDigraph`:

* :func:`dijkstra` -- the classic label-setting algorithm; exact and simple,
  used as the correctness reference for everything else.
* :func:`spira` -- lazily scans each sorted outgoing list one edge at a
  time, keeping one candidate edge per settled vertex in a priority queue.
* :func:`fb_sssp` -- the forward-backward algorithm.  It runs like Spira
  until the median distance is known, then restricts forward scans to cheap
  ("out-pertinent") edges and discovers the remaining shortest-path edges by
  scanning sorted *incoming* lists of unsettled vertices, feeding them back
  into the forward search through per-vertex request lists.

All runs return a :class:`ShortestPathTree` plus :class:`ScanStats`
instrumentation counters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Callable, List, Optional, Tuple

import numpy as np

from .graph import SortedDigraph
from .pq import BinaryHeapQueue, BucketQueue, MonotoneQueue, bucket_defaults

INF = math.inf


@dataclass
class ShortestPathTree:
    """Parent/distance arrays rooted at ``source``; parent -1 marks the
    source and unreachable vertices, whose distance is +inf."""

    source: int
    parent: np.ndarray
    dist: np.ndarray


@dataclass
class ScanStats:
    forward_scans: int = 0
    backward_scans: int = 0
    p_inserts: int = 0
    p_extracts: int = 0
    q_inserts: int = 0
    q_extracts: int = 0
    requests: int = 0
    urgent_requests: int = 0
    median: float = INF
    size_at_median: int = 0

    @property
    def total_scans(self) -> int:
        return self.forward_scans + self.backward_scans

    def as_dict(self) -> dict:
        return {
            "forward_scans": self.forward_scans,
            "backward_scans": self.backward_scans,
            "p_inserts": self.p_inserts,
            "p_extracts": self.p_extracts,
            "q_inserts": self.q_inserts,
            "q_extracts": self.q_extracts,
            "requests": self.requests,
            "urgent_requests": self.urgent_requests,
            "median": self.median if math.isfinite(self.median) else None,
            "size_at_median": self.size_at_median,
        }


@dataclass
class FbConfig:
    """Queue selection for the forward-backward run.

    ``pq`` is "bucket" (two-level bucket queues, the default) or "binheap".
    ``nbuckets``/``width`` override the bucket parameters, which otherwise
    default to B = n and W = 1/(n ln n).
    """

    pq: str = "bucket"
    nbuckets: Optional[int] = None
    width: Optional[float] = None

    def make_queue(self, n: int) -> MonotoneQueue:
        if self.pq == "binheap":
            return BinaryHeapQueue()
        if self.pq == "bucket":
            nb, w = bucket_defaults(n)
            return BucketQueue(self.nbuckets or nb, self.width or w)
        raise ValueError(f"unknown queue kind {self.pq!r}")


def dijkstra(graph: SortedDigraph, source: int) -> ShortestPathTree:
    """Exact shortest path tree; the oracle for the lazier algorithms.

    Standard label-setting with a lazy-deletion heap; edge relaxation per
    settled vertex is vectorized over its out-adjacency row.
    """
    n = graph.n
    if not (0 <= source < n):
        raise ValueError("source out of range")
    dist = np.full(n, INF)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap: List[Tuple[float, int]] = [(0.0, source)]
    while heap:
        du, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        to, w = graph.out_edges(u)
        nd = du + w
        sel = nd < dist[to]
        if sel.any():
            better_v = to[sel]
            better_d = nd[sel]
            dist[better_v] = better_d
            parent[better_v] = u
            for v, dv in zip(better_v.tolist(), better_d.tolist()):
                heappush(heap, (dv, v))
    return ShortestPathTree(source, parent, dist)


def spira(graph: SortedDigraph, source: int,
          queue_factory: Callable[[], MonotoneQueue] = BinaryHeapQueue
          ) -> Tuple[ShortestPathTree, ScanStats]:
    """Spira's algorithm: one candidate outgoing edge per settled vertex.

    Requires sorted out-adjacency.  Each extraction of (u, v) scans the edge
    after it in Out[u]; a newly settled vertex scans its first edge.
    """
    n = graph.n
    if not (0 <= source < n):
        raise ValueError("source out of range")
    dist = np.full(n, INF)
    parent = np.full(n, -1, dtype=np.int64)
    dist[source] = 0.0
    stats = ScanStats()

    out_to = [None] * n
    out_w = [None] * n
    cursor = [0] * n

    P = queue_factory()

    def forward(u: int, du: float) -> None:
        row_to = out_to[u]
        if row_to is None:
            row_to, out_w[u] = graph.out_edges(u)
            out_to[u] = row_to
        i = cursor[u]
        if i < row_to.shape[0]:
            cursor[u] = i + 1
            stats.forward_scans += 1
            P.insert((u, int(row_to[i])), float(du + out_w[u][i]))
            stats.p_inserts += 1

    forward(source, 0.0)
    settled = 1
    while settled < n and len(P):
        (u, v), key = P.extract_min()
        stats.p_extracts += 1
        forward(u, dist[u])
        if dist[v] == INF:
            dist[v] = key
            parent[v] = u
            settled += 1
            forward(v, key)
    return ShortestPathTree(source, parent, dist), stats


class FbRecording:
    """Instrumentation captured by a recording forward-backward run.

    Traces are replayable op lists (("i", key) / ("x",)).  Insert/request
    logs keep enough context to check the algorithm's invariants after the
    fact: which edges entered each queue, with what key, and whether a P
    insert came from the out-list or the request list.
    """

    def __init__(self):
        self.p_trace: list = []
        self.q_trace: list = []
        self.p_extract_keys: List[float] = []
        self.q_extract_keys: List[float] = []
        self.p_inserts: List[Tuple[int, int, float, float, bool]] = []  # u, v, c, key, from_req
        self.q_inserts: List[Tuple[int, int, float]] = []  # u, v, c
        self.requests: List[Tuple[int, int, float]] = []  # u, v, c


def fb_sssp(graph: SortedDigraph, source: int,
            config: Optional[FbConfig] = None,
            record: Optional[FbRecording] = None
            ) -> Tuple[ShortestPathTree, ScanStats]:
    """Forward-backward SSSP.  Requires sorted out- and in-adjacency.

    Stage 1 is Spira's algorithm.  When the ceil(n/2)-th vertex settles, its
    distance becomes the threshold M, every unsettled vertex backward-scans
    its first incoming edge into queue Q, and from then on:

    * forward(u) stops scanning Out[u] at the first edge with
      c > 2(M - d[u]) and switches to u's request list;
    * after each settling step, edges are drained from Q while
      min(Q) < 2(min(P) - M); each drained edge (u, v) with v unsettled
      backward-scans the next incoming edge of v and is appended to Req[u]
      (scanned immediately -- an "urgent request" -- if u is settled but has
      no edge in P).
    """
    n = graph.n
    if not (0 <= source < n):
        raise ValueError("source out of range")
    if config is None:
        config = FbConfig()

    dist = np.full(n, INF)
    parent = np.full(n, -1, dtype=np.int64)
    dist[source] = 0.0
    stats = ScanStats()

    out_to: list = [None] * n
    out_w: list = [None] * n
    out_cur = [0] * n
    in_from: list = [None] * n
    in_w: list = [None] * n
    in_cur = [0] * n
    out_ok = [True] * n     # Out[u] may still hold out-pertinent edges
    active = [False] * n    # u currently has an edge in P
    req: List[list] = [[] for _ in range(n)]
    req_cur = [0] * n

    P = config.make_queue(n)
    Q = config.make_queue(n)
    M = INF

    ceil_half = (n + 1) // 2

    def forward(u: int) -> None:
        du = dist[u]
        v = -1
        c = 0.0
        if out_ok[u]:
            row = out_to[u]
            if row is None:
                row, out_w[u] = graph.out_edges(u)
                out_to[u] = row
            i = out_cur[u]
            if i < row.shape[0]:
                out_cur[u] = i + 1
                stats.forward_scans += 1
                c = float(out_w[u][i])
                if M < INF and c > 2.0 * (M - du):
                    out_ok[u] = False
                else:
                    v = int(row[i])
            else:
                out_ok[u] = False
        if v < 0:
            j = req_cur[u]
            ru = req[u]
            if j < len(ru):
                req_cur[u] = j + 1
                v, c = ru[j]
        if v >= 0:
            active[u] = True
            key = float(du + c)
            P.insert((u, v), key)
            stats.p_inserts += 1
            if record is not None:
                record.p_trace.append(("i", key))
                record.p_inserts.append((u, v, c, key, not out_ok[u]))
        else:
            active[u] = False

    def backward(v: int) -> None:
        row = in_from[v]
        if row is None:
            row, in_w[v] = graph.in_edges(v)
            in_from[v] = row
        i = in_cur[v]
        if i < row.shape[0]:
            in_cur[v] = i + 1
            stats.backward_scans += 1
            u = int(row[i])
            c = float(in_w[v][i])
            Q.insert((u, v), c)
            stats.q_inserts += 1
            if record is not None:
                record.q_trace.append(("i", c))
                record.q_inserts.append((u, v, c))

    def request(u: int, v: int, c: float) -> None:
        stats.requests += 1
        req[u].append((v, c))
        if record is not None:
            record.requests.append((u, v, c))
        if dist[u] < INF and not active[u]:
            stats.urgent_requests += 1
            forward(u)

    if n == 1:
        # the median vertex is the source itself; stage 2 starts immediately
        M = 0.0
        stats.median = 0.0
        stats.size_at_median = 1

    forward(source)
    settled = 1
    while settled < n and len(P):
        (u, v), key = P.extract_min()
        stats.p_extracts += 1
        if record is not None:
            record.p_trace.append(("x",))
            record.p_extract_keys.append(key)
        forward(u)
        if dist[v] == INF:
            dist[v] = key
            parent[v] = u
            settled += 1
            forward(v)
            if settled == ceil_half:
                M = key
                stats.median = M
                stats.size_at_median = settled
                for w in range(n):
                    if dist[w] == INF:
                        backward(w)
        # drain newly identifiable in-pertinent edges
        while len(Q):
            qmin = Q.min_key()
            if qmin >= 2.0 * (P.min_key() - M):
                break
            (u2, v2), c2 = Q.extract_min()
            stats.q_extracts += 1
            if record is not None:
                record.q_trace.append(("x",))
                record.q_extract_keys.append(c2)
            if dist[v2] == INF:
                backward(v2)
                request(u2, v2, c2)

    return ShortestPathTree(source, parent, dist), stats


def replay_trace(graph: SortedDigraph, source: int,
                 config: Optional[FbConfig] = None) -> FbRecording:
    """Run fb_sssp recording every queue operation; the returned traces can
    be replayed against any monotone queue implementation."""
    rec = FbRecording()
    fb_sssp(graph, source, config=config, record=rec)
    return rec
