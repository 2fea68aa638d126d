"""Undirected communication graphs for agent teams.

Vertices are 0-based integers. Edges are stored as ``(i, j)`` pairs with
``i < j`` in lexicographic order, which also fixes the edge numbering used
by the incidence matrix and the optimizer's weight vector.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "build_graph",
    "laplacian",
    "incidence",
    "gen_complete",
    "gen_star",
    "gen_clustered",
    "load_graph",
    "save_graph",
]


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on ``m`` vertices."""

    m: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map from canonical edge ``(min, max)`` to its column number."""
        return {e: k for k, e in enumerate(self.edges)}

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.m, self.m), dtype=np.int64)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        a.flags.writeable = False
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.m, dtype=np.int64)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        d.flags.writeable = False
        return d

    @property
    def d_max(self) -> int:
        return int(self.degrees.max()) if self.m else 0

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]

    @cached_property
    def connected(self) -> bool:
        if self.m <= 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.m

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays ``(ei, ej)`` with ``ei < ej``, in edge order."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy()
        e = np.asarray(self.edges, dtype=np.int64)
        return e[:, 0].copy(), e[:, 1].copy()

    def require_connected(self):
        if not self.connected:
            raise ValueError("graph is disconnected; consensus weights need a connected graph")

    def without_vertex(self, v: int) -> Graph:
        """Induced subgraph with vertex ``v`` removed (vertices renumbered)."""
        keep = [u for u in range(self.m) if u != v]
        relabel = {u: k for k, u in enumerate(keep)}
        edges = [(relabel[i], relabel[j]) for i, j in self.edges if v not in (i, j)]
        return build_graph(self.m - 1, edges)


def _canonical(i, j, m):
    i, j = int(i), int(j)
    if not (0 <= i < m and 0 <= j < m):
        raise ValueError(f"edge ({i}, {j}) has an endpoint outside [0, {m})")
    if i == j:
        raise ValueError(f"self-loop at vertex {i}")
    return (i, j) if i < j else (j, i)


def build_graph(m, edges, labels=None) -> Graph:
    """Build a graph, rejecting out-of-range endpoints, self-loops and duplicates."""
    m = int(m)
    if m < 1:
        raise ValueError("a graph needs at least one vertex")
    canon = set()
    for i, j in edges:
        e = _canonical(i, j, m)
        if e in canon:
            raise ValueError(f"duplicate edge {e}")
        canon.add(e)
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != m:
            raise ValueError("need exactly one label per vertex")
    return Graph(m, tuple(sorted(canon)), labels)


def laplacian(g: Graph) -> np.ndarray:
    """Integer graph Laplacian ``D - A``."""
    return np.diag(g.degrees) - g.adjacency


def incidence(g: Graph) -> np.ndarray:
    """Oriented incidence matrix with ``+1`` at the smaller endpoint of each edge."""
    b = np.zeros((g.m, g.n_edges), dtype=np.int64)
    for k, (i, j) in enumerate(g.edges):
        b[i, k] = 1
        b[j, k] = -1
    return b


def gen_complete(m) -> Graph:
    if m < 2:
        raise ValueError("complete graph needs m >= 2")
    return build_graph(m, itertools.combinations(range(m), 2))


def gen_star(m) -> Graph:
    """Star with hub vertex 0."""
    if m < 2:
        raise ValueError("star graph needs m >= 2")
    return build_graph(m, [(0, i) for i in range(1, m)])


def gen_clustered(k, c=5, intra="complete") -> Graph:
    """``k`` clusters of ``c`` vertices joined through a shared parent vertex.

    Cluster ``q`` occupies vertices ``q*c .. q*c + c - 1`` and its first
    vertex is the gateway; the parent is the last vertex, ``k*c``. With
    ``intra="star"`` the gateway is also the cluster hub.
    """
    if k < 2 or c < 2:
        raise ValueError("need at least 2 clusters of at least 2 vertices")
    if intra not in ("complete", "star"):
        raise ValueError(f"unknown intra-cluster topology {intra!r}")
    parent = k * c
    edges = []
    for q in range(k):
        base = q * c
        if intra == "complete":
            edges += [(base + a, base + b) for a, b in itertools.combinations(range(c), 2)]
        else:
            edges += [(base, base + a) for a in range(1, c)]
        edges.append((base, parent))
    return build_graph(k * c + 1, edges)


def load_graph(path) -> Graph:
    """Read an edge-list file (``m <int>`` header, ``e <i> <j>`` lines, ``#`` comments).

    A disconnected graph is returned as is; check ``Graph.connected``.
    """
    m = None
    edges = []
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "m":
                if m is not None:
                    raise GraphFormatError("repeated 'm' line", lineno)
                if len(tok) != 2:
                    raise GraphFormatError("expected 'm <count>'", lineno)
                try:
                    m = int(tok[1])
                except ValueError:
                    raise GraphFormatError(f"bad vertex count {tok[1]!r}", lineno) from None
                if m < 1:
                    raise GraphFormatError("vertex count must be positive", lineno)
            elif tok[0] == "e":
                if len(tok) != 3:
                    raise GraphFormatError("expected 'e <i> <j>'", lineno)
                try:
                    i, j = int(tok[1]), int(tok[2])
                except ValueError:
                    raise GraphFormatError(f"bad edge endpoints {tok[1:]}", lineno) from None
                if i == j:
                    raise GraphFormatError(f"self-loop at vertex {i}", lineno)
                e = (min(i, j), max(i, j))
                if e in seen:
                    raise GraphFormatError(f"duplicate edge {e}", lineno)
                seen.add(e)
                edges.append((e, lineno))
            else:
                raise GraphFormatError(f"unknown record {tok[0]!r}", lineno)
    if m is None:
        raise GraphFormatError("missing 'm <count>' line")
    for (i, j), lineno in edges:
        if j >= m or i < 0:
            raise GraphFormatError(f"edge ({i}, {j}) out of range for m={m}", lineno)
    return build_graph(m, [e for e, _ in edges])


def save_graph(g: Graph, path, comment=None):
    lines = []
    if comment:
        lines += [f"# {s}" for s in comment.splitlines()]
    lines.append(f"m {g.m}")
    lines += [f"e {i} {j}" for i, j in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")
