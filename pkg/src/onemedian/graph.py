"""Undirected weighted graphs in CSR form, plus the version-1 text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import (
    DuplicateEdgeError,
    GraphError,
    NegativeCostError,
    NodeIdOutOfRangeError,
    ParseError,
    SelfLoopError,
)

Edge = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with non-negative edge costs.

    Adjacency is stored in CSR form: the neighbors of node ``i`` are
    ``neighbors[offsets[i]:offsets[i+1]]`` with matching entries in ``costs``.
    Every undirected edge {u, v} appears as the two arcs u->v and v->u with
    identical cost. Neighbor lists are sorted by node id.
    """

    node_count: int
    offsets: np.ndarray  # int64, length node_count + 1
    neighbors: np.ndarray  # int32, length 2 * edge_count
    costs: np.ndarray  # float64, length 2 * edge_count
    # canonical edge list (u < v), kept for serialization and expansion
    edge_u: np.ndarray = field(repr=False, default=None)
    edge_v: np.ndarray = field(repr=False, default=None)
    edge_cost: np.ndarray = field(repr=False, default=None)

    @property
    def edge_count(self) -> int:
        return self.neighbors.shape[0] // 2

    def edges(self) -> Iterable[Edge]:
        """Yield canonical edges (u, v, cost) with u < v, ascending."""
        for u, v, c in zip(self.edge_u, self.edge_v, self.edge_cost):
            yield int(u), int(v), float(c)

    def degree(self, node: int) -> int:
        return int(self.offsets[node + 1] - self.offsets[node])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def build_graph(n: int, edge_list: Sequence[Edge]) -> Graph:
    """Build a Graph from an edge list, validating all invariants.

    Raises SelfLoopError, NodeIdOutOfRangeError, NegativeCostError, or
    DuplicateEdgeError on bad input. Input edge order does not matter.
    """
    if n < 1:
        raise GraphError(f"node count must be positive, got {n}")
    n_edges = len(edge_list)
    if n_edges == 0:
        u_arr = np.empty(0, np.int64)
        v_arr = np.empty(0, np.int64)
        c_arr = np.empty(0, np.float64)
    else:
        u_arr = np.fromiter((e[0] for e in edge_list), np.int64, n_edges)
        v_arr = np.fromiter((e[1] for e in edge_list), np.int64, n_edges)
        c_arr = np.fromiter((e[2] for e in edge_list), np.float64, n_edges)
    return _assemble(n, u_arr, v_arr, c_arr)


def _assemble(n: int, u_arr: np.ndarray, v_arr: np.ndarray, c_arr: np.ndarray) -> Graph:
    """Validate parallel edge arrays and assemble the CSR graph."""
    if u_arr.size:
        bad = (u_arr < 0) | (u_arr >= n) | (v_arr < 0) | (v_arr >= n)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise NodeIdOutOfRangeError(
                f"edge ({u_arr[k]}, {v_arr[k]}) has a node id outside [0, {n})"
            )
        loops = u_arr == v_arr
        if loops.any():
            k = int(np.flatnonzero(loops)[0])
            raise SelfLoopError(f"self-loop on node {u_arr[k]}")
        neg = ~(c_arr >= 0.0)  # catches negatives and NaN
        if neg.any():
            k = int(np.flatnonzero(neg)[0])
            raise NegativeCostError(
                f"edge ({u_arr[k]}, {v_arr[k]}) has invalid cost {c_arr[k]!r}"
            )
        lo = np.minimum(u_arr, v_arr)
        hi = np.maximum(u_arr, v_arr)
        keys = lo * np.int64(n) + hi
        uniq, counts = np.unique(keys, return_counts=True)
        if uniq.size != keys.size:
            dup_key = int(uniq[np.flatnonzero(counts > 1)[0]])
            raise DuplicateEdgeError(
                f"duplicate edge ({dup_key // n}, {dup_key % n})"
            )
        order = np.argsort(keys, kind="stable")
        lo, hi, c_sorted = lo[order], hi[order], c_arr[order]
    else:
        lo = np.empty(0, np.int64)
        hi = np.empty(0, np.int64)
        c_sorted = np.empty(0, np.float64)

    heads = np.concatenate([lo, hi])
    tails = np.concatenate([hi, lo])
    arc_costs = np.concatenate([c_sorted, c_sorted])
    # sort arcs by (head, tail) so each neighbor list comes out id-sorted
    arc_order = np.lexsort((tails, heads))
    heads = heads[arc_order]
    tails = tails[arc_order]
    arc_costs = arc_costs[arc_order]

    offsets = np.zeros(n + 1, np.int64)
    counts = np.bincount(heads, minlength=n).astype(np.int64)
    np.cumsum(counts, out=offsets[1:])

    return Graph(
        node_count=n,
        offsets=_freeze(offsets),
        neighbors=_freeze(tails.astype(np.int32)),
        costs=_freeze(arc_costs),
        edge_u=_freeze(lo),
        edge_v=_freeze(hi),
        edge_cost=_freeze(c_sorted),
    )


def format_graph_text(graph: Graph) -> str:
    """Serialize to the version-1 text format.

    First line is ``n m_edges``; each following line is ``u v cost`` with
    u < v, edges ascending, and costs printed with 17 significant digits so
    parsing reproduces the exact doubles.
    """
    lines = [f"{graph.node_count} {graph.edge_count}"]
    for u, v, c in zip(graph.edge_u, graph.edge_v, graph.edge_cost):
        lines.append("%d %d %.17g" % (u, v, c))
    return "\n".join(lines) + "\n"


def _parse_int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_no, f"expected integer {what}, got {token!r}") from None


def _parse_cost(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(line_no, f"expected numeric cost, got {token!r}") from None
    if not value >= 0.0:  # rejects negatives, NaN
        raise ParseError(line_no, f"cost must be non-negative and finite, got {token!r}")
    if value == float("inf"):
        raise ParseError(line_no, "cost must be finite")
    return value


def _parse_graph_lines(lines: Sequence[str], start: int) -> tuple[Graph, int]:
    """Parse a graph block from ``lines`` beginning at index ``start``.

    Returns the graph and the index of the first unconsumed line. Line
    numbers in errors are 1-based over the whole document.
    """
    if start >= len(lines):
        raise ParseError(start + 1, "missing graph header line")
    header = lines[start].split()
    if len(header) != 2:
        raise ParseError(start + 1, "header must be 'n m_edges'")
    n = _parse_int(header[0], start + 1, "node count")
    m_edges = _parse_int(header[1], start + 1, "edge count")
    if n < 1:
        raise ParseError(start + 1, f"node count must be positive, got {n}")
    if m_edges < 0:
        raise ParseError(start + 1, f"edge count must be non-negative, got {m_edges}")
    if start + 1 + m_edges > len(lines):
        raise ParseError(len(lines) + 1, f"expected {m_edges} edge lines, file ends early")

    u_arr = np.empty(m_edges, np.int64)
    v_arr = np.empty(m_edges, np.int64)
    c_arr = np.empty(m_edges, np.float64)
    seen: set[int] = set()
    for k in range(m_edges):
        line_no = start + 2 + k
        parts = lines[start + 1 + k].split()
        if len(parts) != 3:
            raise ParseError(line_no, "edge line must be 'u v cost'")
        u = _parse_int(parts[0], line_no, "node id")
        v = _parse_int(parts[1], line_no, "node id")
        c = _parse_cost(parts[2], line_no)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(line_no, f"node id outside [0, {n}) in edge ({u}, {v})")
        if u == v:
            raise ParseError(line_no, f"self-loop on node {u}")
        lo, hi = (u, v) if u < v else (v, u)
        key = lo * n + hi
        if key in seen:
            raise ParseError(line_no, f"duplicate edge ({lo}, {hi})")
        seen.add(key)
        u_arr[k], v_arr[k], c_arr[k] = u, v, c
    return _assemble(n, u_arr, v_arr, c_arr), start + 1 + m_edges


def parse_graph_text(text: str) -> Graph:
    """Parse the version-1 graph text format; ParseError carries line numbers."""
    lines = text.splitlines()
    graph, consumed = _parse_graph_lines(lines, 0)
    for k in range(consumed, len(lines)):
        if lines[k].strip():
            raise ParseError(k + 1, "unexpected trailing content after edge list")
    return graph
