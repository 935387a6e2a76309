"""Problem instances: a connected graph, customer nodes, and weights."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import bfs_reach_count
from .errors import DisconnectedGraphError, InstanceError, ParseError
from .graph import Graph, _parse_graph_lines, format_graph_text

__all__ = [
    "Instance",
    "build_instance",
    "format_instance_text",
    "parse_instance_text",
    "read_instance",
    "write_instance",
]


@dataclass(frozen=True, eq=False)
class Instance:
    """A 1-median instance: where should one facility go to minimize the
    weighted sum of shortest-path distances to the customers?

    ``customers`` holds m distinct node ids; ``weights`` is aligned with it.
    The graph is connected (validated at construction).
    """

    graph: Graph
    customers: np.ndarray  # int64, length m
    weights: np.ndarray  # float64, length m

    @property
    def m(self) -> int:
        return int(self.customers.shape[0])

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def is_unit_weighted(self) -> bool:
        return bool(np.all(self.weights == 1.0))


def build_instance(
    graph: Graph,
    customers: Sequence[int] | np.ndarray,
    weights: Sequence[float] | np.ndarray | None = None,
) -> Instance:
    """Validate and build an Instance; weights default to all ones.

    Raises InstanceError for bad customers/weights and
    DisconnectedGraphError when the graph is not connected.
    """
    cust = np.asarray(customers, np.int64).copy()
    m = cust.shape[0]
    n = graph.node_count
    if m < 1 or m > n:
        raise InstanceError(f"need 1 <= m <= n, got m={m}, n={n}")
    if cust.size and (cust.min() < 0 or cust.max() >= n):
        raise InstanceError(f"customer id outside [0, {n})")
    if np.unique(cust).size != m:
        raise InstanceError("customer ids must be distinct")
    if weights is None:
        w = np.ones(m, np.float64)
    else:
        w = np.asarray(weights, np.float64).copy()
        if w.shape != (m,):
            raise InstanceError(f"expected {m} weights, got shape {w.shape}")
        if not np.all(w >= 0.0):
            raise InstanceError("weights must be non-negative and finite")
        if not np.all(np.isfinite(w)):
            raise InstanceError("weights must be finite")
        if not np.any(w > 0.0):
            raise InstanceError("at least one weight must be positive")
    reached = bfs_reach_count(graph.offsets, graph.neighbors)
    if reached != n:
        raise DisconnectedGraphError(
            f"graph is disconnected: {reached} of {n} nodes reachable from node 0"
        )
    cust.setflags(write=False)
    w.setflags(write=False)
    return Instance(graph=graph, customers=cust, weights=w)


def format_instance_text(instance: Instance) -> str:
    """Serialize to the version-1 instance format: graph block, then a line
    ``m``, then m lines ``customer_id weight`` in stored customer order."""
    parts = [format_graph_text(instance.graph), f"{instance.m}\n"]
    for c, w in zip(instance.customers, instance.weights):
        parts.append("%d %.17g\n" % (c, w))
    return "".join(parts)


def parse_instance_text(text: str) -> Instance:
    """Parse the version-1 instance format; ParseError carries line numbers."""
    lines = text.splitlines()
    graph, pos = _parse_graph_lines(lines, 0)
    if pos >= len(lines):
        raise ParseError(len(lines) + 1, "missing customer-count line")
    m_line = lines[pos].split()
    if len(m_line) != 1:
        raise ParseError(pos + 1, "customer-count line must be a single integer")
    try:
        m = int(m_line[0])
    except ValueError:
        raise ParseError(pos + 1, f"expected integer customer count, got {m_line[0]!r}") from None
    if m < 1:
        raise ParseError(pos + 1, f"customer count must be positive, got {m}")
    if pos + 1 + m > len(lines):
        raise ParseError(len(lines) + 1, f"expected {m} customer lines, file ends early")
    customers = np.empty(m, np.int64)
    weights = np.empty(m, np.float64)
    seen_customers: set[int] = set()
    for k in range(m):
        line_no = pos + 2 + k
        parts = lines[pos + 1 + k].split()
        if len(parts) != 2:
            raise ParseError(line_no, "customer line must be 'customer_id weight'")
        try:
            customers[k] = int(parts[0])
        except ValueError:
            raise ParseError(line_no, f"expected integer customer id, got {parts[0]!r}") from None
        if not 0 <= customers[k] < graph.node_count:
            raise ParseError(
                line_no, f"customer id outside [0, {graph.node_count})"
            )
        if int(customers[k]) in seen_customers:
            raise ParseError(line_no, f"duplicate customer id {customers[k]}")
        seen_customers.add(int(customers[k]))
        try:
            weights[k] = float(parts[1])
        except ValueError:
            raise ParseError(line_no, f"expected numeric weight, got {parts[1]!r}") from None
        if not weights[k] >= 0.0 or not np.isfinite(weights[k]):
            raise ParseError(line_no, f"weight must be non-negative and finite, got {parts[1]!r}")
    for k in range(pos + 1 + m, len(lines)):
        if lines[k].strip():
            raise ParseError(k + 1, "unexpected trailing content after customer list")
    try:
        return build_instance(graph, customers, weights)
    except (InstanceError, DisconnectedGraphError) as exc:
        raise ParseError(pos + 1, str(exc)) from exc


def write_instance(instance: Instance, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_instance_text(instance))


def read_instance(path: str) -> Instance:
    with open(path, "r", encoding="ascii") as fh:
        return parse_instance_text(fh.read())
