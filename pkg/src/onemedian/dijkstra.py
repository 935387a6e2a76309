"""Full and truncated single-source shortest paths on a Graph.

Both entry points run the same binary-heap engine (lazy deletion, ties
broken by ascending node id), so a truncated run settles an exact prefix
of the full run's settlement sequence with bitwise-identical distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable

import numpy as np

from ._kernels import dijkstra_csr
from .errors import NodeIdOutOfRangeError, TargetUnreachableError
from .graph import Graph

__all__ = ["DeterminedDistances", "dijkstra_full", "dijkstra_truncated", "settle_prefix"]

_NO_TARGETS = np.zeros(0, np.uint8)


@dataclass(frozen=True, eq=False)
class DeterminedDistances:
    """Distances determined by a (possibly truncated) Dijkstra run.

    ``nodes`` is the settlement sequence (source first, distances
    non-decreasing); ``distances`` is aligned with it. Nodes absent from
    the sequence were never settled and stand for distance infinity.
    """

    source: int
    nodes: np.ndarray  # int64, settlement order
    distances: np.ndarray  # float64, aligned with nodes

    @property
    def settled_count(self) -> int:
        return int(self.nodes.shape[0])

    @cached_property
    def lookup(self) -> Dict[int, float]:
        """Mapping from settled node id to its distance."""
        return {int(v): float(d) for v, d in zip(self.nodes, self.distances)}

    def distance_of(self, node: int, default: float = np.inf) -> float:
        return self.lookup.get(node, default)

    def __contains__(self, node: int) -> bool:
        return node in self.lookup


def _check_source(graph: Graph, source: int) -> None:
    if not 0 <= source < graph.node_count:
        raise NodeIdOutOfRangeError(
            f"source {source} outside [0, {graph.node_count})"
        )


def dijkstra_full(graph: Graph, source: int) -> np.ndarray:
    """Shortest-path distances from ``source`` to every node (length n)."""
    _check_source(graph, source)
    _, _, dist, _ = dijkstra_csr(
        graph.offsets, graph.neighbors, graph.costs, source,
        _NO_TARGETS, 0, graph.node_count,
    )
    return dist


def dijkstra_truncated(
    graph: Graph, source: int, targets: Iterable[int] | np.ndarray
) -> DeterminedDistances:
    """Run Dijkstra from ``source`` and stop as soon as every node in
    ``targets`` has been settled; nothing is settled past that point.

    Raises TargetUnreachableError if the queue drains first (never happens
    on a connected graph).
    """
    _check_source(graph, source)
    if not isinstance(targets, np.ndarray):
        targets = np.fromiter(targets, np.int64)
    target_arr = np.unique(targets.astype(np.int64, copy=False))
    n = graph.node_count
    if target_arr.size == 0:
        raise TargetUnreachableError("targets must be non-empty")
    if target_arr[0] < 0 or target_arr[-1] >= n:
        raise NodeIdOutOfRangeError(f"target id outside [0, {n})")
    mask = np.zeros(n, np.uint8)
    mask[target_arr] = 1
    order, odist, _, remaining = dijkstra_csr(
        graph.offsets, graph.neighbors, graph.costs, source,
        mask, target_arr.size, n,
    )
    if remaining > 0:
        raise TargetUnreachableError(
            f"{remaining} of {target_arr.size} targets unreachable from {source}"
        )
    order.setflags(write=False)
    odist.setflags(write=False)
    return DeterminedDistances(source=source, nodes=order, distances=odist)


def settle_prefix(graph: Graph, source: int, count: int) -> DeterminedDistances:
    """Settle the first ``count`` nodes (source included) in Dijkstra order.

    Used for nearest-neighbor pools; stops early on disconnected graphs.
    """
    _check_source(graph, source)
    order, odist, _, _ = dijkstra_csr(
        graph.offsets, graph.neighbors, graph.costs, source,
        _NO_TARGETS, 0, min(count, graph.node_count),
    )
    order.setflags(write=False)
    odist.setflags(write=False)
    return DeterminedDistances(source=source, nodes=order, distances=odist)
