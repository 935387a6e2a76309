"""Shared test helpers: independent oracles and small instance builders.

The oracles here are deliberately pure Python (no numpy, no shared engine
code) so they can referee the package's compiled kernels.
"""

from __future__ import annotations

import random
from math import inf
from typing import Dict, List, Sequence, Tuple

import pytest
from hypothesis import strategies as st

from onemedian import Instance, build_graph, build_instance

Edge = Tuple[int, int, float]


@st.composite
def connected_graphs(draw, max_n: int = 20, dyadic: bool = False):
    """A connected edge list: attachment tree plus deduplicated extras.

    Dyadic costs (multiples of 1/8 up to 4) make every path sum exactly
    representable, so distance comparisons can demand bitwise equality.
    """
    n = draw(st.integers(2, max_n))
    if dyadic:
        cost = st.integers(0, 32).map(lambda k: k / 8.0)
    else:
        cost = st.floats(0.0, 10.0, allow_nan=False, allow_infinity=False)
    edges: List[Edge] = []
    seen = set()
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        seen.add((j, i))
        edges.append((j, i, draw(cost)))
    for _ in range(draw(st.integers(0, n))):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        key = (min(u, v), max(u, v))
        if u == v or key in seen:
            continue
        seen.add(key)
        edges.append((key[0], key[1], draw(cost)))
    return n, edges


@st.composite
def small_instances(draw, max_n: int = 18, max_m: int | None = None):
    """A valid Instance on a small connected graph; weights may be non-unit."""
    n, edges = draw(connected_graphs(max_n=max_n))
    m_cap = n if max_m is None else min(max_m, n)
    m = draw(st.integers(1, m_cap))
    customers = sorted(draw(st.sets(st.integers(0, n - 1), min_size=m, max_size=m)))
    if draw(st.booleans()):
        weights = None
    else:
        weights = [draw(st.floats(0.0, 4.0)) for _ in range(m)]
        weights[0] = draw(st.floats(0.25, 4.0))  # keep at least one positive
    return build_instance(build_graph(n, edges), customers, weights)


def py_bellman_ford(n: int, edges: Sequence[Edge], source: int) -> List[float]:
    """Reference single-source distances by plain relaxation sweeps."""
    adj: List[List[Tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, c in edges:
        adj[u].append((v, c))
        adj[v].append((u, c))
    dist = [inf] * n
    dist[source] = 0.0
    for _ in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            if du < inf:
                for v, c in adj[u]:
                    nd = du + c
                    if nd < dist[v]:
                        dist[v] = nd
                        changed = True
        if not changed:
            break
    return dist


def py_one_median(
    n: int, edges: Sequence[Edge], customers: Sequence[int], weights: Sequence[float]
) -> Tuple[int, float]:
    """Reference optimum: best weighted distance sum over all nodes."""
    best_node, best_val = -1, inf
    totals = [0.0] * n
    for c, w in zip(customers, weights):
        dist = py_bellman_ford(n, edges, c)
        for i in range(n):
            totals[i] += w * dist[i]
    for i in range(n):
        if totals[i] < best_val:
            best_node, best_val = i, totals[i]
    return best_node, best_val


def random_connected_edges(rng: random.Random, n: int, extra: int) -> List[Edge]:
    """Random connected edge list: attachment tree plus `extra` distinct edges.

    Built with the stdlib RNG so tests do not depend on the package's own
    generator machinery.
    """
    edges: List[Edge] = []
    seen = set()
    for i in range(1, n):
        j = rng.randrange(i)
        seen.add((j, i))
        edges.append((j, i, rng.uniform(0.0, 1.0)))
    attempts = 0
    while extra > 0 and attempts < 50 * (extra + 1):
        attempts += 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append((key[0], key[1], rng.uniform(0.0, 1.0)))
        extra -= 1
    return edges


def random_instance(
    rng: random.Random,
    n: int,
    m: int,
    weighted: bool = False,
    extra_edges: int | None = None,
) -> Instance:
    extra = rng.randrange(0, 2 * n) if extra_edges is None else extra_edges
    edges = random_connected_edges(rng, n, extra)
    customers = rng.sample(range(n), m)
    weights = [rng.uniform(0.0, 1.0) + 1e-12 for _ in range(m)] if weighted else None
    return build_instance(build_graph(n, edges), sorted(customers), weights)


def lb_edges(epsilon: float) -> List[Edge]:
    """The 5-node adversarial example: customers 0-3, hub node 4."""
    return [
        (0, 1, 2.0),
        (0, 2, 2.0),
        (0, 3, 2.0),
        (1, 4, 1.0),
        (2, 4, 1.0),
        (3, 4, 1.0),
        (0, 4, 2.0 + epsilon),
    ]


def lb_instance(epsilon: float) -> Instance:
    return build_instance(build_graph(5, lb_edges(epsilon)), [0, 1, 2, 3])


def tight_sa_edges(m: int, epsilon: float) -> List[Edge]:
    """Complete graph on m+1 nodes that defeats selective aggregation."""
    edges: List[Edge] = []
    for i in range(m):
        for j in range(i + 1, m):
            edges.append((i, j, 2.0))
    edges.append((0, m, 2.0 + epsilon))
    for i in range(1, m):
        edges.append((i, m, 1.0))
    return edges


def tight_sa_instance(m: int, epsilon: float) -> Instance:
    return build_instance(build_graph(m + 1, tight_sa_edges(m, epsilon)), list(range(m)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
