"""Random instance families, adversarial constructions, and the
weighted-to-unweighted expansion.

Families:

- ``rru`` / ``rrw``: random connected graph whose edge count is uniform in
  [n-1, n(n-1)/2]; customers uniform over all nodes; unit (rru) or
  uniform-[0,1) (rrw) weights.
- ``rnu`` / ``rdu``: random graph with exactly 4n edges; customers drawn
  from the max{2m, floor(log2 n)} nodes nearest a random source, nearest by
  BFS level (rnu) or by Dijkstra distance (rdu).
- ``gnu`` / ``gdu``: near-square grid with uniform-[0,1) costs; customer
  pools as in rnu/rdu.

All randomness comes from one 64-bit seed split into independent
sub-streams (topology, costs, source, customers, weights), so the tuple
(family, n, m, seed) fully determines the instance bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, isqrt
from typing import Callable, Dict, Tuple

import numpy as np

from .dijkstra import settle_prefix
from .errors import CapExceededError, FeasibilityError, NonIntegerWeightError
from .graph import Graph, _assemble
from .instance import Instance, build_instance

__all__ = [
    "FAMILIES",
    "GenSpec",
    "RRU_N_CAP",
    "EXPANSION_CAP",
    "expand_weighted",
    "gen_gdu",
    "gen_gnu",
    "gen_lb_instance",
    "gen_rdu",
    "gen_rnu",
    "gen_rru",
    "gen_rrw",
    "gen_tight_sa",
]

RRU_N_CAP = 5000  # rru/rrw can be nearly complete: n(n-1)/2 edges
EXPANSION_CAP = 200_000  # bound on the expanded customer count

# sub-stream indices; never reorder (instance bytes depend on them)
_TOPOLOGY, _COSTS, _SOURCE, _CUSTOMERS, _WEIGHTS = range(5)


def _rng(seed: int, stream: int) -> np.random.Generator:
    if seed < 0:
        raise FeasibilityError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _check_nm(n: int, m: int) -> None:
    if n < 1:
        raise FeasibilityError(f"n must be positive, got {n}")
    if not 1 <= m <= n:
        raise FeasibilityError(f"need 1 <= m <= n, got m={m}, n={n}")


def _pair_keys(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    return lo.astype(np.int64) * n + hi


def _random_tree(rng: np.random.Generator, n: int, relabel: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform-attachment spanning tree: node i joins a random earlier node.

    With ``relabel`` the attachment runs over randomly permuted labels so no
    node id is structurally special.
    """
    if n < 2:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    labels = rng.permutation(n).astype(np.int64) if relabel else np.arange(n, dtype=np.int64)
    attach = rng.integers(0, np.arange(1, n))
    return labels[1:], labels[attach]


def _sample_extra_keys(
    rng: np.random.Generator, n: int, existing: np.ndarray, count: int
) -> np.ndarray:
    """``count`` distinct unordered-pair keys not in ``existing``, in
    acceptance order (deterministic for a given generator state)."""
    taken = np.empty(0, np.int64)
    chunks = []
    needed = count
    while needed > 0:
        batch = max(1024, 2 * needed)
        u = rng.integers(0, n, batch)
        v = rng.integers(0, n, batch)
        ok = u != v
        keys = _pair_keys(u[ok], v[ok], n)
        # first occurrence of each key, in draw order
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
        fresh = keys[~np.isin(keys, existing) & ~np.isin(keys, taken)]
        fresh = fresh[:needed]
        chunks.append(fresh)
        taken = np.concatenate([taken, fresh])
        needed -= fresh.shape[0]
    return np.concatenate(chunks) if chunks else np.empty(0, np.int64)


def _random_edges(
    rng: np.random.Generator, n: int, m_edges: int, relabel: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """Connected random topology: spanning tree plus extra distinct edges."""
    tree_u, tree_v = _random_tree(rng, n, relabel)
    tree_keys = np.sort(_pair_keys(tree_u, tree_v, n))
    extra = m_edges - (n - 1)
    total_pairs = n * (n - 1) // 2
    if extra == 0:
        extra_keys = np.empty(0, np.int64)
    elif m_edges > total_pairs // 2:
        # dense: pick the pairs to LEAVE OUT instead (rejection stays cheap)
        excluded = _sample_extra_keys(rng, n, tree_keys, total_pairs - m_edges)
        lo, hi = np.triu_indices(n, k=1)
        all_keys = lo.astype(np.int64) * n + hi
        extra_keys = np.setdiff1d(all_keys, np.concatenate([tree_keys, excluded]))
    else:
        extra_keys = _sample_extra_keys(rng, n, tree_keys, extra)
    u = np.concatenate([tree_u, extra_keys // n])
    v = np.concatenate([tree_v, extra_keys % n])
    return u, v


def _finish(
    seed: int,
    u: np.ndarray,
    v: np.ndarray,
    n: int,
    m: int,
    pool: np.ndarray | None,
    unit_weights: bool,
) -> Instance:
    """Draw costs, customers, and weights, then assemble the Instance."""
    costs = _rng(seed, _COSTS).random(u.shape[0])
    graph = _assemble(n, u.astype(np.int64), v.astype(np.int64), costs)
    rng_cust = _rng(seed, _CUSTOMERS)
    source_pool = pool if pool is not None else np.arange(n, dtype=np.int64)
    customers = np.sort(rng_cust.choice(source_pool, size=m, replace=False))
    if unit_weights:
        weights = np.ones(m, np.float64)
    else:
        rng_w = _rng(seed, _WEIGHTS)
        weights = rng_w.random(m)
        while not np.any(weights > 0.0):  # measure-zero guard
            weights = rng_w.random(m)
    return build_instance(graph, customers, weights)


def _gen_rr(n: int, m: int, seed: int, unit_weights: bool, cap: int) -> Instance:
    _check_nm(n, m)
    if n > cap:
        raise CapExceededError(f"rru/rrw capped at n <= {cap}, got n = {n}")
    rng_top = _rng(seed, _TOPOLOGY)
    total_pairs = n * (n - 1) // 2
    m_edges = int(rng_top.integers(max(n - 1, 0), total_pairs, endpoint=True))
    u, v = _random_edges(rng_top, n, m_edges, relabel=True)
    return _finish(seed, u, v, n, m, None, unit_weights)


def gen_rru(n: int, m: int, seed: int, cap: int = RRU_N_CAP) -> Instance:
    """Random connected graph, uniform edge count, unit weights."""
    return _gen_rr(n, m, seed, unit_weights=True, cap=cap)


def gen_rrw(n: int, m: int, seed: int, cap: int = RRU_N_CAP) -> Instance:
    """As gen_rru but customer weights drawn uniformly from [0, 1)."""
    return _gen_rr(n, m, seed, unit_weights=False, cap=cap)


def _pool_size(n: int, m: int) -> int:
    return max(2 * m, n.bit_length() - 1)


def _check_pool(n: int, m: int) -> int:
    _check_nm(n, m)
    size = _pool_size(n, m)
    if size > n - 1:
        raise FeasibilityError(
            f"customer pool max(2m, floor(log2 n)) = {size} exceeds n - 1 = {n - 1}"
        )
    return size


def _bfs_pool(graph: Graph, source: int, k: int) -> np.ndarray:
    """First k non-source nodes in BFS order from ``source``; ties within a
    level break by ascending node id."""
    n = graph.node_count
    seen = np.zeros(n, bool)
    seen[source] = True
    frontier = np.array([source], np.int64)
    levels = []
    collected = 0
    while frontier.size and collected < k:
        segs = [
            graph.neighbors[graph.offsets[u] : graph.offsets[u + 1]]
            for u in frontier
        ]
        nxt = np.unique(np.concatenate(segs).astype(np.int64)) if segs else np.empty(0, np.int64)
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        levels.append(nxt)
        collected += nxt.shape[0]
        frontier = nxt
    if collected < k:
        raise FeasibilityError(f"graph too small or disconnected for pool of {k}")
    return np.concatenate(levels)[:k]


def _dijkstra_pool(graph: Graph, source: int, k: int) -> np.ndarray:
    """First k non-source nodes in Dijkstra settlement order from ``source``."""
    det = settle_prefix(graph, source, k + 1)
    if det.settled_count < k + 1:
        raise FeasibilityError(f"graph too small or disconnected for pool of {k}")
    return det.nodes[1 : k + 1]


def _gen_rn(n: int, m: int, seed: int, dijkstra_pool: bool) -> Instance:
    pool_size = _check_pool(n, m)
    m_edges = 4 * n
    if m_edges > n * (n - 1) // 2:
        raise FeasibilityError(f"|E| = 4n = {m_edges} exceeds the {n * (n - 1) // 2} possible edges")
    rng_top = _rng(seed, _TOPOLOGY)
    u, v = _random_edges(rng_top, n, m_edges, relabel=False)
    costs = _rng(seed, _COSTS).random(u.shape[0])
    graph = _assemble(n, u, v, costs)
    source = int(_rng(seed, _SOURCE).integers(0, n))
    pool = (_dijkstra_pool if dijkstra_pool else _bfs_pool)(graph, source, pool_size)
    customers = np.sort(_rng(seed, _CUSTOMERS).choice(pool, size=m, replace=False))
    return build_instance(graph, customers, np.ones(m, np.float64))


def gen_rnu(n: int, m: int, seed: int) -> Instance:
    """Random 4n-edge graph; customers from the BFS-nearest pool."""
    return _gen_rn(n, m, seed, dijkstra_pool=False)


def gen_rdu(n: int, m: int, seed: int) -> Instance:
    """Random 4n-edge graph; customers from the Dijkstra-nearest pool."""
    return _gen_rn(n, m, seed, dijkstra_pool=True)


def _grid_edges(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """4-neighbor edges of the near-square grid holding nodes 0..n-1
    row-major: rows = floor(sqrt(n)), cols = ceil(n / rows); the last row
    may be partial."""
    rows = isqrt(n)
    cols = ceil(n / rows)
    ids = np.arange(n, dtype=np.int64)
    col = ids % cols
    right = ids[(col < cols - 1) & (ids + 1 < n)]
    down = ids[ids + cols < n]
    u = np.concatenate([right, down])
    v = np.concatenate([right + 1, down + cols])
    return u, v


def _gen_g(n: int, m: int, seed: int, dijkstra_pool: bool) -> Instance:
    if n < 2:
        raise FeasibilityError(f"grid families need n >= 2, got {n}")
    pool_size = _check_pool(n, m)
    u, v = _grid_edges(n)
    costs = _rng(seed, _COSTS).random(u.shape[0])
    graph = _assemble(n, u, v, costs)
    source = int(_rng(seed, _SOURCE).integers(0, n))
    pool = (_dijkstra_pool if dijkstra_pool else _bfs_pool)(graph, source, pool_size)
    customers = np.sort(_rng(seed, _CUSTOMERS).choice(pool, size=m, replace=False))
    return build_instance(graph, customers, np.ones(m, np.float64))


def gen_gnu(n: int, m: int, seed: int) -> Instance:
    """Near-square grid, uniform costs; customers from the BFS pool."""
    return _gen_g(n, m, seed, dijkstra_pool=False)


def gen_gdu(n: int, m: int, seed: int) -> Instance:
    """Near-square grid, uniform costs; customers from the Dijkstra pool."""
    return _gen_g(n, m, seed, dijkstra_pool=True)


def gen_tight_sa(m: int, epsilon: float) -> Instance:
    """Worst case for selective aggregation: a complete graph on m+1 nodes
    where the non-customer node m is the optimum but is never settled from
    every customer. sa returns 2(m-1) against an optimum of m+1+epsilon."""
    if m < 4:
        raise FeasibilityError(f"tight-sa construction needs m >= 4, got {m}")
    if not epsilon > 0:
        raise FeasibilityError(f"epsilon must be positive, got {epsilon}")
    edges = []
    for i in range(m):
        for j in range(i + 1, m):
            edges.append((i, j, 2.0))
    edges.append((0, m, 2.0 + epsilon))
    for i in range(1, m):
        edges.append((i, m, 1.0))
    graph = _assemble(
        m + 1,
        np.array([e[0] for e in edges], np.int64),
        np.array([e[1] for e in edges], np.int64),
        np.array([e[2] for e in edges], np.float64),
    )
    return build_instance(graph, np.arange(m), np.ones(m, np.float64))


def gen_lb_instance(epsilon: float) -> Instance:
    """5-node instance where nna/spa stay a factor 6/(5+epsilon) above the
    optimum: customers 1..3 reach node 4 cheaply, customer 0 only nearly."""
    if not 0 < epsilon < 1:
        raise FeasibilityError(f"need 0 < epsilon < 1, got {epsilon}")
    edges = [
        (0, 1, 2.0),
        (0, 2, 2.0),
        (0, 3, 2.0),
        (1, 4, 1.0),
        (2, 4, 1.0),
        (3, 4, 1.0),
        (0, 4, 2.0 + epsilon),
    ]
    graph = _assemble(
        5,
        np.array([e[0] for e in edges], np.int64),
        np.array([e[1] for e in edges], np.int64),
        np.array([e[2] for e in edges], np.float64),
    )
    return build_instance(graph, np.arange(4), np.ones(4, np.float64))


def expand_weighted(
    instance: Instance, cap: int = EXPANSION_CAP
) -> Tuple[Instance, np.ndarray]:
    """Rewrite integer customer weights as unit-weight customer groups.

    Customer j of weight w becomes a zero-cost clique of w unit customers
    (node j plus w-1 clones wired to j's original neighbors at original
    costs). Returns the unweighted instance and an array mapping each new
    node id to the original node it represents. The optimal objective value
    is unchanged.
    """
    w = instance.weights
    if not np.all(w > 0) or not np.all(w == np.floor(w)):
        raise NonIntegerWeightError("expansion requires all weights to be positive integers")
    total = int(w.sum())
    if total > cap:
        raise CapExceededError(f"expanded customer count {total} exceeds cap {cap}")
    g = instance.graph
    n = g.node_count
    rep = list(range(n))
    new_u = [g.edge_u]
    new_v = [g.edge_v]
    new_c = [g.edge_cost]
    new_customers = []
    next_id = n
    for j in range(instance.m):
        cust = int(instance.customers[j])
        copies = [cust]
        for _ in range(int(w[j]) - 1):
            copies.append(next_id)
            rep.append(cust)
            next_id += 1
        new_customers.extend(copies)
        lo, hi = g.offsets[cust], g.offsets[cust + 1]
        nbrs = g.neighbors[lo:hi].astype(np.int64)
        nbr_costs = g.costs[lo:hi]
        for clone in copies[1:]:
            new_u.append(np.full(nbrs.shape[0], clone, np.int64))
            new_v.append(nbrs)
            new_c.append(nbr_costs)
        for a in range(len(copies)):
            for b in range(a + 1, len(copies)):
                new_u.append(np.array([copies[a]], np.int64))
                new_v.append(np.array([copies[b]], np.int64))
                new_c.append(np.zeros(1, np.float64))
    graph = _assemble(
        next_id,
        np.concatenate(new_u),
        np.concatenate(new_v),
        np.concatenate(new_c),
    )
    expanded = build_instance(graph, np.array(new_customers, np.int64), np.ones(total, np.float64))
    return expanded, np.array(rep, np.int64)


FAMILIES: Dict[str, Callable[[int, int, int], Instance]] = {
    "rru": gen_rru,
    "rrw": gen_rrw,
    "rnu": gen_rnu,
    "rdu": gen_rdu,
    "gnu": gen_gnu,
    "gdu": gen_gdu,
}


@dataclass(frozen=True)
class GenSpec:
    """A reproducible pointer to one random instance."""

    family: str
    n: int
    m: int
    seed: int

    def generate(self) -> Instance:
        try:
            fn = FAMILIES[self.family]
        except KeyError:
            raise FeasibilityError(f"unknown family {self.family!r}") from None
        return fn(self.n, self.m, self.seed)
