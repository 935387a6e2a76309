"""Numba kernels: binary-heap Dijkstra over CSR arrays, BFS reach, Bellman-Ford.

All kernels take the Graph's raw arrays (offsets: int64[n+1], neighbors:
int32[arcs], costs: float64[arcs]). They are compiled once per process and
cached on disk.
"""

import numpy as np
from numba import njit

_HEAP_INIT = 2048


@njit(cache=True, nogil=True)
def dijkstra_csr(offsets, neighbors, costs, source, target_mask, n_targets, max_settle):
    """Binary-heap Dijkstra with lazy deletion and ascending-id tie-breaks.

    Settles nodes in (distance, node id) order. Stops as soon as `n_targets`
    nodes flagged in `target_mask` have been settled (if n_targets > 0), or
    after `max_settle` settlements, whichever comes first.

    Returns (order, order_dist, dist, remaining): the settlement sequence,
    its distances, the dense tentative-distance array (final only for settled
    entries), and how many targets were never settled.
    """
    n = offsets.shape[0] - 1
    dist = np.full(n, np.inf)
    done = np.zeros(n, np.uint8)
    limit = max_settle if max_settle < n else n
    order = np.empty(limit, np.int64)
    order_dist = np.empty(limit, np.float64)

    cap = _HEAP_INIT
    heap_d = np.empty(cap, np.float64)
    heap_v = np.empty(cap, np.int64)
    heap_d[0] = 0.0
    heap_v[0] = source
    size = 1
    dist[source] = 0.0

    n_settled = 0
    remaining = n_targets

    while size > 0 and n_settled < limit:
        # pop the (distance, id)-smallest entry
        d = heap_d[0]
        v = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:
            left = 2 * i + 1
            right = left + 1
            smallest = i
            if left < size and (
                heap_d[left] < heap_d[smallest]
                or (heap_d[left] == heap_d[smallest] and heap_v[left] < heap_v[smallest])
            ):
                smallest = left
            if right < size and (
                heap_d[right] < heap_d[smallest]
                or (heap_d[right] == heap_d[smallest] and heap_v[right] < heap_v[smallest])
            ):
                smallest = right
            if smallest == i:
                break
            heap_d[i], heap_d[smallest] = heap_d[smallest], heap_d[i]
            heap_v[i], heap_v[smallest] = heap_v[smallest], heap_v[i]
            i = smallest

        if done[v]:
            continue  # stale heap entry
        done[v] = 1
        order[n_settled] = v
        order_dist[n_settled] = d
        n_settled += 1

        if n_targets > 0 and target_mask[v]:
            remaining -= 1
            if remaining == 0:
                break

        for k in range(offsets[v], offsets[v + 1]):
            u = neighbors[k]
            nd = d + costs[k]
            if nd < dist[u]:
                dist[u] = nd
                if size >= cap:
                    new_cap = cap * 2
                    nd_arr = np.empty(new_cap, np.float64)
                    nv_arr = np.empty(new_cap, np.int64)
                    nd_arr[:size] = heap_d[:size]
                    nv_arr[:size] = heap_v[:size]
                    heap_d = nd_arr
                    heap_v = nv_arr
                    cap = new_cap
                # sift up
                i = size
                heap_d[i] = nd
                heap_v[i] = u
                size += 1
                while i > 0:
                    parent = (i - 1) // 2
                    if heap_d[i] < heap_d[parent] or (
                        heap_d[i] == heap_d[parent] and heap_v[i] < heap_v[parent]
                    ):
                        heap_d[i], heap_d[parent] = heap_d[parent], heap_d[i]
                        heap_v[i], heap_v[parent] = heap_v[parent], heap_v[i]
                        i = parent
                    else:
                        break

    return order[:n_settled].copy(), order_dist[:n_settled].copy(), dist, remaining


@njit(cache=True, nogil=True)
def bfs_reach_count(offsets, neighbors):
    """Number of nodes reachable from node 0 (connectivity check)."""
    n = offsets.shape[0] - 1
    seen = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int64)
    seen[0] = 1
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(offsets[u], offsets[u + 1]):
            v = neighbors[k]
            if seen[v] == 0:
                seen[v] = 1
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True, nogil=True)
def bellman_ford_csr(offsets, neighbors, costs, source):
    """Single-source shortest paths by relaxation sweeps with early exit.

    Deliberately independent of the Dijkstra kernel; used as the oracle's
    engine only.
    """
    n = offsets.shape[0] - 1
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    for _ in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            if du < np.inf:
                for k in range(offsets[u], offsets[u + 1]):
                    v = neighbors[k]
                    nd = du + costs[k]
                    if nd < dist[v]:
                        dist[v] = nd
                        changed = True
        if not changed:
            break
    return dist
