"""Exact and truncated-Dijkstra solvers for the 1-median problem.

The exact baseline runs a full Dijkstra from every customer. The truncated
solvers stop each customer's run as soon as all customers are settled, then
pick a facility from the nodes those runs reached:

- ``sa``  (selective aggregation): only nodes settled from *every* customer
  (the set V'), evaluated exactly from the truncated labels.
- ``nna`` (nearest-neighbor approximation): nodes settled from at least one
  customer (the set V''); a customer whose run missed a candidate is routed
  through the candidate's nearest settled customer.
- ``spa`` (shortest-path approximation): like ``nna`` but minimizing over
  every customer as the intermediate.
- ``exact_truncated``: provably exact; restricts candidates to nodes settled
  from at least two customers (equal weights) or at least one (otherwise),
  then finishes their evaluation with a second round of truncated runs.

All argmin ties break toward the smallest node id.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ._kernels import bellman_ford_csr
from .dijkstra import dijkstra_full, dijkstra_truncated
from .errors import NodeIdOutOfRangeError, SizeGuardError
from .instance import Instance

__all__ = [
    "CandidateEvaluation",
    "SolveResult",
    "TdaEvaluations",
    "ALGORITHMS",
    "brute_force_oracle",
    "candidate_evaluations",
    "evaluate_node",
    "oracle_cap",
    "solve",
    "solve_exact",
    "solve_exact_truncated",
    "solve_tda_nna",
    "solve_tda_sa",
    "solve_tda_spa",
]

DEFAULT_ORACLE_CAP = 2000
_BLOCK_FLOATS = 2_000_000  # aggregation works on blocks of ~2M candidate entries


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solver run.

    ``estimated_value`` is the algorithm's internal minimum (e.g. min z_nna);
    ``exact_value`` is the true objective of the chosen facility. They are
    equal for the exact solvers and for ``sa``.
    """

    algorithm: str
    facility: int
    estimated_value: float
    exact_value: float
    candidate_count: int
    settled_total: int
    wall_ms: float


@dataclass(frozen=True)
class CandidateEvaluation:
    node: int
    value: float
    kind: str  # exact | sa | nna | spa


def oracle_cap(default: int = DEFAULT_ORACLE_CAP) -> int:
    """Size guard for the brute-force oracle; ONEMEDIAN_ORACLE_CAP overrides."""
    raw = os.environ.get("ONEMEDIAN_ORACLE_CAP")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SizeGuardError(f"ONEMEDIAN_ORACLE_CAP must be an integer, got {raw!r}") from None


def _ordered_weighted_sum(weights: np.ndarray, values: np.ndarray) -> float:
    """Sum w[j] * values[j] strictly left to right (index order).

    Keeps scalar evaluations bitwise-consistent with the solvers' accumulator
    updates, which add one weighted term per customer in the same order.
    """
    total = 0.0
    for j in range(weights.shape[0]):
        total += weights[j] * values[j]
    return total


def evaluate_node(instance: Instance, node: int) -> float:
    """True objective z(node): one truncated Dijkstra from ``node`` with the
    customers as targets."""
    if not 0 <= node < instance.n:
        raise NodeIdOutOfRangeError(f"node {node} outside [0, {instance.n})")
    value, _ = _evaluate_with_count(instance, node)
    return value


def _evaluate_with_count(instance: Instance, node: int) -> Tuple[float, int]:
    """z(node) plus how many nodes the evaluating Dijkstra run settled."""
    det = dijkstra_truncated(instance.graph, node, instance.customers)
    order = np.argsort(det.nodes, kind="stable")
    ids = det.nodes[order]
    dists = det.distances[order]
    idx = np.searchsorted(ids, instance.customers)
    return _ordered_weighted_sum(instance.weights, dists[idx]), det.settled_count


def solve_exact(instance: Instance) -> SolveResult:
    """Baseline: full Dijkstra from every customer, n-sized accumulator."""
    t0 = time.perf_counter()
    g = instance.graph
    acc = np.zeros(g.node_count, np.float64)
    for j in range(instance.m):
        dist = dijkstra_full(g, int(instance.customers[j]))
        acc += instance.weights[j] * dist
    facility = int(np.argmin(acc))
    value = float(acc[facility])
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return SolveResult(
        algorithm="exact",
        facility=facility,
        estimated_value=value,
        exact_value=value,
        candidate_count=g.node_count,
        settled_total=instance.m * g.node_count,
        wall_ms=wall_ms,
    )


def _truncated_runs(
    instance: Instance, targets: np.ndarray
) -> Tuple[List[Tuple[np.ndarray, np.ndarray]], int]:
    """One truncated Dijkstra per customer; each run returned as
    (settled ids ascending, aligned distances). Also the total settle count."""
    runs: List[Tuple[np.ndarray, np.ndarray]] = []
    settled_total = 0
    for j in range(instance.m):
        det = dijkstra_truncated(instance.graph, int(instance.customers[j]), targets)
        order = np.argsort(det.nodes, kind="stable")
        runs.append((det.nodes[order], det.distances[order]))
        settled_total += det.settled_count
    return runs, settled_total


def _settle_counts(runs: List[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    """Union of settled ids (ascending) and how many runs settled each."""
    all_ids = np.concatenate([ids for ids, _ in runs])
    return np.unique(all_ids, return_counts=True)


def _gather(run: Tuple[np.ndarray, np.ndarray], ids: np.ndarray) -> np.ndarray:
    """Distances of ``ids`` in one run; every id must be settled there."""
    sid, sdist = run
    return sdist[np.searchsorted(sid, ids)]


def _gather_or_inf(run: Tuple[np.ndarray, np.ndarray], ids: np.ndarray) -> np.ndarray:
    """Distances of ``ids`` in one run, infinity where unsettled."""
    sid, sdist = run
    pos = np.searchsorted(sid, ids)
    pos_clipped = np.minimum(pos, sid.shape[0] - 1)
    hit = sid[pos_clipped] == ids
    out = np.full(ids.shape[0], np.inf)
    out[hit] = sdist[pos_clipped[hit]]
    return out


def _inter_customer(runs, customers: np.ndarray) -> np.ndarray:
    """Matrix C with C[j, k] = run j's settled distance to customer k."""
    m = customers.shape[0]
    C = np.empty((m, m), np.float64)
    for j in range(m):
        C[j] = _gather(runs[j], customers)
    return C


def _exact_over(runs, weights: np.ndarray, ids: np.ndarray) -> np.ndarray:
    """Objective values over ``ids`` from runs that settled all of them.

    Accumulates one weighted run at a time in customer order, mirroring
    solve_exact's accumulator exactly (bitwise).
    """
    acc = np.zeros(ids.shape[0], np.float64)
    for j in range(weights.shape[0]):
        acc += weights[j] * _gather(runs[j], ids)
    return acc


def solve_tda_sa(instance: Instance) -> SolveResult:
    """Selective aggregation: evaluate only nodes settled from every customer."""
    t0 = time.perf_counter()
    runs, settled_total = _truncated_runs(instance, instance.customers)
    union_ids, counts = _settle_counts(runs)
    vp = union_ids[counts == instance.m]
    values = _exact_over(runs, instance.weights, vp)
    k = int(np.argmin(values))
    facility = int(vp[k])
    value = float(values[k])
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return SolveResult(
        algorithm="sa",
        facility=facility,
        estimated_value=value,
        exact_value=value,
        candidate_count=int(vp.shape[0]),
        settled_total=settled_total,
        wall_ms=wall_ms,
    )


def _scan_blocks(
    runs,
    weights: np.ndarray,
    C: np.ndarray,
    vpp: np.ndarray,
    mode: str,
    collect: bool = False,
):
    """Evaluate z_nna or z_spa over all of V'' in bounded-memory blocks.

    Returns (facility, value) of the minimum — ties to the smallest node id
    because vpp is ascending — and the full value array when ``collect``.
    """
    m = weights.shape[0]
    block = max(1, _BLOCK_FLOATS // m)
    best_val = np.inf
    best_node = -1
    collected = np.empty(vpp.shape[0], np.float64) if collect else None
    for start in range(0, vpp.shape[0], block):
        ids = vpp[start : start + block]
        A = np.empty((m, ids.shape[0]), np.float64)
        for j in range(m):
            A[j] = _gather_or_inf(runs[j], ids)
        if mode == "nna":
            jp = np.argmin(A, axis=0)  # ties -> smallest customer index
            base = A[jp, np.arange(ids.shape[0])]
            acc = np.zeros(ids.shape[0], np.float64)
            for j in range(m):
                detour = C[j, jp] + base
                acc += weights[j] * np.minimum(detour, A[j])
        else:  # spa
            acc = np.zeros(ids.shape[0], np.float64)
            for j in range(m):
                via = np.min(C[j][:, None] + A, axis=0)
                acc += weights[j] * np.minimum(via, A[j])
        if collect:
            collected[start : start + block] = acc
        k = int(np.argmin(acc))
        if acc[k] < best_val:  # strict: earlier blocks hold smaller ids
            best_val = float(acc[k])
            best_node = int(ids[k])
    return best_node, best_val, collected


def _solve_tda_estimate(instance: Instance, mode: str) -> SolveResult:
    t0 = time.perf_counter()
    runs, settled_total = _truncated_runs(instance, instance.customers)
    vpp, _ = _settle_counts(runs)
    C = _inter_customer(runs, instance.customers)
    facility, estimated, _ = _scan_blocks(runs, instance.weights, C, vpp, mode)
    exact, eval_settled = _evaluate_with_count(instance, facility)
    settled_total += eval_settled
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return SolveResult(
        algorithm=mode,
        facility=facility,
        estimated_value=estimated,
        exact_value=exact,
        candidate_count=int(vpp.shape[0]),
        settled_total=settled_total,
        wall_ms=wall_ms,
    )


def solve_tda_nna(instance: Instance) -> SolveResult:
    """Nearest-neighbor approximation over nodes settled from >= 1 customer."""
    return _solve_tda_estimate(instance, "nna")


def solve_tda_spa(instance: Instance) -> SolveResult:
    """Shortest-path approximation: best detour over every intermediate."""
    return _solve_tda_estimate(instance, "spa")


def solve_exact_truncated(instance: Instance) -> SolveResult:
    """Exact solver on the truncated candidate set.

    With equal weights the optimum is settled from at least two customers;
    otherwise from at least one. A second round of truncated runs (targets =
    customers plus candidates) completes the evaluation of every candidate.
    """
    t0 = time.perf_counter()
    if instance.m == 1:
        facility = int(instance.customers[0])
        wall_ms = (time.perf_counter() - t0) * 1000.0
        return SolveResult(
            algorithm="exact_truncated",
            facility=facility,
            estimated_value=0.0,
            exact_value=0.0,
            candidate_count=1,
            settled_total=1,
            wall_ms=wall_ms,
        )
    runs, settled_first = _truncated_runs(instance, instance.customers)
    union_ids, counts = _settle_counts(runs)
    equal_weights = bool(np.all(instance.weights == instance.weights[0]))
    candidates = union_ids[counts >= 2] if equal_weights else union_ids
    targets = np.union1d(instance.customers, candidates)
    runs2, settled_second = _truncated_runs(instance, targets)
    values = _exact_over(runs2, instance.weights, candidates)
    k = int(np.argmin(values))
    facility = int(candidates[k])
    value = float(values[k])
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return SolveResult(
        algorithm="exact_truncated",
        facility=facility,
        estimated_value=value,
        exact_value=value,
        candidate_count=int(candidates.shape[0]),
        settled_total=settled_first + settled_second,
        wall_ms=wall_ms,
    )


def brute_force_oracle(instance: Instance, cap: int | None = None) -> Tuple[int, float]:
    """Independent optimum: Bellman-Ford relaxation from every customer.

    Shares no code with the Dijkstra engine. Guarded by ``cap`` (default
    from ONEMEDIAN_ORACLE_CAP or 2000) because it is O(m * n * |E|).
    """
    limit = oracle_cap() if cap is None else cap
    if instance.n > limit:
        raise SizeGuardError(
            f"oracle capped at n <= {limit}, instance has n = {instance.n}"
        )
    g = instance.graph
    acc = np.zeros(g.node_count, np.float64)
    for j in range(instance.m):
        dist = bellman_ford_csr(g.offsets, g.neighbors, g.costs, int(instance.customers[j]))
        acc += instance.weights[j] * dist
    facility = int(np.argmin(acc))
    return facility, float(acc[facility])


@dataclass(frozen=True, eq=False)
class TdaEvaluations:
    """Per-candidate values from one set of truncated runs (for audits).

    ``vp`` lists nodes settled from every customer; ``vpp`` nodes settled
    from at least one. Value arrays align with ``vpp`` except ``z_sa``,
    which aligns with ``vp``. ``z_true`` holds the exact objective over
    ``vpp`` computed from full Dijkstra runs.
    """

    vp: np.ndarray
    vpp: np.ndarray
    z_sa: np.ndarray
    z_nna: np.ndarray
    z_spa: np.ndarray
    z_true: np.ndarray

    def as_evaluations(self, kind: str) -> List[CandidateEvaluation]:
        nodes, values = {
            "sa": (self.vp, self.z_sa),
            "nna": (self.vpp, self.z_nna),
            "spa": (self.vpp, self.z_spa),
            "exact": (self.vpp, self.z_true),
        }[kind]
        return [
            CandidateEvaluation(node=int(v), value=float(z), kind=kind)
            for v, z in zip(nodes, values)
        ]


def candidate_evaluations(instance: Instance) -> TdaEvaluations:
    """Evaluate every truncated-run candidate under all four value notions.

    Intended for verification and tests on small instances: z_true requires
    one full Dijkstra per customer.
    """
    runs, _ = _truncated_runs(instance, instance.customers)
    vpp, counts = _settle_counts(runs)
    vp = vpp[counts == instance.m]
    C = _inter_customer(runs, instance.customers)
    z_sa = _exact_over(runs, instance.weights, vp)
    _, _, z_nna = _scan_blocks(runs, instance.weights, C, vpp, "nna", collect=True)
    _, _, z_spa = _scan_blocks(runs, instance.weights, C, vpp, "spa", collect=True)
    acc = np.zeros(instance.n, np.float64)
    for j in range(instance.m):
        dist = dijkstra_full(instance.graph, int(instance.customers[j]))
        acc += instance.weights[j] * dist
    z_true = acc[vpp]
    return TdaEvaluations(vp=vp, vpp=vpp, z_sa=z_sa, z_nna=z_nna, z_spa=z_spa, z_true=z_true)


ALGORITHMS = {
    "exact": solve_exact,
    "exact_truncated": solve_exact_truncated,
    "sa": solve_tda_sa,
    "nna": solve_tda_nna,
    "spa": solve_tda_spa,
}


def solve(instance: Instance, algorithm: str) -> SolveResult:
    """Dispatch by algorithm name (see ALGORITHMS)."""
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    return fn(instance)
