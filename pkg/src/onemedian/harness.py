"""Batch experiment runner: generate instance grids, solve, summarize.

A suite is a grid of (family, n, m) cells; each cell gets a fixed number of
replicate instances whose seeds derive deterministically from the base seed
and the cell/replicate indices, so any record can be regenerated in
isolation. Ratios compare each algorithm's true objective against the exact
reference (the exact solver when it runs, else the brute-force oracle).

With ``timing_repeats`` = 0 all wall-time fields are reported as 0.0, which
makes report files byte-identical across runs; timing is opt-in because it
is inherently machine-dependent.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import fmean, median
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, EmptyInputError, FeasibilityError
from .generators import FAMILIES
from .instance import Instance
from .solvers import ALGORITHMS, SolveResult, brute_force_oracle, oracle_cap

__all__ = [
    "ExperimentRecord",
    "SuiteConfig",
    "Summary",
    "SummaryRow",
    "CSV_HEADER",
    "derive_seed",
    "export_report",
    "load_config",
    "run_suite",
    "summarize",
]

RATIO_TOL = 1e-9
CSV_HEADER = "family,n,m,algorithm,trials,suboptimal,max_ratio,mean_ms,median_ms"

_HIST_LO = 1.0
_HIST_WIDTH = 0.01
_HIST_BINS = 100


@dataclass(frozen=True)
class SuiteConfig:
    """One benchmark suite: a (family, n, m) grid plus run options."""

    families: Tuple[str, ...]
    n_values: Tuple[int, ...]
    m_values: Tuple[int, ...]
    instances_per_cell: int
    base_seed: int
    algorithms: Tuple[str, ...] = ("exact", "exact_truncated", "sa", "nna", "spa")
    oracle: bool = False
    timing_repeats: int = 0
    oracle_cap: Optional[int] = None
    csv_out: Optional[str] = None
    json_out: Optional[str] = None

    def cells(self) -> List[Tuple[str, int, int]]:
        return [
            (f, n, m)
            for f in self.families
            for n in self.n_values
            for m in self.m_values
        ]


_CONFIG_KEYS = {
    "families",
    "n_values",
    "m_values",
    "instances_per_cell",
    "base_seed",
    "algorithms",
    "oracle",
    "timing_repeats",
    "oracle_cap",
    "csv_out",
    "json_out",
}


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def config_from_dict(doc: dict) -> SuiteConfig:
    """Validate a parsed config document; unknown keys or values are errors."""
    _require(isinstance(doc, dict), "config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    for key in ("families", "n_values", "m_values", "instances_per_cell", "base_seed"):
        _require(key in doc, f"config is missing required key {key!r}")

    families = doc["families"]
    _require(
        isinstance(families, list) and families, "families must be a non-empty list"
    )
    families = tuple(str(f).lower() for f in families)
    for f in families:
        _require(f in FAMILIES, f"unknown family {f!r}; known: {sorted(FAMILIES)}")

    def int_list(key: str) -> Tuple[int, ...]:
        vals = doc[key]
        _require(isinstance(vals, list) and vals, f"{key} must be a non-empty list")
        _require(
            all(isinstance(v, int) and v >= 1 for v in vals),
            f"{key} entries must be positive integers",
        )
        return tuple(vals)

    n_values = int_list("n_values")
    m_values = int_list("m_values")
    ipc = doc["instances_per_cell"]
    _require(isinstance(ipc, int) and ipc >= 1, "instances_per_cell must be >= 1")
    base_seed = doc["base_seed"]
    _require(isinstance(base_seed, int) and base_seed >= 0, "base_seed must be a non-negative integer")

    algorithms = doc.get("algorithms", ["exact", "exact_truncated", "sa", "nna", "spa"])
    _require(
        isinstance(algorithms, list) and algorithms, "algorithms must be a non-empty list"
    )
    algorithms = tuple(str(a).lower() for a in algorithms)
    for a in algorithms:
        _require(a in ALGORITHMS, f"unknown algorithm {a!r}; known: {sorted(ALGORITHMS)}")
    _require(len(set(algorithms)) == len(algorithms), "algorithms must be distinct")

    oracle = doc.get("oracle", False)
    _require(isinstance(oracle, bool), "oracle must be true or false")
    timing_repeats = doc.get("timing_repeats", 0)
    _require(
        isinstance(timing_repeats, int) and timing_repeats >= 0,
        "timing_repeats must be a non-negative integer",
    )
    cap = doc.get("oracle_cap")
    _require(cap is None or (isinstance(cap, int) and cap >= 1), "oracle_cap must be a positive integer")
    csv_out = doc.get("csv_out")
    json_out = doc.get("json_out")
    _require(csv_out is None or isinstance(csv_out, str), "csv_out must be a string path")
    _require(json_out is None or isinstance(json_out, str), "json_out must be a string path")

    return SuiteConfig(
        families=families,
        n_values=n_values,
        m_values=m_values,
        instances_per_cell=ipc,
        base_seed=base_seed,
        algorithms=algorithms,
        oracle=oracle,
        timing_repeats=timing_repeats,
        oracle_cap=cap,
        csv_out=csv_out,
        json_out=json_out,
    )


def load_config(path: str) -> SuiteConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(doc)


@dataclass(frozen=True)
class ExperimentRecord:
    """One instance solved by every configured algorithm."""

    family: str
    n: int
    m: int
    cell_index: int
    replicate: int
    seed: int
    results: Dict[str, SolveResult]
    reference: Optional[float]  # exact optimum used for ratios
    ratios: Dict[str, float]
    suboptimal: Dict[str, bool]


def derive_seed(base_seed: int, cell_index: int, replicate: int) -> int:
    """Deterministic, collision-resistant per-replicate generator seed."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(cell_index, replicate))
    return int(ss.generate_state(1, np.uint64)[0])


def _ratio(value: float, reference: Optional[float]) -> float:
    if reference is None:
        return float("nan")
    if reference == 0.0:
        return 1.0 if value == 0.0 else float("inf")
    return value / reference


def _run_one(
    config: SuiteConfig, family: str, n: int, m: int, cell_index: int, replicate: int
) -> ExperimentRecord:
    seed = derive_seed(config.base_seed, cell_index, replicate)
    try:
        instance: Instance = FAMILIES[family](n, m, seed)
    except FeasibilityError as exc:
        raise FeasibilityError(f"cell {family} n={n} m={m}: {exc}") from exc

    results: Dict[str, SolveResult] = {}
    for algo in config.algorithms:
        fn = ALGORITHMS[algo]
        result = fn(instance)
        if config.timing_repeats <= 0:
            result = replace(result, wall_ms=0.0)
        elif config.timing_repeats > 1:
            walls = [result.wall_ms]
            for _ in range(config.timing_repeats - 1):
                walls.append(fn(instance).wall_ms)
            result = replace(result, wall_ms=fmean(walls))
        results[algo] = result

    cap = config.oracle_cap if config.oracle_cap is not None else oracle_cap()
    oracle_value: Optional[float] = None
    if config.oracle and n <= cap:  # auto-off above the cap
        _, oracle_value = brute_force_oracle(instance, cap=cap)

    if "exact" in results:
        reference: Optional[float] = results["exact"].exact_value
    elif "exact_truncated" in results:
        reference = results["exact_truncated"].exact_value
    else:
        reference = oracle_value

    ratios = {a: _ratio(r.exact_value, reference) for a, r in results.items()}
    suboptimal = {a: bool(r > 1.0 + RATIO_TOL) for a, r in ratios.items()}
    return ExperimentRecord(
        family=family,
        n=n,
        m=m,
        cell_index=cell_index,
        replicate=replicate,
        seed=seed,
        results=results,
        reference=reference,
        ratios=ratios,
        suboptimal=suboptimal,
    )


def run_suite(
    config: SuiteConfig,
    progress: Optional[Callable[[str, int, int, int], None]] = None,
    threads: int = 1,
) -> List[ExperimentRecord]:
    """Run every cell of the grid; deterministic given the config.

    ``progress`` (if given) is called once per finished cell with
    (family, n, m, record count). ``threads`` > 1 parallelizes replicates
    within a cell; record order is unaffected.
    """
    records: List[ExperimentRecord] = []
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for cell_index, (family, n, m) in enumerate(config.cells()):
            reps = range(config.instances_per_cell)
            if executor is not None:
                cell_records = list(
                    executor.map(
                        lambda r: _run_one(config, family, n, m, cell_index, r), reps
                    )
                )
            else:
                cell_records = [
                    _run_one(config, family, n, m, cell_index, r) for r in reps
                ]
            records.extend(cell_records)
            if progress is not None:
                progress(family, n, m, len(cell_records))
    finally:
        if executor is not None:
            executor.shutdown()
    return records


@dataclass(frozen=True)
class SummaryRow:
    family: str
    n: int
    m: int
    algorithm: str
    trials: int
    suboptimal: int
    max_ratio: Optional[float]
    mean_ms: float
    median_ms: float


@dataclass(frozen=True)
class Summary:
    """Aggregated view of a record list.

    ``max_ratio_by_m`` tracks, per family and algorithm, the worst ratio as a
    function of m; ``histograms`` count finite ratios in 0.01-wide bins
    starting at 1.0 (the last bin absorbs everything >= 2.0).
    """

    rows: List[SummaryRow]
    max_ratio_by_m: Dict[str, Dict[str, List[List[float]]]]
    histograms: Dict[str, List[int]]

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "family": r.family,
                    "n": r.n,
                    "m": r.m,
                    "algorithm": r.algorithm,
                    "trials": r.trials,
                    "suboptimal": r.suboptimal,
                    "max_ratio": r.max_ratio,
                    "mean_ms": r.mean_ms,
                    "median_ms": r.median_ms,
                }
                for r in self.rows
            ],
            "max_ratio_by_m": self.max_ratio_by_m,
            "histograms": self.histograms,
            "histogram_bin_width": _HIST_WIDTH,
            "histogram_lo": _HIST_LO,
        }


def summarize(records: Sequence[ExperimentRecord]) -> Summary:
    """Aggregate per (family, n, m, algorithm), in first-appearance order."""
    if not records:
        raise EmptyInputError("cannot summarize an empty record list")
    groups: Dict[Tuple[str, int, int, str], List[Tuple[float, float, bool]]] = {}
    order: List[Tuple[str, int, int, str]] = []
    for rec in records:
        for algo in rec.results:
            key = (rec.family, rec.n, rec.m, algo)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(
                (rec.ratios[algo], rec.results[algo].wall_ms, rec.suboptimal[algo])
            )

    rows: List[SummaryRow] = []
    series: Dict[str, Dict[str, Dict[int, float]]] = {}
    histograms: Dict[str, List[int]] = {}
    for key in order:
        family, n, m, algo = key
        entries = groups[key]
        finite_ratios = [r for r, _, _ in entries if r == r and r != float("inf")]
        max_ratio = max(finite_ratios) if finite_ratios else None
        walls = [w for _, w, _ in entries]
        rows.append(
            SummaryRow(
                family=family,
                n=n,
                m=m,
                algorithm=algo,
                trials=len(entries),
                suboptimal=sum(1 for _, _, s in entries if s),
                max_ratio=max_ratio,
                mean_ms=fmean(walls),
                median_ms=median(walls),
            )
        )
        if max_ratio is not None:
            by_algo = series.setdefault(family, {}).setdefault(algo, {})
            by_algo[m] = max(by_algo.get(m, max_ratio), max_ratio)
        hist = histograms.setdefault(algo, [0] * _HIST_BINS)
        for r in finite_ratios:
            idx = int((r - _HIST_LO) / _HIST_WIDTH)
            hist[min(max(idx, 0), _HIST_BINS - 1)] += 1

    max_ratio_by_m = {
        family: {
            algo: [[float(m), by_algo[m]] for m in sorted(by_algo)]
            for algo, by_algo in algos.items()
        }
        for family, algos in series.items()
    }
    return Summary(rows=rows, max_ratio_by_m=max_ratio_by_m, histograms=histograms)


def _fmt_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    return "%.17g" % value


def export_report(summary: Summary, path: str, fmt: str = "csv") -> None:
    """Write the summary to ``path`` as CSV (rows only) or JSON (full).

    Output bytes are a pure function of the summary contents.
    """
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in summary.rows:
            lines.append(
                ",".join(
                    [
                        r.family,
                        str(r.n),
                        str(r.m),
                        r.algorithm,
                        str(r.trials),
                        str(r.suboptimal),
                        _fmt_float(r.max_ratio),
                        _fmt_float(r.mean_ms),
                        _fmt_float(r.median_ms),
                    ]
                )
            )
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        raise ConfigError(f"unknown report format {fmt!r} (use 'csv' or 'json')")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(payload)
