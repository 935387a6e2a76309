"""Command-line interface: generate, solve, verify, bench.

Exit codes: 0 success, 1 domain error (bad instance, infeasible spec, I/O),
2 usage error (bad flags or config). All randomness flows through --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError, OneMedianError
from .generators import FAMILIES, gen_lb_instance, gen_tight_sa
from .harness import export_report, load_config, run_suite, summarize
from .instance import Instance, read_instance, write_instance
from .solvers import (
    ALGORITHMS,
    brute_force_oracle,
    candidate_evaluations,
    solve,
)

GOLDEN_RATIO_BOUND = (1.0 + math.sqrt(5.0)) / 2.0
REL_TOL = 1e-9

_CLI_FAMILIES = sorted(FAMILIES) + ["tight-sa", "lb"]
_CLI_ALGOS = ["exact", "exact-truncated", "sa", "nna", "spa"]


def _close(a: float, b: float, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _instance_from_args(parser: argparse.ArgumentParser, args) -> Tuple[Instance, str, int]:
    """Build an instance from --family flags; returns (instance, family, seed)."""
    family = args.family
    if family == "lb":
        return gen_lb_instance(args.epsilon), family, args.seed
    if family == "tight-sa":
        if args.m is None:
            parser.error("--m is required for --family tight-sa")
        return gen_tight_sa(args.m, args.epsilon), family, args.seed
    if args.n is None or args.m is None:
        parser.error(f"--n and --m are required for --family {family}")
    return FAMILIES[family](args.n, args.m, args.seed), family, args.seed


def _cmd_generate(parser: argparse.ArgumentParser, args) -> int:
    instance, family, seed = _instance_from_args(parser, args)
    write_instance(instance, args.out)
    print(f"{family} {instance.n} {instance.m} {instance.graph.edge_count} {seed}")
    return 0


def _cmd_solve(parser: argparse.ArgumentParser, args) -> int:
    instance = read_instance(args.instance)
    result = solve(instance, args.algo.replace("-", "_"))
    if args.json:
        doc = {
            "algorithm": result.algorithm,
            "facility": result.facility,
            "exact_value": result.exact_value,
            "estimated_value": result.estimated_value,
            "candidate_count": result.candidate_count,
            "settled_total": result.settled_total,
            "wall_ms": result.wall_ms,
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        print(f"algorithm: {result.algorithm}")
        print(f"facility: {result.facility}")
        print(f"exact_value: {result.exact_value:.17g}")
        print(f"estimated_value: {result.estimated_value:.17g}")
        print(f"candidate_count: {result.candidate_count}")
        print(f"settled_total: {result.settled_total}")
        print(f"wall_ms: {result.wall_ms:.3f}")
    return 0


def _verify_checks(instance: Instance) -> List[Tuple[str, bool, str]]:
    """Run every solver plus the oracle and audit the invariant chain."""
    results = {name: solve(instance, name) for name in ALGORITHMS}
    _, oracle_value = brute_force_oracle(instance)
    optimum = results["exact"].exact_value
    tables = candidate_evaluations(instance)
    m = instance.m
    checks: List[Tuple[str, bool, str]] = []

    checks.append(
        (
            "oracle-agreement",
            _close(optimum, oracle_value),
            f"exact={optimum:.12g} oracle={oracle_value:.12g}",
        )
    )
    checks.append(
        (
            "exact-truncated-agreement",
            results["exact_truncated"].exact_value == optimum,
            f"exact_truncated={results['exact_truncated'].exact_value:.12g}",
        )
    )
    sa, nna, spa = results["sa"], results["nna"], results["spa"]
    checks.append(
        (
            "estimates-bound-exact-values",
            sa.estimated_value == sa.exact_value
            and nna.exact_value <= nna.estimated_value * (1 + REL_TOL) + REL_TOL
            and spa.exact_value <= spa.estimated_value * (1 + REL_TOL) + REL_TOL,
            f"sa={sa.estimated_value:.12g} nna<={nna.estimated_value:.12g} spa<={spa.estimated_value:.12g}",
        )
    )

    vp, vpp = tables.vp, tables.vpp
    nested = (
        np.isin(instance.customers, vp).all() and np.isin(vp, vpp).all()
    )
    checks.append(
        (
            "candidate-nesting",
            bool(nested),
            f"m={m} |V'|={vp.shape[0]} |V''|={vpp.shape[0]}",
        )
    )

    cust_pos = np.searchsorted(vpp, instance.customers)
    cust_pos_vp = np.searchsorted(vp, instance.customers)
    customers_exact = all(
        _close(tables.z_sa[pv], tables.z_true[p])
        and _close(tables.z_nna[p], tables.z_true[p])
        and _close(tables.z_spa[p], tables.z_true[p])
        for pv, p in zip(cust_pos_vp, cust_pos)
    )
    checks.append(("customer-evaluations-exact", customers_exact, f"{m} customers checked"))

    vp_pos = np.searchsorted(vpp, vp)
    dominance = bool(
        np.all(tables.z_spa <= tables.z_nna)
        and np.all(tables.z_sa == tables.z_true[vp_pos])
        and np.all(tables.z_nna[vp_pos] <= tables.z_sa * (1 + REL_TOL) + REL_TOL)
    )
    checks.append(("dominance-chain", dominance, "z_spa <= z_nna <= z_sa on V'"))

    upper = bool(
        np.all(tables.z_nna >= tables.z_true * (1 - REL_TOL) - REL_TOL)
        and np.all(tables.z_spa >= tables.z_true * (1 - REL_TOL) - REL_TOL)
    )
    checks.append(("upper-bound-property", upper, "z_nna, z_spa >= z on V''"))

    monotone = (
        float(np.min(tables.z_spa))
        <= float(np.min(tables.z_nna))
        <= float(np.min(tables.z_sa))
    )
    checks.append(("monotone-minima", monotone, "min z_spa <= min z_nna <= min z_sa"))

    ref = oracle_value if oracle_value > 0 else optimum
    ratios = {
        a: (results[a].exact_value / ref if ref > 0 else 1.0)
        for a in ("sa", "nna", "spa")
    }
    ok = all(r >= 1.0 - REL_TOL and r <= 2.0 + REL_TOL for r in ratios.values())
    ok = ok and ratios["nna"] <= GOLDEN_RATIO_BOUND + REL_TOL
    ok = ok and ratios["spa"] <= GOLDEN_RATIO_BOUND + REL_TOL
    equal_weights = bool(np.all(instance.weights == instance.weights[0]))
    if equal_weights and m >= 4:
        ok = ok and ratios["sa"] <= 2.0 - 4.0 / (m + 1) + REL_TOL
    if m <= 3:
        ok = ok and all(_close(r, 1.0) for r in ratios.values())
    detail = " ".join(f"{a}={ratios[a]:.6f}" for a in ("sa", "nna", "spa"))
    checks.append(("ratio-bounds", ok, f"{detail} (optimum {optimum:.12g})"))
    return checks


def _cmd_verify(parser: argparse.ArgumentParser, args) -> int:
    if args.instance is not None:
        instance = read_instance(args.instance)
    elif args.family is not None:
        instance, _, _ = _instance_from_args(parser, args)
    else:
        parser.error("verify needs --instance or --family")
    checks = _verify_checks(instance)
    width = max(len(name) for name, _, _ in checks)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name.ljust(width)}  {detail}")
    passed = sum(1 for _, ok, _ in checks if ok)
    print(f"verify: {'PASS' if passed == len(checks) else 'FAIL'} ({passed}/{len(checks)} checks)")
    return 0 if passed == len(checks) else 1


def _cmd_bench(parser: argparse.ArgumentParser, args) -> int:
    config = load_config(args.config)
    csv_out = args.out or config.csv_out
    json_out = args.json_out or config.json_out
    if csv_out is None and json_out is None:
        parser.error("bench needs --out (or csv_out/json_out in the config)")
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)

    def progress(family: str, n: int, m: int, count: int) -> None:
        print(f"cell {family} n={n} m={m}: {count} instances")

    records = run_suite(config, progress=progress, threads=threads)
    summary = summarize(records)
    if csv_out is not None:
        export_report(summary, csv_out, "csv")
        print(f"wrote {csv_out}")
    if json_out is not None:
        export_report(summary, json_out, "json")
        print(f"wrote {json_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onemedian",
        description="Exact and truncated-Dijkstra solvers for the 1-median problem on weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate an instance file")
    p_gen.add_argument("--family", required=True, choices=_CLI_FAMILIES)
    p_gen.add_argument("--n", type=int, default=None, help="node count")
    p_gen.add_argument("--m", type=int, default=None, help="customer count")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--epsilon", type=float, default=1e-3, help="for tight-sa and lb")
    p_gen.add_argument("--out", required=True, help="output instance path")
    p_gen.set_defaults(handler=_cmd_generate)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--algo", required=True, choices=_CLI_ALGOS)
    p_solve.add_argument("--json", action="store_true", help="emit a JSON object")
    p_solve.set_defaults(handler=_cmd_solve)

    p_verify = sub.add_parser("verify", help="audit solver invariants on one instance")
    p_verify.add_argument("--instance", default=None)
    p_verify.add_argument("--family", default=None, choices=_CLI_FAMILIES)
    p_verify.add_argument("--n", type=int, default=None)
    p_verify.add_argument("--m", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--epsilon", type=float, default=1e-3)
    p_verify.set_defaults(handler=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run a benchmark suite from a JSON config")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out", default=None, help="CSV report path")
    p_bench.add_argument("--json-out", default=None, help="JSON report path")
    p_bench.add_argument("--threads", type=int, default=None)
    p_bench.set_defaults(handler=_cmd_bench)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(parser, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OneMedianError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
