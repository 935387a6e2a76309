"""onemedian: exact and truncated-Dijkstra solvers for the 1-median problem
on large weighted undirected graphs, with reproducible instance generators
and a benchmark harness."""

from .dijkstra import (
    DeterminedDistances,
    dijkstra_full,
    dijkstra_truncated,
    settle_prefix,
)
from .errors import (
    CapExceededError,
    ConfigError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    EmptyInputError,
    FeasibilityError,
    GraphError,
    InstanceError,
    NegativeCostError,
    NodeIdOutOfRangeError,
    NonIntegerWeightError,
    OneMedianError,
    ParseError,
    SelfLoopError,
    SizeGuardError,
    TargetUnreachableError,
)
from .generators import (
    EXPANSION_CAP,
    FAMILIES,
    RRU_N_CAP,
    GenSpec,
    expand_weighted,
    gen_gdu,
    gen_gnu,
    gen_lb_instance,
    gen_rdu,
    gen_rnu,
    gen_rru,
    gen_rrw,
    gen_tight_sa,
)
from .graph import Graph, build_graph, format_graph_text, parse_graph_text
from .harness import (
    CSV_HEADER,
    ExperimentRecord,
    SuiteConfig,
    Summary,
    SummaryRow,
    derive_seed,
    export_report,
    load_config,
    run_suite,
    summarize,
)
from .instance import (
    Instance,
    build_instance,
    format_instance_text,
    parse_instance_text,
    read_instance,
    write_instance,
)
from .solvers import (
    ALGORITHMS,
    CandidateEvaluation,
    SolveResult,
    TdaEvaluations,
    brute_force_oracle,
    candidate_evaluations,
    evaluate_node,
    oracle_cap,
    solve,
    solve_exact,
    solve_exact_truncated,
    solve_tda_nna,
    solve_tda_sa,
    solve_tda_spa,
)

__version__ = "1.0.0"

__all__ = [
    "ALGORITHMS",
    "CSV_HEADER",
    "CandidateEvaluation",
    "CapExceededError",
    "ConfigError",
    "DeterminedDistances",
    "DisconnectedGraphError",
    "DuplicateEdgeError",
    "EXPANSION_CAP",
    "EmptyInputError",
    "ExperimentRecord",
    "FAMILIES",
    "FeasibilityError",
    "GenSpec",
    "Graph",
    "GraphError",
    "Instance",
    "InstanceError",
    "NegativeCostError",
    "NodeIdOutOfRangeError",
    "NonIntegerWeightError",
    "OneMedianError",
    "ParseError",
    "RRU_N_CAP",
    "SelfLoopError",
    "SizeGuardError",
    "SolveResult",
    "SuiteConfig",
    "Summary",
    "SummaryRow",
    "TargetUnreachableError",
    "TdaEvaluations",
    "brute_force_oracle",
    "build_graph",
    "build_instance",
    "candidate_evaluations",
    "derive_seed",
    "dijkstra_full",
    "dijkstra_truncated",
    "evaluate_node",
    "expand_weighted",
    "export_report",
    "format_graph_text",
    "format_instance_text",
    "gen_gdu",
    "gen_gnu",
    "gen_lb_instance",
    "gen_rdu",
    "gen_rnu",
    "gen_rru",
    "gen_rrw",
    "gen_tight_sa",
    "load_config",
    "oracle_cap",
    "parse_graph_text",
    "parse_instance_text",
    "read_instance",
    "run_suite",
    "settle_prefix",
    "solve",
    "solve_exact",
    "solve_exact_truncated",
    "solve_tda_nna",
    "solve_tda_sa",
    "solve_tda_spa",
    "summarize",
    "write_instance",
]
