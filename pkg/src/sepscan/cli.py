"""Command-line interface: ``sepscan synth | test | bench | verify``.

Exit codes: 0 success, 1 guarantee violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bench import BENCH_FAMILIES, MODES, ExperimentSpec, median_queries, records_to_csv, run_bench, run_once
from .exact import is_chordal, is_tree
from .graphs import graph_from_spec
from .oracle import CovarianceOracle
from .seeding import child_seed, stream
from .synth import (STRONG_MAX_N, load_graph, read_sidecar, save_instance, synthesize,
                    verify_strong_faithfulness, verify_tau_faithfulness)
from .svg import scaling_svg

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepscan", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a graph and a faithful covariance matrix")
    s.add_argument("--graph", required=True, help="family:key=val,... e.g. tree:n=100 or ktree:n=50,k=2")
    s.add_argument("--out", required=True, type=Path)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tau", type=int, default=3, help="faithfulness order to verify (small n only)")

    t = sub.add_parser("test", help="run a tester on a synthesized instance")
    t.add_argument("--in", dest="in_dir", required=True, type=Path)
    t.add_argument("--mode", required=True, choices=MODES)
    t.add_argument("--k", type=int)
    t.add_argument("--m", type=int)
    t.add_argument("--eps", type=float, default=0.1)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--timing", action="store_true", help="include wall_ms (output is then not reproducible)")

    b = sub.add_parser("bench", help="query-complexity scaling experiment, CSV on stdout")
    b.add_argument("--family", required=True, choices=BENCH_FAMILIES)
    b.add_argument("--sizes", required=True, type=_int_list)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--mode", choices=MODES, default="tree")
    b.add_argument("--k", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--e", type=int, default=1, help="extra edges for tree_plus_edges")
    b.add_argument("--c", type=int, default=5, help="clique size for clique_planted")
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--out", type=Path, help="write CSV here instead of stdout")
    b.add_argument("--svg", type=Path, help="write a log-log plot of median queries")

    v = sub.add_parser("verify", help="check tester guarantees against brute force on small graphs")
    v.add_argument("--n-max", type=int, default=12)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--m", type=int, default=24)
    v.add_argument("--families", help="comma-separated subset of families")
    v.add_argument("--inject-unfaithful", action="store_true",
                   help="add Σ=I over a 3-vertex path, which must be flagged as a precondition failure")
    return p


def cmd_synth(args) -> int:
    try:
        G = graph_from_spec(args.graph, stream(args.seed, "graph"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Sigma = synthesize(G, stream(args.seed, "precision"))
    out = save_instance(args.out, G, Sigma, args.seed)
    if G.n <= STRONG_MAX_N:
        faith = verify_strong_faithfulness(Sigma, G, args.tau).to_dict()
    elif G.n <= 14:
        faith = verify_tau_faithfulness(Sigma, G, min(args.tau, 2)).to_dict()
    else:
        faith = {"kind": "skipped", "reason": "n too large for exhaustive check"}
    (out / "faithfulness.json").write_text(json.dumps(faith, indent=1))
    summary = {"out": str(out), "n": G.n, "edges": G.num_edges, "max_degree": G.max_degree,
               "is_tree": is_tree(G), "chordal": is_chordal(G), "faithfulness": faith.get("passed", "skipped")}
    print(json.dumps(summary))
    return EXIT_OK


def cmd_test(args) -> int:
    needs_k = args.mode in ("marginal", "conditional")
    if needs_k and args.k is None:
        raise UsageError(f"--mode {args.mode} requires --k")
    if not needs_k and args.k is not None:
        raise UsageError(f"--mode {args.mode} does not take --k")
    try:
        meta = read_sidecar(args.in_dir)
        G = load_graph(args.in_dir)
        oracle = CovarianceOracle.from_dir(args.in_dir)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read instance: {exc}") from None
    seed = child_seed(args.seed, 2)
    t0 = time.perf_counter()
    try:
        out = run_once(G, oracle, args.mode, args.k, args.m, args.eps, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    record = {"n": meta["n"], "delta": G.max_degree, "verdict": str(out.verdict),
              "good_run": out.good_run, "queries": out.queries, "depth": out.depth,
              "seed": args.seed, "mode": args.mode, "k": args.k, "m": out.info.get("m")}
    if args.mode == "ci":
        record["covariance_queries"] = oracle.queries
    if "theory_m_met" in out.info:
        record["theory_m_met"] = out.info["theory_m_met"]
    if args.timing:
        record["wall_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        spec = ExperimentSpec(args.family, args.sizes, args.trials, args.seed, args.mode, args.k,
                              e=args.e, c=args.c, eps=args.eps, m_override=args.m)
        records = run_bench(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = records_to_csv(records)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.svg:
        args.svg.write_text(scaling_svg(median_queries(records), f"{args.family}, mode {args.mode}"))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import VERIFY_FAMILIES, run_verify

    families = args.families.split(",") if args.families else None
    if families and any(f not in VERIFY_FAMILIES for f in families):
        raise UsageError(f"families must be among {sorted(VERIFY_FAMILIES)}")
    try:
        report = run_verify(args.n_max, args.trials, args.seed, m=args.m, families=families,
                            inject_unfaithful=args.inject_unfaithful)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK if report.ok else EXIT_VIOLATION


COMMANDS = {"synth": cmd_synth, "test": cmd_test, "bench": cmd_bench, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sepscan {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
