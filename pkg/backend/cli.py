# backend/cli.py
"""
kdom command line.
  kdom run --config cfg.json --out results.csv [--json results.json]
  kdom domset --graph g.json --k 2 [--trace trace.json]
  kdom decompose --graph g.json --epsilon 1/10
  kdom approx --graph g.json --k 2 --t 3 (--alpha 1/2 | --epsilon 3/10) [--variant bounded-degree --C 24]
  kdom oracle gamma --graph g.json --k 2 | kdom oracle minor --graph g.json --t 3
  kdom gen --family maximal-outerplanar --n 30 --seed 7 --out g.json
Results go to stdout as JSON; failures print {"ok": false, "msg": ...}.
Exit codes: 0 ok, 1 failed audit / contract / budget, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from pydantic import ValidationError

from backend import config
from backend.errors import BudgetExceeded, ContractFailure, InputError, KdomError
from backend.experiments import load_config, run_experiments, write_csv, write_json
from backend.tools.approx import bounded_degree_approx, degree_certificate, k_domset_approx
from backend.tools.decomposition import low_boundary_partition, verify_partition
from backend.tools.domset import domset
from backend.tools.generators import FAMILIES, GeneratorSpec, generate, permute_ids
from backend.tools.graph_io import dump_graph, graph_to_payload, load_graph
from backend.tools.oracle import gamma_k_exact, has_k2t_minor


def _emit(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# -------- subcommands --------

def cmd_run(args) -> int:
    cfg = load_config(args.config)
    updates = {}
    if args.out:
        updates["out"] = args.out
    if args.json:
        updates["json_out"] = args.json
    if args.workers:
        updates["workers"] = args.workers
    cfg = cfg.model_copy(update=updates)
    report = run_experiments(cfg)
    if cfg.out:
        write_csv(report, cfg.out)
    if cfg.json_out:
        write_json(report, cfg.json_out)
    summary = report.summary()
    if not summary.empty:
        sys.stderr.write(summary.to_string(index=False) + "\n")
    print(f"✅ {len(report.rows)} rows, {report.failures} failed"
          + (f" → {cfg.out}" if cfg.out else ""), file=sys.stderr)
    return 1 if report.failures else 0


def cmd_domset(args) -> int:
    g = load_graph(args.graph)
    run = domset(g, args.k, exact_small=not args.no_exact_small,
                 workers=args.workers or config.WORKERS, order=args.order, seed=args.seed)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as f:
            json.dump(run.trace.to_payload(), f, indent=2, sort_keys=True)
            f.write("\n")
    _emit({"ok": True, **run.to_payload()})
    return 0


def cmd_decompose(args) -> int:
    g = load_graph(args.graph)
    p = low_boundary_partition(g, args.epsilon, seed=args.seed, radius_cap=args.radius_cap)
    report = verify_partition(g, p, args.epsilon)
    _emit({"ok": report.passed, "partition": p.to_payload(), "check": report.to_payload()})
    return 0 if report.passed else 1


def cmd_approx(args) -> int:
    g = load_graph(args.graph)
    if (args.alpha is None) == (args.epsilon is None):
        raise InputError("give exactly one of --alpha or --epsilon")
    opts = dict(alpha=args.alpha, epsilon=args.epsilon, seed=args.seed,
                radius_cap=args.radius_cap, workers=args.workers)
    if args.variant == "bounded-degree":
        C = args.C if args.C is not None else degree_certificate(g, args.k)
        run = bounded_degree_approx(g, args.k, args.t, C, **opts)
    else:
        run = k_domset_approx(g, args.k, args.t, **opts)
    ok = run.audit.q_valid and run.audit.transfer_ok is not False
    _emit({"ok": ok, **run.to_payload()})
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    g = load_graph(args.graph)
    if args.what == "gamma":
        cert = gamma_k_exact(g, args.k, args.budget)
        _emit({"ok": True, **cert.to_payload()})
    else:
        found = has_k2t_minor(g, args.t, args.budget)
        _emit({"ok": True, "t": args.t, "has_minor": found})
    return 0


def cmd_gen(args) -> int:
    spec = GeneratorSpec(family=args.family, n=args.n, seed=args.seed, max_degree=args.max_degree)
    g = generate(spec)
    if args.permute is not None:
        g = permute_ids(g, args.permute)
    if args.out:
        dump_graph(g, args.out)
        print(f"✅ {spec.label}: n={g.n} m={g.m} → {args.out}", file=sys.stderr)
    else:
        _emit(graph_to_payload(g))
    return 0


# -------- parser --------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kdom", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV path")
    p.add_argument("--json", default=None, help="full audit JSON path")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("domset", help="run DomSet on the LOCAL engine")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--order", choices=["ascending", "shuffled"], default="ascending")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-exact-small", action="store_true")
    p.add_argument("--trace", default=None, help="write the round/message/output trace as JSON")
    p.set_defaults(func=cmd_domset)

    p = sub.add_parser("decompose", help="low-boundary partition")
    p.add_argument("--graph", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--radius-cap", type=int, default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("approx", help="(1+alpha) pipeline")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--alpha", default=None)
    p.add_argument("--epsilon", default=None)
    p.add_argument("--variant", choices=["voronoi", "bounded-degree"], default="voronoi")
    p.add_argument("--C", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--radius-cap", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("oracle", help="exact gamma_k or K_{2,t} minor search")
    osub = p.add_subparsers(dest="what", required=True)
    q = osub.add_parser("gamma")
    q.add_argument("--graph", required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--budget", type=int, default=None)
    q.set_defaults(func=cmd_oracle)
    q = osub.add_parser("minor")
    q.add_argument("--graph", required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--budget", type=int, default=None)
    q.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--permute", type=int, default=None, help="relabel ids with this seed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config.setup_logging(args.log_level)
    try:
        return args.func(args)
    except (InputError, ValidationError, OSError) as e:
        _emit({"ok": False, "msg": str(e)})
        return 2
    except ContractFailure as e:
        _emit({"ok": False, "msg": str(e), "achieved": e.achieved, "radius_cap": e.radius_cap})
        return 1
    except BudgetExceeded as e:
        _emit({"ok": False, "msg": str(e), "explored": e.explored})
        return 1
    except KdomError as e:
        _emit({"ok": False, "msg": str(e)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
