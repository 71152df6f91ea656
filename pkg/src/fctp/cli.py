"""Command-line entry point: ``fctp gen|solve|export|verify|stats``.

Exit status is 0 on success, 1 when a verification suite fails and 2 on
usage or input errors. When ``-o`` is omitted, output goes to
``$FCTP_OUTPUT_DIR/<default name>`` if that variable is set, else stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .errors import FctpError
from .formulations import build_ip, build_ip_z, build_qdp, build_qsn, check_point
from .generators import GenConfig, ThreePartitionInput, gen_bipartite, gen_tree, reduce_3partition
from .lpformat import dumps_lp, dumps_mps
from .model import root_tree
from .oracle import DEFAULT_LIMIT, brute_force_solve
from .rational import as_fraction, to_json_rational
from .tree_dp import encode_uv, solve_tree
from .verify import SUITES

OUTPUT_DIR_ENV = "FCTP_OUTPUT_DIR"
FORMULATIONS = ("ip", "ipz", "qdp", "qsn", "qsnz")


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None, default_name: str) -> None:
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _rational_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _numbers_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def build_model(inst, formulation: str, root: int = 1):
    if formulation == "ip":
        return build_ip(inst)
    if formulation == "ipz":
        return build_ip_z(inst)
    rt = root_tree(inst, root)
    if formulation == "qdp":
        return build_qdp(rt)
    return build_qsn(rt, with_z=formulation == "qsnz")


def model_stats(model) -> dict:
    prefixes = sorted({v.name.split("_", 1)[0] for v in model.variables})
    return {
        "formulation": model.name,
        "variables": len(model.variables),
        "constraints": len(model.constraints),
        "by_prefix": {p: model.count(p + "_") for p in prefixes},
    }


def cmd_gen(args) -> int:
    provenance = None
    if args.kind == "bipartite":
        cfg = GenConfig(
            n=args.n,
            B=args.B,
            r=args.r,
            seed=args.seed,
            cost_lo=args.cost_lo,
            cost_hi=args.cost_hi,
            variable_cost=args.variable_cost,
        )
        inst = gen_bipartite(cfg)
        provenance = cfg.echo()
        name = f"bipartite_n{args.n}_B{args.B}_s{args.seed}.json"
    elif args.kind == "tree":
        inst = gen_tree(args.n, args.b_max, args.seed)
        provenance = {"generator": "tree", "n": args.n, "b_max": args.b_max, "seed": args.seed}
        name = f"tree_n{args.n}_s{args.seed}.json"
    else:
        if args.numbers is None or args.b is None:
            raise UsageError("from-3partition needs --numbers and --b")
        inp = ThreePartitionInput(args.numbers, args.b)
        inst = reduce_3partition(inp)
        provenance = {"generator": "3partition", "numbers": list(inp.numbers), "b": inp.b}
        name = "3partition.json"
    _emit(io.dumps_instance(inst, provenance), args.output, name)
    return 0


def cmd_solve(args) -> int:
    inst = io.read_instance(args.instance)
    if args.method == "tree-dp":
        rt = root_tree(inst, args.root)
        tables, sol = solve_tree(rt)
        if args.certificate:
            cert = encode_uv(rt, sol.x)
            bad = check_point(build_qdp(rt), cert.assignment())
            if bad:
                print(f"certificate check failed: {bad[0]}", file=sys.stderr)
                return 1
            io.write_assignment(
                cert.assignment(), args.certificate, formulation="qdp", root=rt.root, objective=cert.objective
            )
    else:
        sol = brute_force_solve(inst, args.limit)
    doc = io.solution_to_dict(inst, sol)
    doc["method"] = args.method
    _emit(json.dumps(doc, indent=2) + "\n", args.output, "solution.json")
    print(f"objective {sol.objective}", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    inst = io.read_instance(args.instance)
    if args.node_sense == "le":
        inst = inst.with_variant(inst.variant.relaxed())
    model = build_model(inst, args.formulation, args.root)
    text = dumps_lp(model) if args.format == "lp" else dumps_mps(model)
    _emit(text, args.output, f"{args.formulation}.{args.format}")
    stats = model_stats(model)
    if args.formulation == "ipz":
        stats["z_count"] = sum(a + 1 for a in inst.a)
    print(json.dumps(stats), file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.trials is not None:
        kwargs["trials"] = args.trials
    result = suite(**kwargs)
    print(result.summary())
    for failure in result.failures[:20]:
        print(f"  {failure}")
    return 0 if result.passed else 1


def cmd_stats(args) -> int:
    inst = io.read_instance(args.instance)
    out = {
        "nodes": inst.num_nodes,
        "arcs": inst.num_arcs,
        "sum_a_plus_1": sum(a + 1 for a in inst.a),
        "formulations": {},
    }
    for name in FORMULATIONS:
        try:
            out["formulations"][name] = model_stats(build_model(inst, name, args.root))
        except FctpError as exc:
            out["formulations"][name] = {"unavailable": f"{type(exc).__name__}: {exc}"}
    print(json.dumps(out, indent=2, default=to_json_rational))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fctp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("kind", choices=("bipartite", "tree", "from-3partition"))
    gen.add_argument("--n", type=int, default=20, help="suppliers (= customers) or tree nodes")
    gen.add_argument("--B", type=int, default=20, help="capacity cap for bipartite instances")
    gen.add_argument("--r", type=_rational_arg, default=Fraction(1), help="demand/supply ratio")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--cost-lo", type=int, default=200)
    gen.add_argument("--cost-hi", type=int, default=800)
    gen.add_argument("--variable-cost", type=_rational_arg, default=Fraction(0))
    gen.add_argument("--b-max", type=int, default=5, help="tree capacity cap")
    gen.add_argument("--numbers", type=_numbers_arg, help="3-Partition numbers, comma separated")
    gen.add_argument("--b", type=int, help="3-Partition target sum")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="solve an instance exactly")
    solve.add_argument("instance")
    solve.add_argument("--method", choices=("tree-dp", "brute"), default="tree-dp")
    solve.add_argument("--root", type=int, default=1)
    solve.add_argument("--certificate", help="write the dual certificate (tree-dp only)")
    solve.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="brute-force budget")
    solve.add_argument("-o", "--output")
    solve.set_defaults(func=cmd_solve)

    export = sub.add_parser("export", help="write a formulation as LP or MPS")
    export.add_argument("instance")
    export.add_argument("--formulation", choices=FORMULATIONS, required=True)
    export.add_argument("--format", choices=("lp", "mps"), default="lp")
    export.add_argument("--root", type=int, default=1)
    export.add_argument(
        "--node-sense", choices=("keep", "le"), default="keep", help="'le' relaxes equality rows"
    )
    export.add_argument("-o", "--output")
    export.set_defaults(func=cmd_export)

    verify = sub.add_parser("verify", help="run a seeded verification suite")
    verify.add_argument("--suite", choices=sorted(SUITES), required=True)
    verify.add_argument("--trials", type=int)
    verify.add_argument("--seed", type=int, default=1)
    verify.set_defaults(func=cmd_verify)

    stats = sub.add_parser("stats", help="variable/constraint counts per formulation")
    stats.add_argument("instance")
    stats.add_argument("--root", type=int, default=1)
    stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (FctpError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
