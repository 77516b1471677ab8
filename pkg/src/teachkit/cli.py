"""Command-line front end.

Exit codes: 0 success, 1 unreadable input, 2 search budget exceeded,
3 a verified witness was rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import __version__
from .classic import td, verify_teaching_set
from .concepts import (
    ConceptClass,
    GENERATORS,
    format_class,
    load_class,
    named_class,
    vc_dimension,
)
from .errors import ClassFormatError, InconsistentTeacherMap, SearchBudgetExceeded
from .explore import explore_exhaustive, explore_sample
from .matching import (
    format_graph,
    format_matching,
    nc_matching,
    parse_graph,
    parse_matching,
    verify_nc_matching,
)
from .nctd import (
    anctd_exact,
    bounds,
    collusion_audit,
    default_node_budget,
    format_witness,
    is_non_clashing,
    nctd_exact,
    parse_witness,
)
from .pbtd import pbtd
from .reduction import VARIANTS, decode_assignment, parse_dimacs, sat_to_ncmatching

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_REJECTED = 0, 1, 2, 3

PARAMS = ("td", "td+", "pbtd", "pbtd+", "nctd", "nctd+", "anctd", "vcd", "bounds")
DEFAULT_PARAMS = "td,pbtd,nctd,nctd+,vcd,bounds"


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self.chunks: list[str] = []

    def write(self, text: str) -> None:
        self.chunks.append(text)

    def close(self) -> None:
        text = "".join(self.chunks)
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _parse_params(text: str, positive: bool) -> list[str]:
    out = []
    for raw in text.split(","):
        p = raw.strip().lower().replace("plus", "+")
        if not p:
            continue
        if p not in PARAMS:
            raise ValueError(f"unknown parameter {raw.strip()!r}; choose from {', '.join(PARAMS)}")
        if positive and p in ("td", "pbtd", "nctd"):
            p += "+"
        if p not in out:
            out.append(p)
    return out


def _compute_one(p: str, cc: ConceptClass, args) -> dict:
    nodes, secs = args.budget_nodes, args.budget_secs
    if p in ("td", "td+"):
        return {"value": td(cc, positive_only=p.endswith("+"))}
    if p in ("pbtd", "pbtd+"):
        return {"value": pbtd(cc, positive_only=p.endswith("+"))}
    if p in ("nctd", "nctd+"):
        res = nctd_exact(cc, positive_only=p.endswith("+"), node_budget=nodes, time_budget=secs)
        return {"value": res.value, "witness": format_witness(res.witness, cc),
                "certificates": list(res.certificates)}
    if p == "anctd":
        res = anctd_exact(cc, node_budget=nodes)
        return {"value": str(res.value), "witness": format_witness(res.witness, cc)}
    if p == "vcd":
        return {"value": vc_dimension(cc)}
    rep = bounds(cc, positive_only=args.positive)
    return {"value": rep.as_dict()}


def cmd_compute(args) -> int:
    cc = load_class(args.cls)
    params = _parse_params(args.params, args.positive)
    report: dict[str, dict] = {}
    code = EXIT_OK
    for p in params:
        try:
            report[p] = _compute_one(p, cc, args)
        except SearchBudgetExceeded as exc:
            report[p] = {"budget_exceeded": True, "bracket": [exc.lower, exc.upper]}
            code = EXIT_BUDGET
    out = _Output(args.out)
    if args.format == "structured":
        out.write(json.dumps({"domain": cc.m, "concepts": len(cc), "results": report},
                             indent=2, default=str) + "\n")
    else:
        for p, r in report.items():
            name = p.upper()
            if r.get("budget_exceeded"):
                lo, hi = r["bracket"]
                out.write(f"{name} budget exceeded, value in [{lo}, {hi if hi is not None else '?'}]\n")
            elif p == "bounds":
                out.write("BOUNDS " + " ".join(f"{k}={v}" for k, v in r["value"].items()) + "\n")
            else:
                out.write(f"{name} {r['value']}\n")
                if args.witness and "witness" in r:
                    out.write("".join(f"  {line}\n" for line in r["witness"].splitlines()))
    out.close()
    return code


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_verify(args) -> int:
    out = _Output(args.out)
    if args.kind == "matching":
        graph = parse_graph(_read(args.cls))
        matching = parse_matching(_read(args.witness))
        ok = verify_nc_matching(graph, matching)
        out.write("PASS non-clashing saturating matching\n" if ok
                  else f"FAIL {_matching_failure(graph, matching)}\n")
        out.close()
        return EXIT_OK if ok else EXIT_REJECTED

    cc = load_class(args.cls)
    tmap = parse_witness(_read(args.witness), cc, positive_only=True if args.positive else None)
    if args.kind == "teaching-set":
        for i, s in enumerate(tmap.samples):
            if not verify_teaching_set(cc, i, s):
                out.write(f"FAIL sample {s} does not single out concept {cc.row(i)}\n")
                out.close()
                return EXIT_REJECTED
        out.write("PASS every sample is a teaching set\n")
        out.close()
        return EXIT_OK

    try:
        pair = is_non_clashing(tmap, cc)
    except InconsistentTeacherMap as exc:
        out.write(f"FAIL sample of concept {cc.row(exc.concept)} is not consistent with it\n")
        out.close()
        return EXIT_REJECTED
    if pair is not None:
        i, j = pair
        out.write(f"FAIL concepts {cc.row(i)} and {cc.row(j)} clash\n")
        out.close()
        return EXIT_REJECTED
    line = f"PASS non-clashing, order {tmap.order}"
    if tmap.positive_only:
        line += ", positive"
    if args.audit:
        if not collusion_audit(tmap, cc):
            out.write(line + "\nFAIL collusion audit\n")
            out.close()
            return EXIT_REJECTED
        line += ", collusion-free"
    out.write(line + "\n")
    out.close()
    return EXIT_OK


def _matching_failure(graph, matching) -> str:
    for u, v in matching:
        if not graph.has_edge(u, v):
            return f"pair ({u},{v}) is not an edge"
    missing = sorted(set(range(graph.black_count)) - {u for u, _ in matching})
    if missing:
        return f"black vertex {graph.black_tag(missing[0])} is not matched"
    pairs = sorted(matching.pairs)
    for i, (u, v) in enumerate(pairs):
        for u2, v2 in pairs[i + 1:]:
            if graph.has_edge(u, v2) and graph.has_edge(u2, v):
                return f"edges ({u},{v}) and ({u2},{v2}) lie on a 4-cycle"
    return "unknown"  # pragma: no cover


def cmd_gen(args) -> int:
    name = args.name if args.size is None else f"{args.name}:{args.size}"
    cc = named_class(name)
    out = _Output(args.out)
    out.write(format_class(cc))
    out.close()
    return EXIT_OK


def cmd_reduce(args) -> int:
    formula = parse_dimacs(_read(args.cnf))
    art = sat_to_ncmatching(formula, args.variant)
    g = art.graph
    comments = [f"{args.variant} gadget graph for {formula.num_vars} variables, "
                f"{len(formula.clauses)} clauses",
                f"vertices {g.black_count + g.white_count}, edges {len(g.edges)}, "
                f"max degree {g.max_degree()}"]
    out = _Output(args.out)
    out.write(format_graph(g, comments))
    code = EXIT_OK
    if args.solve:
        try:
            found = nc_matching(g, args.budget_nodes)
        except SearchBudgetExceeded as exc:
            sys.stderr.write(f"{exc}\n")
            code = EXIT_BUDGET
        else:
            if found is None:
                sys.stderr.write("no non-clashing matching: formula unsatisfiable\n")
            else:
                values = decode_assignment(art, found)
                sys.stderr.write("satisfying assignment: " + " ".join(
                    str(i if v else -i) for i, v in enumerate(values, start=1)) + "\n")
                if args.matching_out:
                    with open(args.matching_out, "w", encoding="utf-8") as fh:
                        fh.write(format_matching(found))
    out.close()
    return code


def cmd_explore(args) -> int:
    out = _Output(args.out)
    try:
        if args.sample:
            report = explore_sample(args.domain, args.sample, args.max_size, args.seed,
                                    args.budget_nodes)
        else:
            report = explore_exhaustive(args.domain, args.max_size, args.state,
                                        args.budget_secs, args.budget_nodes)
    except SearchBudgetExceeded as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_BUDGET
    if args.format == "structured":
        out.write(report.to_json() + "\n")
    else:
        out.write(report.to_text())
    out.close()
    return EXIT_OK


def _positive_int(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=_positive_int, default=None,
                        help="search node budget (default: $TEACHKIT_BUDGET_NODES or "
                             f"{default_node_budget()})")
    common.add_argument("--budget-secs", type=_positive_float, default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    parser = argparse.ArgumentParser(prog="teachkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="compute teaching parameters")
    p.add_argument("cls", help="class file or named class (warmuth, intro, powerset:3, ...)")
    p.add_argument("--params", default=DEFAULT_PARAMS,
                   help=f"comma-separated subset of {','.join(PARAMS)}")
    p.add_argument("--positive", action="store_true", help="positive-only variants")
    p.add_argument("--witness", action="store_true", help="print witness maps")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", parents=[common], help="check a witness")
    p.add_argument("cls", help="class file or named class; graph file for --kind matching")
    p.add_argument("witness")
    p.add_argument("--kind", choices=("map", "teaching-set", "matching"), default="map")
    p.add_argument("--positive", action="store_true")
    p.add_argument("--audit", action="store_true", help="also run the collusion audit")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", parents=[common], help="write a named class")
    p.add_argument("name", choices=GENERATORS)
    p.add_argument("size", nargs="?", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", parents=[common], help="3-CNF to gadget graph")
    p.add_argument("cnf")
    p.add_argument("--variant", choices=VARIANTS, default="degree5")
    p.add_argument("--solve", action="store_true",
                   help="also search for a non-clashing matching and decode it")
    p.add_argument("--matching-out", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("explore", parents=[common], help="look for NCTD > VCD")
    p.add_argument("--domain", type=_positive_int, required=True)
    p.add_argument("--max-size", type=_positive_int, default=None)
    p.add_argument("--sample", type=_positive_int, default=None,
                   help="draw this many random classes instead of enumerating")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", default=None, help="checkpoint file for resuming")
    p.set_defaults(func=cmd_explore)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable = args.func
    try:
        return handler(args)
    except ClassFormatError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except SearchBudgetExceeded as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
