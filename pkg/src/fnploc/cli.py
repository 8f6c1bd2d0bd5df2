"""Command-line front end.

Exit status is 0 whenever a command completes, whatever the verdict, and
2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from fnploc import graph as gr
from fnploc import rules
from fnploc.errors import FnplocError, SpecError
from fnploc.graph import Graph, mask_of
from fnploc.prefs import DIPPED, Kind, pe_set
from fnploc.prove import DEFAULT_TIMEOUT, enumerate_witnesses, prove_existence, prove_via_embedding
from fnploc.report import render, reproduce_table
from fnploc.verify import verify, verify_fnp_bruteforce

FORMATS = ("json", "md", "tsv")


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{what} is not valid JSON: {exc.msg}") from None


def parse_graph(text: str) -> Graph:
    return gr.from_spec(_json_arg(text, "graph spec"))


def parse_rule(text: str, g: Graph, kind: Kind) -> rules.Rule:
    if text.startswith("preset:"):
        return rules.from_spec(text, g, kind)
    return rules.from_spec(_json_arg(text, "rule spec"), g, kind)


def parse_occ(text: str, g: Graph) -> int:
    """Parse ``3,4,5`` (cycle labels or ids) or ``(1,2) (2,3)`` (grid coordinates)."""
    tokens = re.findall(r"\([^)]*\)|[^,;\s()]+", text)
    if not tokens:
        raise SpecError("occupied set must be non-empty")
    return mask_of(g.vertex(t) for t in tokens)


def _emit(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    flat = []
    for key, val in payload.items():
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        flat.append((key, str(val)))
    if fmt == "tsv":
        return "key\tvalue\n" + "".join(f"{k}\t{v}\n" for k, v in flat)
    lines = ["| key | value |", "|---|---|"]
    lines += [f"| {k} | {v.replace('|', '/')} |" for k, v in flat]
    return "\n".join(lines)


def cmd_pe(args) -> dict:
    g = parse_graph(args.graph)
    kind = Kind.parse(args.kind)
    occ = parse_occ(args.occ, g)
    pe = pe_set(g, occ, kind)
    return {
        "graph": g.name,
        "kind": kind.value,
        "occ": g.format_set(occ),
        "pe": g.format_set(pe),
    }


def cmd_verify(args) -> dict:
    g = parse_graph(args.graph)
    kind = Kind.parse(args.kind)
    rule = parse_rule(args.rule, g, kind)
    out = {"graph": g.name, "kind": kind.value, "rule": rule.describe(g)}
    out.update(verify(g, rule, kind).to_json(g))
    if args.bounds:
        agents, fakes = (int(x) for x in args.bounds.split(","))
        m = verify_fnp_bruteforce(g, rule, kind, agents, fakes)
        out["fnp_bruteforce"] = "holds" if m is None else m.to_json(g)
    return out


def cmd_prove(args) -> dict:
    g = parse_graph(args.graph)
    kind = Kind.parse(args.kind)
    out: dict = {"graph": g.name, "kind": kind.value}
    if args.enumerate:
        res = enumerate_witnesses(g, kind, limit=args.limit, timeout=args.timeout)
        out["count"] = len(res.solutions or [])
    else:
        res = prove_existence(g, kind, timeout=args.timeout, jobs=args.jobs)
    out["status"] = res.status.value
    out["nodes"] = res.stats.nodes
    out["propagations"] = res.stats.propagations
    if res.table is not None:
        out["witness_table"] = rules.table_to_json(g, res.table)
    if not args.no_timing:
        out["seconds"] = round(res.stats.seconds, 3)
    if kind is DIPPED and g.kind == "hypergrid" and list(g.params) != [2, 2]:
        out["note"] = "no published answer for dipped hypergrids; this status is new evidence"
    if kind is not DIPPED and not g.is_tree():
        red = prove_via_embedding(g, kind)
        out["embedding"] = "inconclusive" if red is None else red.to_json()
    return out


def cmd_embed(args) -> dict:
    pattern = parse_graph(args.pattern)
    host = parse_graph(args.host)
    emb = gr.find_dp_embedding(pattern, host)
    out = {"pattern": pattern.name, "host": host.name}
    if emb is None:
        out["embedding"] = "not found"
    else:
        out["embedding"] = {pattern.labels[u]: host.labels[h] for u, h in enumerate(emb.map)}
    return out


def cmd_table(args) -> str:
    only = args.cells.split(",") if args.cells else None
    results = reproduce_table(timeout=args.timeout, jobs=args.jobs, only=only)
    return render(results, args.format, timing=not args.no_timing)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fnploc",
        description="Verify and synthesize false-name-proof, Pareto efficient facility location rules on graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kind=True):
        p.add_argument("--format", choices=FORMATS, default="json")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
        p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
        if kind:
            p.add_argument("--kind", default="peaked", help="peaked or dipped")

    p = sub.add_parser("pe", help="Pareto efficient set of an occupied set")
    p.add_argument("--graph", required=True)
    p.add_argument("--occ", required=True, help="e.g. 3,4,5 on cycles or '(1,1) (2,3)' on grids")
    common(p)
    p.set_defaults(func=cmd_pe)

    p = sub.add_parser("verify", help="check a rule for Pareto efficiency and false-name-proofness")
    p.add_argument("--graph", required=True)
    p.add_argument("--rule", required=True, help="preset:<name> or a JSON rule spec")
    p.add_argument("--bounds", help="AGENTS,FAKES: also run the explicit-profile brute force")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove", help="search for an FNP and PE rule table")
    p.add_argument("--graph", required=True)
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--enumerate", action="store_true", help="list all witnesses (at most 5 vertices)")
    p.add_argument("--limit", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("embed", help="find a distance-preserving embedding")
    p.add_argument("--pattern", required=True)
    p.add_argument("--host", required=True)
    common(p, kind=False)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("table", help="reproduce the existence table")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="per-cell search timeout in seconds")
    p.add_argument("--cells", help="comma-separated cell names, e.g. C4-dipped,grid3x3-peaked")
    common(p, kind=False)
    p.set_defaults(func=cmd_table)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        result = args.func(args)
    except (FnplocError, ValueError) as exc:
        print(f"fnploc: error: {exc}", file=sys.stderr)
        return 2
    text = result if isinstance(result, str) else _emit(result, args.format)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
