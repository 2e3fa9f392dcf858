"""Command-line interface.

Exit status: 0 for an affirmative result, 1 for a negative finding (not
choosable, no colouring, counterexample, failed check), 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import ClassificationError, classify_42, classify_components, witness_for
from .coloring import (
    ColoringError, FastSolver, ListAssignment, coloring_json, colors_of, fmt_set, forcing_analysis,
    format_lists, lists_json, parse_lists, validate_coloring,
)
from .flat import default_workers, enumerate_flat, verify_choosable, verify_forcing_claims
from .graph import Graph, GraphError, build_named, parse_edge_list
from .witnesses import (
    MAX_CONSTRUCTION_M, WitnessError, blocked_hub_colorings, construct_non_2mm, load_entry,
    verify_catalogue,
)


class UsageError(Exception):
    pass


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        print(text.rstrip("\n"))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _graph_from_json(data: dict) -> Graph:
    edges = [tuple(map(str, e)) for e in data["graph"]]
    return Graph.from_edges(edges, vertices=[str(v) for v in data.get("vertices", [])] or None)


def _load_graph(args, required: bool = True) -> Graph | None:
    if args.graph and args.named:
        raise UsageError("give either --graph or --named, not both")
    if args.graph:
        text = _read(args.graph)
        if text.lstrip().startswith("{"):
            return _graph_from_json(json.loads(text))
        return parse_edge_list(text)
    if args.named:
        return build_named(args.named)
    if required:
        raise UsageError("a graph is required (--graph FILE or --named SPEC)")
    return None


def _load_lists(args, G: Graph) -> tuple[ListAssignment, int | None]:
    if not args.lists:
        raise UsageError("--lists FILE is required")
    return parse_lists(_read(args.lists), G)


def _workers(args) -> int:
    return default_workers() if args.workers is None else args.workers


def _check_ab(args) -> None:
    if args.a is not None and args.a < 1:
        raise UsageError("--a must be positive")
    if args.b is not None and args.b < 1:
        raise UsageError("--b must be positive")
    if args.a is not None and args.b is not None and args.b > args.a:
        raise UsageError("--b cannot exceed --a")


# ------------------------------------------------------------------ commands

def cmd_classify(args) -> int:
    G = _load_graph(args)
    if G.n and not G.is_connected():
        return _classify_parts(args, G)
    res = classify_42(G)
    data = res.to_json()
    lines = [f"verdict: {res.verdict}"]
    if res.choosable:
        params = " ".join(f"{k}={v}" for k, v in sorted(res.params.items()))
        lines.append(f"case: ({res.case}) {params}".rstrip())
    else:
        ob = res.obstruction
        lines.append(f"obstruction: {ob.kind}" + (f" {ob.name}" if ob.name else "") + f" ({ob.detail})")
        if ob.embedding is not None:
            lines += ["  " + s for s in ob.embedding.describe()]
        if args.json:
            data["witness"] = witness_for(G, res).to_json()
    for step in res.trace:
        lines.append(f"trace: {step.rule}: {step.detail}")
    _emit(args, data, "\n".join(lines))
    return 0 if res.choosable else 1


def _classify_parts(args, G: Graph) -> int:
    # components are coloured independently, so one bad component decides
    results = classify_components(G)
    ok = all(r.choosable for r in results)
    lines = [f"verdict: {'CHOOSABLE' if ok else 'NOT_CHOOSABLE'}"]
    parts = []
    for r in results:
        d = r.to_json()
        if not r.choosable and args.json:
            d["witness"] = witness_for(r.graph, r).to_json()
        parts.append(d)
        where = ",".join(r.graph.labels[:4]) + (",..." if r.graph.n > 4 else "")
        if r.choosable:
            lines.append(f"component {{{where}}}: case ({r.case})")
        else:
            ob = r.obstruction
            lines.append(f"component {{{where}}}: {ob.kind}" + (f" {ob.name}" if ob.name else ""))
    _emit(args, {"verdict": "CHOOSABLE" if ok else "NOT_CHOOSABLE", "components": parts}, "\n".join(lines))
    return 0 if ok else 1


def cmd_solve(args) -> int:
    if args.lists and not (args.graph or args.named):
        text = _read(args.lists)
        if not text.lstrip().startswith("{"):
            raise UsageError("a graph is required unless --lists is a witness JSON file")
        data = json.loads(text)
        if "graph" not in data:
            raise UsageError("witness JSON needs a 'graph' key")
        G = _graph_from_json(data)
        L = ListAssignment.from_dict(G, data["lists"])
        b = data.get("b")
    else:
        G = _load_graph(args)
        L, b = _load_lists(args, G)
    b = args.b or b or 2
    phi = FastSolver(G, b).solve(L.lists)
    if phi is None:
        _emit(args, {"result": "NONE", "b": b}, "NONE")
        return 1
    errs = validate_coloring(G, L, b, phi)
    if errs:
        raise ColoringError("solver produced an invalid colouring: " + "; ".join(errs))
    text = "\n".join(f"{G.labels[v]}: {fmt_set(phi[v])}" for v in range(G.n))
    _emit(args, {"result": "COLORING", "b": b, **coloring_json(G, phi)}, text)
    return 0


def cmd_verify(args) -> int:
    G = _load_graph(args)
    a, b = args.a or 4, args.b or 2
    cert = verify_choosable(G, a, b, args.pot_bound, _workers(args), args.method)
    text = f"{cert.verdict} (a={a}, b={b}, pot<={args.pot_bound}, {cert.checked} assignments, {cert.method})"
    if cert.counterexample is not None:
        text += "\n" + format_lists(G, cert.counterexample)
    _emit(args, cert.to_json(), text)
    return 0 if cert.choosable else 1


def cmd_enumerate_flat(args) -> int:
    G = _load_graph(args)
    a = args.a or 4
    census = enumerate_flat(G, a, args.pot_bound, _workers(args))
    lines = []
    for L in census.representatives:
        lines.append(f"pot {L.pot_size()}: " + " ".join(f"{G.labels[v]}={fmt_set(L[v])}" for v in range(G.n)))
    _emit(args, census.to_json(), "\n".join(lines) or "no flat assignments")
    return 0


def cmd_census(args) -> int:
    G = _load_graph(args)
    a = args.a or 4
    census = enumerate_flat(G, a, args.pot_bound, _workers(args))
    counts = {str(k): v for k, v in sorted(census.counts.items(), reverse=True)}
    text = "\n".join(f"pot {k}: {v}" for k, v in counts.items())
    text += f"\ntotal: {sum(census.counts.values())}"
    status = 0
    data = {"counts": counts, "total": sum(census.counts.values()), "a": a, "pot_bound": args.pot_bound}
    if args.expect:
        try:
            want = {int(k): int(v) for k, v in json.loads(args.expect).items()}
        except (ValueError, AttributeError):
            raise UsageError("--expect must be a JSON object like '{\"6\": 1}'") from None
        match = want == census.counts
        data["expected"] = {str(k): v for k, v in sorted(want.items(), reverse=True)}
        data["match"] = match
        text += "\n" + ("matches expected counts" if match else "DIFFERS from expected counts")
        status = 0 if match else 1
    _emit(args, data, text)
    return status


def cmd_forcing(args) -> int:
    G = _load_graph(args)
    b = args.b or 2
    if args.lists:
        if args.vertex is None:
            raise UsageError("--vertex is required with --lists")
        L, lb = _load_lists(args, G)
        b = args.b or lb or 2
        rep = forcing_analysis(G, L, b, G.index(args.vertex))
        data = {
            "vertex": args.vertex,
            "list": colors_of(rep.list_mask),
            "shape": rep.shape,
            "allowed": [fmt_set(S) for S in rep.allowed],
            "forbidden": [fmt_set(S) for S in rep.forbidden],
        }
        _emit(args, data, f"{args.vertex}: {rep.describe()}")
        return 0 if rep.allowed else 1
    a = args.a or 4
    rep = verify_forcing_claims(G, a, b, args.min_allowed, args.shared_forbidden,
                                args.opposite_trichotomy, args.pot_bound)
    data = {"assignments": rep.assignments, "checks": rep.checks, "holds": rep.holds,
            "min_allowed": rep.min_allowed, "violations": rep.violations}
    text = (f"{rep.assignments} assignments, {rep.checks} vertex checks: "
            + ("claims hold" if rep.holds else f"{len(rep.violations)} violations"))
    text += "".join("\n  " + v for v in rep.violations[:20])
    _emit(args, data, text)
    return 0 if rep.holds else 1


def cmd_witness(args) -> int:
    if args.figure:
        e = load_entry(args.figure)
        data = {"graph": [[e.graph.labels[u], e.graph.labels[w]] for u, w in e.graph.edges()],
                "vertices": list(e.graph.labels), "lists": e.lists.to_dict(e.graph), "b": 2,
                "provenance": [f"catalogue entry {e.id}"]}
        _emit(args, data, format_lists(e.graph, e.lists))
        return 0
    if not args.auto:
        raise UsageError("witness needs --auto (with a graph) or --figure NAME")
    G = _load_graph(args)
    res = classify_42(G)
    if res.choosable:
        _emit(args, {"verdict": res.verdict, "case": res.case},
              f"graph is (4:2)-choosable (case {res.case}); no witness exists")
        return 1
    bundle = witness_for(G, res)
    text = format_lists(G, bundle.lists) + "".join(f"# {p}\n" for p in bundle.provenance)
    _emit(args, bundle.to_json(), text)
    return 0


def cmd_construct(args) -> int:
    m = args.m
    if not 1 <= m <= MAX_CONSTRUCTION_M:
        raise UsageError(f"--m must be between 1 and {MAX_CONSTRUCTION_M}")
    G, L = construct_non_2mm(m)
    refuted = FastSolver(G, m).solve(L.lists) is None
    hub = [fmt_set(S) for S in blocked_hub_colorings(m)]
    data = {"m": m, "graph": [[G.labels[u], G.labels[w]] for u, w in G.edges()], "refuted": refuted,
            "blocked_by_gadget": hub, **lists_json(G, L, m)}
    text = (f"{G.n} vertices, {G.m} edges; gadget blocks {' '.join(hub)} at the hub; "
            + ("no m-fold colouring" if refuted else "COLOURABLE"))
    _emit(args, data, text)
    return 0 if refuted else 1


def cmd_catalogue_check(args) -> int:
    rep = verify_catalogue()
    data = {"ok": rep.ok, "entries": [r.__dict__ for r in rep.results]}
    _emit(args, json.loads(json.dumps(data, default=str)), "\n".join(rep.lines()))
    return 0 if rep.ok else 1


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "enumerate-flat": cmd_enumerate_flat,
    "census": cmd_census,
    "forcing": cmd_forcing,
    "witness": cmd_witness,
    "construct": cmd_construct,
    "catalogue-check": cmd_catalogue_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", metavar="FILE", help="edge list ('u v' per line) or witness JSON")
    common.add_argument("--named", metavar="SPEC", help='named graph, e.g. "theta(2,2,4)" or "K(2,3)"')
    common.add_argument("--lists", metavar="FILE", help="list assignment ('v: 1 2 3 4' lines or JSON)")
    common.add_argument("--a", type=int, help="list size (default 4)")
    common.add_argument("--b", type=int, help="colours per vertex (default 2)")
    common.add_argument("--pot-bound", type=int, default=8, help="largest number of colours in total")
    common.add_argument("--workers", type=int, help="worker processes (default CHOOSEKIT_WORKERS or 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised commands")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="choosekit", description="(a:b)-choosability toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="decide (4:2)-choosability from the core")
    sub.add_parser("solve", parents=[common], help="find a b-fold list colouring")
    v = sub.add_parser("verify", parents=[common], help="check all flat assignments up to a pot bound")
    v.add_argument("--method", choices=("auto", "direct", "split"), default="auto")
    sub.add_parser("enumerate-flat", parents=[common], help="list flat assignments up to isomorphism")
    c = sub.add_parser("census", parents=[common], help="count flat assignments by pot size")
    c.add_argument("--expect", metavar="JSON", help='expected counts, e.g. \'{"6": 1, "5": 2}\'')
    f = sub.add_parser("forcing", parents=[common], help="forcing at one vertex, or claims over all flat assignments")
    f.add_argument("--vertex", help="vertex to analyse (with --lists)")
    f.add_argument("--min-allowed", type=int, default=4, help="every vertex must keep this many colourings")
    f.add_argument("--shared-forbidden", action="store_true",
                   help="with exactly two forbidden colourings, they must share a colour")
    f.add_argument("--opposite-trichotomy", action="store_true", help="check the 4-cycle opposite-vertex rule")
    w = sub.add_parser("witness", parents=[common], help="bad assignment from an obstruction or the catalogue")
    w.add_argument("--auto", action="store_true", help="locate an obstruction and lift its assignment")
    w.add_argument("--figure", metavar="NAME", help="print a catalogue entry")
    k = sub.add_parser("construct", parents=[common], help="bipartite graph that is not (2m:m)-choosable")
    k.add_argument("--m", type=int, default=1)
    sub.add_parser("catalogue-check", parents=[common], help="re-verify every catalogue entry")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        _check_ab(args)
        if args.pot_bound < 1:
            raise UsageError("--pot-bound must be positive")
        if args.workers is not None and args.workers < 1:
            raise UsageError("--workers must be positive")
        return COMMANDS[args.command](args)
    except (UsageError, GraphError, ColoringError, WitnessError, ClassificationError,
            json.JSONDecodeError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"choosekit: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
