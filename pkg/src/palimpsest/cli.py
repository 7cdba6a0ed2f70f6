"""Command-line front end.

Every command prints JSON (or a table / CSV) on stdout.  Exit codes: 0 ok,
2 bad input, 3 size cap hit, 4 infeasible embedding.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .block_typicality import TypicalityConfig, theorem5_check, typicality_graph
from .code_schemes import (block_huffman, code_from_json, embedding_code, huffman,
                           huffman_family, identity_code, incremental_code, ppm_code)
from .edit_metrics import KINDS, EditMetric
from .embedding import verify_embedding
from .errors import InfeasibleEmbedding, InputError, ResourceError
from .evaluator import evaluate_exact, evaluate_mc, format_number, malleability_lower_bound
from .graph_core import (adjacency_graph, format_vertex, hypercube, levenshtein_graph,
                         to_edge_list)
from .prob_core import (balanced_t, conditional_entropy, entropy, joint_entropy, marginals,
                        product_distribution, rate_frontier, relative_entropy, stationary,
                        tilted_distribution)
from .sources import load_source

DEFAULT_METRIC = {"identity": "hamming", "ppm": "hamming", "huffman": "levenshtein",
                  "incremental": "extended_hamming"}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (Fraction, float, int)):
        if isinstance(v, int) and not isinstance(v, bool):
            return v
        return format_number(v)
    if hasattr(v, "item"):
        return _jsonable(v.item())
    return str(v)


def _emit(doc, out) -> None:
    out.write(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


def _write_codebook(code, path) -> None:
    Path(path).write_text(json.dumps(code.to_json(), indent=2, sort_keys=True) + "\n")


# -- commands -------------------------------------------------------------------

def cmd_info(args, out) -> None:
    src = load_source(args.file)
    px, py = marginals(src)
    doc = {
        "alphabet": list(src.source_alphabet),
        "storage_alphabet_size": src.storage_alphabet_size,
        "exact": src.exact,
        "H_X": entropy(px), "H_Y": entropy(py),
        "H_Y_given_X": conditional_entropy(src), "H_XY": joint_entropy(src),
        "D_X_Y": relative_entropy(px, py), "D_Y_X": relative_entropy(py, px),
        "stationary": stationary(src),
        "pr_change": 1 - src.diagonal_mass(),
        "malleability_bound": {str(n): malleability_lower_bound(src, n)
                               for n in range(1, args.max_n + 1)},
    }
    if args.json:
        _emit(doc, out)
        return
    out.write("quantity\tvalue\n")
    for key in ("H_X", "H_Y", "H_Y_given_X", "H_XY", "D_X_Y", "D_Y_X", "stationary", "pr_change"):
        v = _jsonable(doc[key])
        out.write(f"{key}\t{v}\n")
    for n, b in doc["malleability_bound"].items():
        out.write(f"bound_n{n}\t{_jsonable(b)}\n")


def _build_scheme(args, src):
    n = args.n
    if args.scheme == "identity":
        c = identity_code(src, n)
        return c, c
    if args.scheme == "ppm":
        c = ppm_code(src, n, typical_only=args.typical_only,
                     delta=None if args.delta == "auto" else args.delta)
        return c, c
    if args.scheme == "huffman":
        px, py = marginals(src)
        if args.design == "balanced":
            if stationary(src):
                d = px
            else:
                d = tilted_distribution(px, py, balanced_t(px, py))
            c = huffman(product_distribution(d, n), src.storage_alphabet_size)
        else:
            c = block_huffman(src, n, args.design)
        return c, c
    if args.scheme == "incremental":
        return incremental_code(src, n)
    raise InputError(f"unknown scheme {args.scheme!r}")


def _evaluate(args, src, cx, cy, metric):
    if args.mc:
        return evaluate_mc(src, cx, cy, metric, args.mc, args.seed)
    return evaluate_exact(src, cx, cy, metric)


def cmd_scheme(args, out) -> None:
    src = load_source(args.file)
    metric = EditMetric(args.metric or DEFAULT_METRIC[args.scheme], src.storage_alphabet_size)
    cx, cy = _build_scheme(args, src)
    triple = _evaluate(args, src, cx, cy, metric)
    doc = {"scheme": args.scheme, "n": args.n, "metric": metric.kind, "seed": args.seed,
           "lower_bound": malleability_lower_bound(src, args.n)}
    doc.update(triple.to_json())
    if args.codebook_out:
        _write_codebook(cy, args.codebook_out)
    _emit(doc, out)


def _parse_host(spec: str, alphabet_size: int):
    kind, _, arg = spec.partition(":")
    try:
        size = int(arg)
    except ValueError:
        raise InputError(f"bad host {spec!r}; use hypercube:m or levgraph:maxlen") from None
    if kind == "hypercube":
        if alphabet_size != 2:
            raise InputError("hypercube hosts need a binary storage alphabet")
        return hypercube(size), "hamming"
    if kind == "levgraph":
        return levenshtein_graph(alphabet_size, size), "levenshtein"
    raise InputError(f"unknown host kind {kind!r}")


def cmd_embed(args, out) -> None:
    src = load_source(args.file)
    host, default_metric = _parse_host(args.host, src.storage_alphabet_size)
    metric = EditMetric(args.metric or default_metric, src.storage_alphabet_size)
    if args.labels == "fixed":
        family = "fixed"
    else:
        px, _ = marginals(src)
        family = huffman_family(product_distribution(px, args.n), src.storage_alphabet_size)
    code, res = embedding_code(src, args.n, host, family, node_budget=args.node_budget)
    guest = adjacency_graph(src, args.n)
    triple = evaluate_exact(src, code, code, metric)
    doc = {
        "host": args.host, "n": args.n, "labels": args.labels, "metric": metric.kind,
        "rho": res.cost,
        "deleted_edges": [[format_vertex(u), format_vertex(v), w] for u, v, w in
                          (e if len(e) == 3 else (*e, guest.weight(*e)) for e in res.deleted_edges)],
        "proven_optimal": res.proven_optimal,
        "search_nodes": res.nodes,
        "verified": verify_embedding(guest, host, res),
        "lower_bound": malleability_lower_bound(src, args.n),
        "codebook": code.to_json()["codebook"],
    }
    if not isinstance(family, str):
        doc["family_size"] = len(family)
        doc["family_truncated"] = family.truncated
    doc.update(triple.to_json())
    if args.codebook_out:
        _write_codebook(code, args.codebook_out)
    if args.figure:
        from .plotting import embedding_figure
        embedding_figure(guest, host, res.vertex_map, res.deleted_edges, args.figure)
    _emit(doc, out)


def cmd_frontier(args, out) -> None:
    src = load_source(args.file)
    px, py = marginals(src)
    base = src.storage_alphabet_size
    hx, hy = entropy(px, base), entropy(py, base)
    points = rate_frontier(src, args.grid)
    if args.out == "svg":
        from .plotting import frontier_figure
        if args.output:
            frontier_figure(points, hx, hy, args.output)
        else:
            buf = io.StringIO()
            frontier_figure(points, hx, hy, buf)
            out.write(buf.getvalue())
        return
    target = open(args.output, "w", newline="") if args.output else out
    try:
        w = csv.writer(target, lineterminator="\n")
        w.writerow(["t", "K_loss", "L_loss", "K", "L"])
        for p in points:
            w.writerow([_jsonable(p.t), _jsonable(float(p.K_loss)), _jsonable(float(p.L_loss)),
                        _jsonable(hx + p.K_loss), _jsonable(hy + p.L_loss)])
    finally:
        if args.output:
            target.close()


def cmd_block(args, out) -> None:
    src = load_source(args.file)
    delta = args.delta if args.delta == "auto" else _parse_delta(args.delta)
    cfg = TypicalityConfig(args.n, delta, args.omega, args.c)
    g, rep = typicality_graph(src, cfg)
    if args.nK is not None:
        rep["theorem5"] = theorem5_check(src, cfg, args.nK, g)
    if args.graph_out:
        Path(args.graph_out).write_text(to_edge_list(g, src.storage_alphabet_size))
    _emit(rep, out)


def _parse_delta(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad delta {text!r}") from None


def cmd_evaluate(args, out) -> None:
    src = load_source(args.file)
    try:
        doc_x = json.loads(Path(args.codebook).read_text())
        doc_y = json.loads(Path(args.codebook_y).read_text()) if args.codebook_y else None
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"codebook: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    cy = code_from_json(doc_y if doc_y else doc_x, src)
    cx = cy.base if hasattr(cy, "increments") else cy
    if doc_y:
        cx = code_from_json(doc_x, src)
    metric = EditMetric(args.metric, src.storage_alphabet_size)
    triple = _evaluate(args, src, cx, cy, metric)
    doc = {"metric": metric.kind, "n": cx.block_n, "seed": args.seed,
           "lower_bound": malleability_lower_bound(src, cx.block_n)}
    doc.update(triple.to_json())
    _emit(doc, out)


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="palimpsest",
                                description="Rate and malleability of codes for editable storage.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="information measures and malleability bounds")
    s.add_argument("file")
    s.add_argument("--max-n", type=int, default=4)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("scheme", help="evaluate a standard coding scheme")
    s.add_argument("file")
    s.add_argument("--scheme", required=True, choices=["identity", "huffman", "incremental", "ppm"])
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--metric", choices=KINDS)
    s.add_argument("--design", choices=["x", "y", "balanced"], default="x",
                   help="distribution the Huffman code is designed for")
    s.add_argument("--typical-only", action="store_true", help="PPM: codewords for typical blocks only")
    s.add_argument("--delta", default="auto")
    s.add_argument("--mc", type=int, default=0, help="Monte Carlo sample count (0 = exact)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--codebook-out")
    s.set_defaults(func=cmd_scheme)

    s = sub.add_parser("embed", help="codes from graph embedding")
    s.add_argument("file")
    s.add_argument("--host", required=True, help="hypercube:m or levgraph:maxlen")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--labels", choices=["fixed", "huffman-family"], default="fixed")
    s.add_argument("--metric", choices=KINDS)
    s.add_argument("--node-budget", type=int, default=50_000,
                   help="search nodes before giving up on proving optimality")
    s.add_argument("--figure", help="write an SVG drawing of the embedding")
    s.add_argument("--codebook-out")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("frontier", help="K-L pairs of codes designed along the tilted family")
    s.add_argument("file")
    s.add_argument("--grid", type=int, default=21)
    s.add_argument("--out", choices=["csv", "svg"], default="csv")
    s.add_argument("--output", help="file to write (default stdout)")
    s.set_defaults(func=cmd_frontier)

    s = sub.add_parser("block", help="joint typicality graph report")
    s.add_argument("file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", default="auto")
    s.add_argument("--omega", type=float, default=0.1)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--nK", type=int)
    s.add_argument("--graph-out")
    s.set_defaults(func=cmd_block)

    s = sub.add_parser("evaluate", help="evaluate a codebook JSON file")
    s.add_argument("file")
    s.add_argument("--codebook", required=True)
    s.add_argument("--codebook-y", help="separate codebook for the edited version")
    s.add_argument("--metric", choices=KINDS, default="hamming")
    s.add_argument("--mc", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except InfeasibleEmbedding as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
