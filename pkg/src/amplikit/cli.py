"""Command-line interface: ``amplikit <group> <command> [flags]``.

Exit codes: 0 ok, 1 a verification failed, 2 usage or input error.
Output is deterministic for fixed flags; ``--json`` switches to JSON.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import amplituhedron as amp
from . import cells
from . import chords as ch
from . import domino as dom
from . import functionary as fn
from . import plabic as pl
from . import seeds as sd
from .exact import positive_Z, same_rowspan


class UsageError(Exception):
    pass


class Failure(Exception):
    """A verification failed; the payload is printed as the witness."""

    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


# ---------------------------------------------------------------- input helpers


def parse_chords(text: str) -> list:
    out = []
    for part in filter(None, (p.strip() for p in (text or "").split(";"))):
        idx = [fn.parse_label(t) for t in part.replace(" ", ",").split(",") if t]
        if len(idx) != 4:
            raise UsageError(f"a chord needs 4 markers, got {part!r}")
        out.append(idx)
    return out


def diagram_from(args) -> ch.ChordDiagram:
    if args.n is None:
        raise UsageError("--n is required")
    D = ch.ChordDiagram(range(1, args.n + 1), parse_chords(args.chords))
    errs = ch.validate_diagram(D)
    if errs:
        raise UsageError("invalid chord diagram: " + "; ".join(errs))
    return D


def load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def recipe_from(args) -> cells.Recipe:
    if getattr(args, "recipe", None):
        try:
            return cells.Recipe.from_json(load_json(args.recipe))
        except (KeyError, ValueError) as e:
            raise UsageError(f"bad recipe: {e}") from e
    return cells.recipe_from_diagram(diagram_from(args))


def graph_from(args) -> pl.PlabicGraph:
    if args.graph:
        try:
            return pl.PlabicGraph.from_json(load_json(args.graph))
        except (KeyError, ValueError) as e:
            raise UsageError(f"bad plabic graph: {e}") from e
    if args.chords is not None and args.n is not None:
        return pl.recipe_graph(recipe_from(args))
    return pl.example_top_cell_2_5()


def matrix_json(M) -> list:
    return [[str(x) for x in row] for row in M.rows]


def matrix_text(M) -> str:
    return "\n".join("  ".join(str(x) for x in row) for row in M.rows)


def diagram_text(D: ch.ChordDiagram) -> str:
    return " ".join("(" + ",".join(map(str, c)) + ")" for c in D.chords) or "()"


# ---------------------------------------------------------------- commands


def cmd_chords_enum(args):
    Ds = ch.enumerate_diagrams(args.n, args.k)
    if args.json:
        return {"n": args.n, "k": args.k, "count": len(Ds), "diagrams": [D.to_json() for D in Ds]}
    lines = [diagram_text(D) for D in Ds]
    return "\n".join(lines + [f"# {len(Ds)} diagrams"])


def cmd_chords_relations(args):
    D = diagram_from(args)
    R = ch.chord_relations(D)
    data = R.to_json()
    if args.json:
        return {"diagram": D.to_json(), "relations": data}
    return "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in data.items())


def cmd_plabic_trip(args):
    G = graph_from(args)
    pi = pl.trip_permutation(G)
    return pi.to_json() if args.json else str(pi)


def cmd_plabic_positroid(args):
    G = graph_from(args)
    P = pl.positroid_of_graph(G)
    if args.json:
        return P.to_json()
    return "\n".join([f"k={P.k} bases={len(P.bases)}"] + [" ".join(map(str, b)) for b in sorted(P.bases)])


def cmd_plabic_move(args):
    G = graph_from(args)
    before = pl.trip_permutation(G)
    rng = random.Random(f"amplikit:cli-move:{args.seed}")
    for _ in range(args.count):
        G = pl.random_move(G, rng)
    after = pl.trip_permutation(G)
    out = {"moves": args.count, "trip_before": str(before), "trip_after": str(after),
           "preserved": before == after, "graph": G.to_json()}
    if before != after:
        raise Failure("trip permutation changed under moves", out)
    return out if args.json else f"{args.count} moves; trip permutation {after} preserved"


def cmd_cells_enum(args):
    found = cells.enumerate_general_cells(args.n, args.k)
    if args.json:
        return {"n": args.n, "k": args.k, "count": len(found),
                "cells": [{"key": [list(b) for b in key] if isinstance(key, tuple) else key,
                           "recipe": r.to_json()} for key, (_, r) in found.items()]}
    lines = [str(r) for _, (_, r) in found.items()]
    return "\n".join(lines + [f"# {len(found)} cells"])


def cmd_cells_count(args):
    c = len(cells.enumerate_general_cells(args.n, args.k))
    return {"n": args.n, "k": args.k, "count": c} if args.json else str(c)


def cmd_cells_matrix(args):
    r = recipe_from(args)
    params = cells.random_parameters(r.k, args.seed)
    M = cells.bcfw_matrix(r, params)
    if args.json:
        return {"recipe": r.to_json(), "params": [[str(x) for x in z] for z in params], "matrix": matrix_json(M),
                "labels": list(M.labels)}
    return matrix_text(M)


def cmd_tile_functionaries(args):
    r = recipe_from(args)
    T = amp.TileSpec.of(r)
    names = amp.parameter_names(T.k)
    if args.json:
        return {nm: f.pretty() for nm, f in zip(names, T.functionaries)}
    return "\n".join(f"{nm} = {f.pretty()}" for nm, f in zip(names, T.functionaries))


def _sample_Y(r, args):
    n = len(r.markers)
    Z = positive_Z(n, r.k + 4, args.seed)
    if getattr(args, "top", False):
        C = amp.spread_top_cell_C(r.k, n, args.seed)
    else:
        C = cells.cell_point(r, args.seed)
    return C, Z


def cmd_tile_membership(args):
    r = recipe_from(args)
    T = amp.TileSpec.of(r)
    C, Z = _sample_Y(r, args)
    m = amp.tile_membership(C @ Z, Z, T)
    out = {"interior": m.interior, "witness": m.witness,
           "value": None if m.value is None else str(m.value), "reason": m.reason,
           "source": "top cell" if args.top else "tile"}
    if args.json:
        return out
    return "interior" if m.interior else f"not interior: {m.witness} {m.reason} {out['value'] or ''}".rstrip()


def cmd_tile_invert(args):
    r = recipe_from(args)
    T = amp.TileSpec.of(r)
    C, Z = _sample_Y(r, args)
    Y = C @ Z
    try:
        M = amp.invert_tile(Y, Z, T)
    except ValueError as e:
        raise Failure(str(e), {"point": matrix_json(C)})
    ok = same_rowspan(M, C)
    out = {"roundtrip": ok, "twistor_matrix": matrix_json(M), "C": matrix_json(C)}
    if not ok:
        raise Failure("twistor matrix does not reproduce the sampled point", out)
    return out if args.json else "roundtrip ok\n" + matrix_text(M)


def cmd_tile_dominoes(args):
    D = diagram_from(args)
    vs = dom.domino_variables(D, args.mode)
    mut, _ = dom.partition_mutable_frozen(D)
    if args.json:
        return [{"name": v.name, "expr": v.pretty(), "mutable": (v.family, v.index) in mut} for v in vs]
    return "\n".join(f"{v.name}{'*' if (v.family, v.index) in mut else ''} = {v.pretty()}" for v in vs)


def cmd_tile_signs(args):
    D = diagram_from(args)
    pred = dom.domino_signs(D)
    P = sd.Panel.tile(D, args.samples, args.seed)
    rows, bad = [], []
    for v in dom.domino_variables(D):
        got = P.values(v.expr).signs()
        want = pred[(v.family, v.index)]
        ok = all(g == want for g in got)
        rows.append({"name": v.name, "predicted": want, "sampled": sorted(set(got)), "ok": ok})
        if not ok:
            bad.append(v.name)
    out = {"samples": args.samples, "signs": rows, "negative": [r["name"] for r in rows if r["predicted"] < 0]}
    if bad:
        raise Failure(f"sign mismatch at {', '.join(bad)}", out)
    if args.json:
        return out
    return "\n".join(f"{r['name']} {'+' if r['predicted'] > 0 else '-'}" for r in rows)


def _seed_for(args):
    if args.rectangles:
        k, n = args.rectangles
        return sd.rectangles_seed(k, n), None
    D = diagram_from(args)
    return sd.build_sigma_D(D, seed=args.seed), D


def cmd_seed_build(args):
    S, _ = _seed_for(args)
    data = S.to_json()
    if args.json:
        return data
    lines = [f"{v['vertex']}{'' if v['frozen'] else '*'} {v.get('sign', '')} {v['label']}".replace("  ", " ")
             for v in data["vertices"]]
    names = [v["vertex"] for v in data["vertices"]]
    lines += [f"{names[i]} -> {names[j]}" + (f" x{m}" if m > 1 else "") for i, j, m in data["arrows"]]
    return "\n".join(lines)


def cmd_seed_dot(args):
    S, _ = _seed_for(args)
    return S.to_dot()


def cmd_seed_verify(args):
    if args.rectangles:
        k, n = args.rectangles
        S = sd.rectangles_seed(k, n)
        res = {"shift+1": sd.check_shifted(sd.cyc_mutation_sequence(S, 1), k, n, 1),
               "shift-1": sd.check_shifted(sd.cyc_mutation_sequence(S, -1), k, n, -1)}
        out = {k_: [sd._vname(v) if v != "frozen" else v for v in bad] for k_, bad in res.items()}
        if any(out.values()):
            raise Failure("cyclic shift mismatch", out)
        return out if args.json else "cyclic mutation sequences ok"
    if args.chords is None and args.n is not None:
        Ds = [D for k in range(0, args.n - 3) for D in ch.enumerate_diagrams(args.n, k)]
    else:
        Ds = [diagram_from(args)]
    report, failed = [], False
    for D in Ds:
        S = sd.build_sigma_D(D, extras=False, seed=args.seed)
        viol = [sd._vname(v) for v in S.violations()]
        checks = sd.check_exchange_relations(D, S.panel, args.seed)
        rng = random.Random(f"amplikit:cli-seed:{args.seed}:{D}")
        mut_bad = []
        for t in range(args.mutations):
            T, seq = sd.random_mutations(S, args.length, rng)
            if T.violations():
                mut_bad.append([sd._vname(v) for v in seq])
        item = {"diagram": diagram_text(D), "signed": not viol, "violations": viol,
                "relations": [{"vertex": sd._vname(c.vertex), "case": c.case, "ok": c.ok} for c in checks],
                "mutation_failures": mut_bad}
        failed |= bool(viol or mut_bad or not all(c.ok for c in checks))
        report.append(item)
    if failed:
        raise Failure("seed verification failed", report)
    if args.json:
        return report
    nrel = sum(len(r["relations"]) for r in report)
    return f"{len(report)} diagrams, {nrel} exchange relations ok, signed seeds preserved under mutation"


def _collections(args):
    return amp.enumerate_bcfw_collections(args.n, args.k)


def cmd_tilings_enum(args):
    cols = _collections(args)
    if args.json:
        return {"n": args.n, "k": args.k, "count": len(cols), "collections": [c.to_json() for c in cols]}
    lines = []
    for i, c in enumerate(cols):
        lines.append(f"[{i}] " + " | ".join(str(cell.recipe) for cell in c.cells))
    return "\n".join(lines + [f"# {len(cols)} collections"])


def cmd_tilings_count(args):
    c = amp.enumerate_bcfw_collections(args.n, args.k, mode="count")
    return {"n": args.n, "k": args.k, "count": c} if args.json else str(c)


def cmd_tilings_verify(args):
    cols = _collections(args)
    idx = range(len(cols)) if args.all else [args.index]
    reports = []
    for i in idx:
        if not 0 <= i < len(cols):
            raise UsageError(f"collection index {i} out of range (0..{len(cols) - 1})")
        rep = amp.verify_tiling(cols[i], samples=args.samples, seed=args.seed, threads=args.threads)
        d = rep.to_json()
        d.pop("seconds", None)
        d["index"] = i
        reports.append(d)
    if not all(d["ok"] for d in reports):
        raise Failure("tiling check failed", reports)
    if args.json:
        return reports
    return "\n".join(f"[{d['index']}] ok: {d['tiles']} tiles, {d['samples']} samples per check" for d in reports)


def cmd_panel_run(args):
    try:
        lhs, rhs = _parse_expr(args.lhs), _parse_expr(args.rhs)
    except (fn.FunctionaryError, ValueError, IndexError) as e:
        raise UsageError(f"cannot parse expression: {e}") from e
    labels = sorted({i for e in (lhs, rhs) for x in fn.walk(e) if isinstance(x, fn.Tw) for i in x.I})
    n = max(args.n or 0, max(labels, default=4))
    P = sd.Panel.positive(range(1, n + 1), 4, args.size, args.seed)
    ok = sd.verify_identity_on_panel(lhs, rhs, P)
    out = {"equal": ok, "lhs": lhs.pretty(), "rhs": rhs.pretty(), "points": args.size}
    if not ok:
        raise Failure("expressions differ on the panel", out)
    return out if args.json else "equal on the panel"


def _parse_expr(text: str) -> fn.Expr:
    """S-expression, or a sum of products of chains such as "<1 2 3 4>*<1 2 5 6> + -<1 2 3 6>"."""
    text = text.strip()
    if text.startswith("("):
        return fn.parse_sexpr(text)
    terms = []
    for t in text.split("+"):
        t = t.strip()
        sign = -1 if t.startswith("-") else 1
        e = fn.mul(*[fn.chain(f.strip()) for f in t.lstrip("-").split("*")])
        terms.append(e if sign > 0 else fn.neg(e))
    return fn.add(*terms)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amplikit", description="BCFW cells, tiles and cluster seeds for m=4.")
    p.add_argument("--threads", type=int, default=None, help="worker threads (also AMPLIKIT_THREADS)")
    groups = p.add_subparsers(dest="group", required=True)

    def command(group, name, func, helptext, *flags):
        c = group.add_parser(name, help=helptext)
        c.set_defaults(func=func)
        c.add_argument("--json", action="store_true", help="JSON output")
        c.add_argument("--seed", type=int, default=0)
        for f in flags:
            f(c)
        return c

    def nk(c):
        c.add_argument("--n", type=int, required=True)
        c.add_argument("--k", type=int, required=True)

    def diagram(c):
        c.add_argument("--n", type=int)
        c.add_argument("--chords", default=None, help='chords as "a,b,c,d;a,b,c,d" on markers 1..n')

    def recipe(c):
        diagram(c)
        c.add_argument("--recipe", help="recipe JSON file (default: standard recipe of --chords)")

    def graph(c):
        diagram(c)
        c.add_argument("--graph", help="plabic graph JSON file (default: the Gr(2,5) example)")

    def top(c):
        c.add_argument("--top", action="store_true", help="sample Y from the top cell instead of the tile")

    def seedsrc(c):
        diagram(c)
        c.add_argument("--rectangles", type=int, nargs=2, metavar=("K", "N"), help="use the rectangles seed")

    g = groups.add_parser("chords").add_subparsers(dest="cmd", required=True)
    command(g, "enum", cmd_chords_enum, "list chord diagrams", nk)
    command(g, "relations", cmd_chords_relations, "relations among the chords", diagram)

    g = groups.add_parser("plabic").add_subparsers(dest="cmd", required=True)
    command(g, "trip", cmd_plabic_trip, "trip permutation", graph)
    command(g, "positroid", cmd_plabic_positroid, "positroid from perfect orientations", graph)
    command(g, "move", cmd_plabic_move, "random moves; checks the trip permutation", graph,
            lambda c: c.add_argument("--count", type=int, default=10))

    g = groups.add_parser("cells").add_subparsers(dest="cmd", required=True)
    command(g, "enum", cmd_cells_enum, "general BCFW cells", nk)
    command(g, "count", cmd_cells_count, "number of general BCFW cells", nk)
    command(g, "matrix", cmd_cells_matrix, "BCFW matrix at random parameters", recipe)

    g = groups.add_parser("tile").add_subparsers(dest="cmd", required=True)
    command(g, "functionaries", cmd_tile_functionaries, "coordinate functionaries", recipe)
    command(g, "membership", cmd_tile_membership, "membership of a sampled point", recipe, top)
    command(g, "invert", cmd_tile_invert, "invert a sampled tile point", recipe)
    command(g, "dominoes", cmd_tile_dominoes, "domino variables of a standard tile", diagram,
            lambda c: c.add_argument("--mode", choices=["closed_form", "recursive"], default="closed_form"))
    command(g, "signs", cmd_tile_signs, "predicted vs sampled domino signs", diagram,
            lambda c: c.add_argument("--samples", type=int, default=20))

    g = groups.add_parser("seed").add_subparsers(dest="cmd", required=True)
    command(g, "build", cmd_seed_build, "seed of a standard tile (or rectangles seed)", seedsrc)
    command(g, "verify", cmd_seed_verify, "signed-seed and exchange-relation checks", seedsrc,
            lambda c: c.add_argument("--mutations", type=int, default=50),
            lambda c: c.add_argument("--length", type=int, default=5))
    command(g, "dot", cmd_seed_dot, "DOT export of the quiver", seedsrc)

    g = groups.add_parser("tilings").add_subparsers(dest="cmd", required=True)
    command(g, "enum", cmd_tilings_enum, "BCFW collections", nk)
    command(g, "count", cmd_tilings_count, "number of BCFW collections", nk)
    command(g, "verify", cmd_tilings_verify, "Monte Carlo tiling check", nk,
            lambda c: c.add_argument("--samples", type=int, default=100),
            lambda c: c.add_argument("--index", type=int, default=0),
            lambda c: c.add_argument("--all", action="store_true"))

    g = groups.add_parser("panel").add_subparsers(dest="cmd", required=True)
    command(g, "run", cmd_panel_run, "compare two bracket expressions on a panel",
            lambda c: c.add_argument("lhs"), lambda c: c.add_argument("rhs"),
            lambda c: c.add_argument("--n", type=int, default=None),
            lambda c: c.add_argument("--size", type=int, default=12))
    return p


def emit(result, as_json: bool, stream=None):
    stream = stream or sys.stdout
    if result is None:
        return
    if as_json or not isinstance(result, str):
        stream.write(json.dumps(result, indent=2, sort_keys=True, default=str) + "\n")
    else:
        stream.write(result + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads is not None:
        os.environ["AMPLIKIT_THREADS"] = str(args.threads)
    try:
        emit(args.func(args), args.json)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"amplikit: error: {e}\n")
        return 2
    except Failure as e:
        sys.stderr.write(f"amplikit: verification failed: {e}\n")
        emit(e.payload, True)
        return 1
    except (ValueError, sd.SeedError) as e:
        sys.stderr.write(f"amplikit: error: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
