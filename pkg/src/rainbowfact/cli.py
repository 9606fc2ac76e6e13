"""Command line front end: ``rainbowfact <group> <command> [flags]``.

Exit codes: 0 for a clean run, 1 when the input fails validation or a
check comes back negative, 2 for usage errors.  Commands that draw random
numbers require ``--seed``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import factorgen, latin, resilience, search, switching
from . import template as tpl
from .absorber import AbsorberConfig
from .graph import (ColouredGraph, ColourPartition, GraphError, load_graph, restrict,
                    verify_rainbow_cycle_all_colours, verify_rainbow_hamilton_path, verify_rainbow_path)
from .pipeline import DEFAULT_CONFIG, PipelineOptions, full_pipeline


class UsageError(Exception):
    pass


def _graph(args) -> ColouredGraph:
    if not args.inp:
        raise UsageError("--in is required")
    return load_graph(args.inp)


def _rng(args) -> random.Random:
    if args.seed is None:
        raise UsageError("--seed is required for this command")
    return random.Random(args.seed)


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)


def _config(args) -> AbsorberConfig:
    if not getattr(args, "config", None):
        return DEFAULT_CONFIG
    with open(args.config) as fh:
        d = json.load(fh)
    mode = d.get("mode", "relaxed")
    missing = [k for k in ("eps", "gamma", "eta", "mu") if k not in d]
    if missing:
        raise ValueError(f"config is missing {', '.join(missing)}")
    vals = {k: Fraction(str(d[k])) for k in ("eps", "gamma", "eta", "mu")}
    if mode == "relaxed":
        return AbsorberConfig(**vals, mode="relaxed", edge_ratio_override=Fraction(str(d.get("edge_ratio", 0))))
    return AbsorberConfig(**vals, mode=mode)


def _verdict_dict(v) -> dict:
    return {"passed": v.passed, "exact": getattr(v, "exact", getattr(v, "exhaustive", None)),
            "checked": v.checked, "witness": v.witness, "note": getattr(v, "note", "")}


# handlers return (exit code, report)

def cmd_validate(args):
    path = args.inp or args.path
    if not path:
        raise UsageError("give a graph file")
    try:
        g = load_graph(path)
    except (GraphError, OSError, ValueError) as exc:
        return 1, {"valid": False, "error": str(exc)}
    return 0, {"valid": True, "n": g.n, "colours": len(g.colours), "edges": g.num_edges(),
               "relaxed": g.relaxed, "full": g.is_full}


def cmd_gen(args):
    kind = args.kind
    if kind == "count":
        if args.n is None:
            raise UsageError("--n is required")
        t = time.perf_counter()
        c = factorgen.count_one_factorizations(args.n, args.strategy)
        return 0, {"n": args.n, "strategy": args.strategy, "count": c,
                   "seconds": round(time.perf_counter() - t, 3)}
    if args.n is None:
        raise UsageError("--n is required")
    if kind == "canonical":
        g = (factorgen.canonical_odd_colouring(args.n) if args.n % 2
             else factorgen.canonical_one_factorization(args.n))
    elif kind == "xor":
        g = factorgen.xor_factorization(args.n)
    elif kind == "sample":
        rng = _rng(args)
        if args.n <= factorgen.MAX_ENUM_N:
            g = factorgen.uniform_sample_small(args.n, rng)
            g = factorgen.random_relabelled(g, rng)
        else:
            g = switching.jm_square_walk(factorgen.canonical_one_factorization(args.n), args.steps, rng).graph
    else:
        raise UsageError(f"unknown generator {kind!r}")
    _write(args, g.to_json())
    return 0, {"n": g.n, "colours": len(g.colours), "edges": g.num_edges(), "out": args.out}


def cmd_switch(args):
    g, rng = _graph(args), _rng(args)
    if args.kind == "walk":
        if args.colours:
            # spins and rotations need missing edges, so walk on a colour subset
            g = restrict(g, [int(c) for c in args.colours.split(",")])
        names = {"spin": "spin", "rot": "rotation", "rotation": "rotation"}
        moves = [m.strip() for m in args.moves.split(",") if m.strip()]
        if not moves or any(m not in names for m in moves):
            raise UsageError(f"--moves takes spin and/or rot, got {args.moves!r}")
        res = switching.random_switch_walk(g, args.steps, rng, moves=tuple(dict.fromkeys(names[m] for m in moves)))
    else:
        res = switching.jm_square_walk(g, args.steps, rng)
    _write(args, res.graph.to_json())
    return 0, {"steps": args.steps, "accepted": res.accepted, "stalls": res.stalls, "moves": res.moves}


def cmd_check(args):
    g = _graph(args)
    rng = random.Random(args.seed) if args.seed is not None else None
    if args.sampled is not None:
        args.mode, args.samples = "sampled", args.sampled
    if args.mode == "sampled" and rng is None:
        raise UsageError("--seed is required for sampled checks")
    if args.kind == "resilience":
        v = resilience.is_locally_edge_resilient(g, args.eps, args.mode, args.budget, args.samples, rng)
    elif args.kind == "quasirandom":
        v = resilience.is_quasirandom(g, args.mode, args.budget, args.samples, rng)
    else:
        v = resilience.is_robustly_gadget_resilient(g, args.mu)
    return (0 if v.passed else 1), _verdict_dict(v)


def cmd_gadgets(args):
    g = _graph(args)
    if args.x is None or args.c is None:
        raise UsageError("--x and --c are required")
    rest = [c for c in g.colours if c != args.c]
    part = ColourPartition.equitable(rest)
    if args.kind == "enum":
        if args.partition == "auto":
            js = list(resilience.enumerate_xcp(g, args.x, args.c, part))
            dist = set(resilience.distinguishable(js))
            return 0, {"x": args.x, "c": args.c, "count": len(js), "distinguishable": len(dist),
                       "partition": [sorted(part[i]) for i in range(1, 5)],
                       "gadgets": [[j.gadget.t1, j.gadget.t2, j.gadget.a, j.gadget.b, j.gadget.d, j.gadget.e,
                                    j.gadget.c1, j.gadget.c2, j.gadget.c3, j.f_colour] for j in js]}
        gs = list(resilience.enumerate_gadgets(g, args.x, args.c))
        return 0, {"x": args.x, "c": args.c, "count": len(gs),
                   "gadgets": [[gd.t1, gd.t2, gd.a, gd.b, gd.d, gd.e, gd.c1, gd.c2, gd.c3] for gd in gs]}
    r = resilience.r_value(g, args.x, args.c, part)
    return 0, {"x": args.x, "c": args.c, "r": r.r, "saturated": len(r.saturated),
               "unsaturated": len(r.unsaturated), "supersaturated": len(r.supersaturated)}


def cmd_template(args):
    if args.kind == "build":
        rng = random.Random(args.seed) if args.seed is not None else None
        if args.strategy != "complete" and rng is None:
            raise UsageError("--seed is required for random templates")
        t = tpl.build_template(args.m, args.strategy, args.degree, rng)
        _write(args, json.dumps(t.to_dict()))
        return 0, {"m": args.m, "left": len(t.left), "right": len(t.right), "edges": len(t.edges)}
    if not args.inp:
        raise UsageError("--in is required")
    with open(args.inp) as fh:
        t = tpl.BipartiteTemplate.from_dict(json.load(fh))
    rng = random.Random(args.seed) if args.seed is not None else random.Random(0)
    v = tpl.verify_robust(t, args.budget, args.samples, rng, mode=args.mode)
    return (0 if v.passed else 1), _verdict_dict(v)


def _pipeline_report(g, args, opts) -> tuple[int, dict]:
    if args.seed is None:
        raise UsageError("--seed is required for this command")
    rep = full_pipeline(g, _config(args), args.seed, opts)
    d = rep.to_dict(timing=args.timing)
    _write(args, json.dumps(d, indent=1))
    return (0 if rep.success else 1), d


def cmd_absorb(args):
    return _pipeline_report(_graph(args), args, PipelineOptions(fallback=False))


def cmd_find(args):
    g = _graph(args)
    if args.kind == "andersen":
        r = search.exact_andersen_path(g, args.budget)
        return 0, {"status": r.status, "path": r.vertices, "nodes": r.nodes,
                   "verified": bool(r.vertices) and verify_rainbow_path(g, r.vertices)}
    if args.kind == "cycle":
        r = search.exact_all_colour_cycle(g, args.budget)
        return 0, {"status": r.status, "cycle": r.vertices, "nodes": r.nodes,
                   "verified": bool(r.vertices) and verify_rainbow_cycle_all_colours(g, r.vertices)}
    if args.heuristic:
        rng = _rng(args)
        lp = search.long_rainbow_path(g, restarts=args.restarts, seed=rng.getrandbits(32))
        ham = verify_rainbow_hamilton_path(g, lp.path)
        return 0, {"status": search.FOUND if ham else "partial", "path": lp.path,
                   "missing_vertices": lp.missing_vertices, "missing_colours": lp.missing_colours,
                   "verified": ham}
    r = search.exact_rainbow_hamilton_path(g, args.budget)
    return 0, {"status": r.status, "path": r.vertices, "nodes": r.nodes,
               "verified": bool(r.vertices) and verify_rainbow_hamilton_path(g, r.vertices)}


def _batch_one(job):
    n, seed, steps = job
    rng = random.Random(seed)
    if n <= factorgen.MAX_ENUM_N and n % 2 == 0:
        g = factorgen.uniform_sample_small(n, rng)
    elif n % 2 == 0:
        g = switching.jm_square_walk(factorgen.canonical_one_factorization(n), steps, rng).graph
    else:
        g = factorgen.even_to_odd(switching.jm_square_walk(
            factorgen.odd_to_even(factorgen.canonical_odd_colouring(n)), steps, rng).graph)
    rep = full_pipeline(g, seed=seed)
    return {"seed": seed, "success": rep.success, "method": rep.method,
            "exact_none": any(s.name == "exact" and s.status == search.NONE for s in rep.stages)}


def cmd_pipeline(args):
    if args.kind == "run":
        if args.inp:
            g = load_graph(args.inp)
        elif args.n is not None:
            g = (factorgen.canonical_odd_colouring(args.n) if args.n % 2
                 else factorgen.canonical_one_factorization(args.n))
        else:
            raise UsageError("give --in or --n")
        return _pipeline_report(g, args, PipelineOptions())
    if args.n is None or args.seed is None:
        raise UsageError("--n and --seed are required")
    jobs = [(args.n, args.seed * 100_000 + i, args.steps) for i in range(args.count)]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as ex:
            rows = list(ex.map(_batch_one, jobs))
    else:
        rows = [_batch_one(j) for j in jobs]
    ok = sum(r["success"] for r in rows)
    d = {"n": args.n, "count": args.count, "success": ok, "rate": ok / max(1, len(rows)),
         "proved_none": sum(r["exact_none"] for r in rows), "rows": rows}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("seed,success,method\n")
            fh.writelines(f"{r['seed']},{int(r['success'])},{r['method'] or ''}\n" for r in rows)
    return 0, d


def cmd_verify(args):
    g = _graph(args)
    if not args.report:
        raise UsageError("--report is required")
    with open(args.report) as fh:
        rep = json.load(fh)
    seq = rep.get("result")
    if not seq:
        return 1, {"verified": False, "reason": "report has no result"}
    try:
        if rep.get("target") == "cycle":
            ok = verify_rainbow_cycle_all_colours(g, seq)
        else:
            ok = verify_rainbow_hamilton_path(g, seq)
    except GraphError as exc:
        return 1, {"verified": False, "reason": str(exc)}
    agree = ok == bool(rep.get("verified"))
    return (0 if ok and agree else 1), {"verified": ok, "agrees_with_report": agree}


def _read_square(path) -> latin.LatinSquare:
    with open(path) as fh:
        return latin.LatinSquare.from_text(fh.read())


def cmd_latin(args):
    if args.kind == "from-colouring":
        sq = latin.square_from_colouring(_graph(args))
        _write(args, sq.to_text())
        return 0, {"n": sq.n, "symmetric": sq.is_symmetric, "square": sq.to_text()}
    if args.kind == "to-colouring":
        g = latin.colouring_from_square(_read_square(args.square or args.inp))
        _write(args, g.to_json())
        return 0, {"n": g.n, "colours": len(g.colours)}
    if args.kind == "sample":
        if args.n is None:
            raise UsageError("--n is required")
        sq = latin.random_symmetric_square(args.n, _rng(args), args.steps)
        _write(args, sq.to_text())
        return 0, {"n": sq.n, "steps": args.steps, "seed": args.seed, "square": sq.to_text()}
    # transversal
    sq = _read_square(args.square or args.inp)
    diag = latin.diagonal(sq)
    out = {"n": sq.n, "diagonal_is_transversal": latin.is_transversal(sq, diag)}
    if args.hamilton:
        g = latin.colouring_from_square(sq)
        r = search.exact_all_colour_cycle(g, args.budget)
        out["status"] = r.status
        if r.found:
            fwd, back = latin.transversals_from_cycle(sq, r.vertices)
            out["cycle"] = r.vertices
            out["forward"] = fwd
            out["backward"] = back
            out["hamilton"] = [latin.is_hamilton_transversal(sq, fwd), latin.is_hamilton_transversal(sq, back)]
    return 0, out


# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", help="input JSON graph")
    common.add_argument("--out", help="output file")
    common.add_argument("--seed", type=int)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="rainbowfact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True)

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("path", nargs="?")
    v.set_defaults(func=cmd_validate)

    def group(name, kinds, func):
        gp = sub.add_parser(name)
        s = gp.add_subparsers(dest="kind", required=True)
        out = {}
        for k in kinds:
            out[k] = s.add_parser(k, parents=[common])
            out[k].set_defaults(func=func)
        return out

    g = group("gen", ["canonical", "xor", "sample", "count"], cmd_gen)
    for sp in g.values():
        sp.add_argument("--n", type=int)
    g["sample"].add_argument("--steps", type=int, default=2000)
    g["count"].add_argument("--strategy", choices=["matchings", "edges"], default="matchings")

    sw = group("switch", ["walk", "jm"], cmd_switch)
    for sp in sw.values():
        sp.add_argument("--steps", type=int, default=1000)
    sw["walk"].add_argument("--colours", help="comma-separated colours to keep before walking")
    sw["walk"].add_argument("--moves", default="spin,rot", help="comma-separated: spin, rot")

    c = group("check", ["resilience", "quasirandom", "gadget-resilience"], cmd_check)
    for sp in c.values():
        sp.add_argument("--mode", choices=["exact", "sampled"], default="exact")
        sp.add_argument("--budget", type=int, default=10**7)
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--sampled", type=int, metavar="K", help="shorthand for --mode sampled --samples K")
    c["resilience"].add_argument("--eps", type=float, default=0.1)
    c["gadget-resilience"].add_argument("--mu", type=float, default=0.1)

    for sp in group("gadgets", ["enum", "r"], cmd_gadgets).values():
        sp.add_argument("--x", type=int)
        sp.add_argument("--c", type=int)
        sp.add_argument("--partition", choices=["none", "auto"], default="none",
                        help="auto: split the other colours equitably into D1..D4")

    t = group("template", ["build", "verify"], cmd_template)
    t["build"].add_argument("--m", type=int, default=1)
    t["build"].add_argument("--strategy", choices=["complete", "random-regular"], default="complete")
    t["build"].add_argument("--degree", type=int)
    t["verify"].add_argument("--budget", type=int, default=10**6)
    t["verify"].add_argument("--samples", type=int, default=10**4)
    t["verify"].add_argument("--mode", choices=["auto", "exhaustive", "sampled"], default="auto")

    a = group("absorb", ["pipeline"], cmd_absorb)
    a["pipeline"].add_argument("--config")
    a["pipeline"].add_argument("--timing", action="store_true", help="include wall-clock times")

    f = group("find", ["hampath", "andersen", "cycle"], cmd_find)
    for sp in f.values():
        sp.add_argument("--budget", type=int)
    how = f["hampath"].add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", default=True)
    how.add_argument("--heuristic", action="store_true")
    f["hampath"].add_argument("--restarts", type=int, default=200)

    pl = group("pipeline", ["run", "batch"], cmd_pipeline)
    for sp in pl.values():
        sp.add_argument("--n", type=int)
        sp.add_argument("--config")
        sp.add_argument("--timing", action="store_true", help="include wall-clock times")
    pl["batch"].add_argument("--count", type=int, default=20)
    pl["batch"].add_argument("--steps", type=int, default=2000)

    vr = sub.add_parser("verify", parents=[common])
    vr.add_argument("--report")
    vr.set_defaults(func=cmd_verify)

    la = group("latin", ["from-colouring", "to-colouring", "transversal", "sample"], cmd_latin)
    for sp in la.values():
        sp.add_argument("--square", help="square text file")
    la["transversal"].add_argument("--hamilton", action="store_true")
    la["transversal"].add_argument("--budget", type=int)
    la["sample"].add_argument("--n", type=int)
    la["sample"].add_argument("--steps", type=int, default=200)
    return p


def _print(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, sort_keys=True))
        return
    for k, val in report.items():
        if isinstance(val, str) and "\n" in val:
            print(f"{k}:")
            print(val.rstrip())
        else:
            print(f"{k}: {val}")


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, report = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        # covers graph, template, square, switch and config errors and bad JSON
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print(report, args.json)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
