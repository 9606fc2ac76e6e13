"""End-to-end search for a rainbow Hamilton path (even n) or an all-colour cycle (odd n).

The absorber route splits the graph at random, builds an absorber on one
side, grows a long rainbow path on the main slice and absorbs what is left.
At small n that route usually fails for lack of room, and the pipeline
falls back to exact search and then to the randomized heuristic.  Whatever
it returns is re-verified by the independent checkers in ``graph``.
"""
from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

from .absorber import AbsorbError, AbsorberConfig, StageFailure, absorb, build_absorber, partition_random
from .factorgen import odd_to_even
from .graph import ColouredGraph, GraphError, verify_rainbow_cycle_all_colours, verify_rainbow_hamilton_path
from .search import FOUND, NONE, exact_all_colour_cycle, exact_rainbow_hamilton_path, long_rainbow_path
from .template import TemplateError

DEFAULT_CONFIG = AbsorberConfig.relaxed()


@dataclass
class PipelineOptions:
    exact_max_n: int = 16
    exact_budget: int = 200_000
    heuristic_restarts: int = 200
    link_mode: str = "spread-greedy"
    try_absorber: bool = True
    fallback: bool = True


@dataclass
class Stage:
    name: str
    status: str
    detail: str = ""


@dataclass
class RunReport:
    n: int
    seed: int
    target: str
    config: dict
    stages: list = field(default_factory=list)
    result: list | None = None
    method: str | None = None
    verified: bool = False
    timing: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.result is not None and self.verified

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("timing")
        return d


def config_echo(cfg: AbsorberConfig) -> dict:
    return {"eps": str(cfg.eps), "gamma": str(cfg.gamma), "eta": str(cfg.eta), "mu": str(cfg.mu),
            "mode": cfg.mode, "edge_ratio": str(cfg.edge_ratio)}


def _verify(g: ColouredGraph, seq, target: str) -> bool:
    try:
        if target == "path":
            return verify_rainbow_hamilton_path(g, seq)
        return verify_rainbow_cycle_all_colours(g, seq)
    except GraphError:
        return False


def _absorber_route(g: ColouredGraph, cfg: AbsorberConfig, rng: random.Random, target: str,
                    forbidden: int | None, opts: PipelineOptions, rep: RunReport):
    part = partition_random(g, cfg, rng)
    rep.stages.append(Stage("partition", "ok", f"main slice {len(part.vertices['main'])} vertices, "
                                                f"{len(part.colours['main'])} colours"))
    ab, brep = build_absorber(g, part, link_mode=opts.link_mode)
    rep.stages.append(Stage("absorber", "ok", f"m={brep.m}, {brep.gadgets} gadgets"))
    main_v = set(part.vertices["main"]) - ab.vertices - ({forbidden} if forbidden is not None else set())
    lp = long_rainbow_path(g, main_v, part.colours["main"], part.edges, seed=rng.getrandbits(32))
    rep.stages.append(Stage("long_path", "ok", f"{len(lp.path)} vertices, remainder "
                                                f"{len(lp.missing_vertices)}/{len(lp.missing_colours)}"))
    res = absorb(ab, lp.path, mode=target, forbidden=forbidden)
    rep.stages.append(Stage("absorb", "ok", f"{len(res.covers)} covers"))
    return res.vertices


def _exact_route(g: ColouredGraph, target: str, opts: PipelineOptions, rep: RunReport):
    if g.n > opts.exact_max_n:
        rep.stages.append(Stage("exact", "skipped", f"n={g.n} above {opts.exact_max_n}"))
        return None
    if target == "path":
        r = exact_rainbow_hamilton_path(g, opts.exact_budget)
    else:
        r = exact_all_colour_cycle(g, opts.exact_budget)
    rep.stages.append(Stage("exact", r.status, f"{r.nodes} nodes"))
    if r.status == NONE:
        # a proof of non-existence ends the run
        return False
    return r.vertices if r.status == FOUND else None


def _heuristic_route(g: ColouredGraph, target: str, seed: int, opts: PipelineOptions, rep: RunReport):
    for i in range(opts.heuristic_restarts):
        lp = long_rainbow_path(g, restarts=1, seed=seed * 7919 + i)
        p = lp.path
        if len(p) != g.n:
            continue
        if target == "path":
            rep.stages.append(Stage("heuristic", FOUND, f"restart {i}"))
            return p
        missing = lp.missing_colours
        for q in (p, p[::-1]):
            # closing edge must carry the single unused colour
            if len(missing) == 1 and g.colour(q[-1], q[0]) == missing[0]:
                rep.stages.append(Stage("heuristic", FOUND, f"restart {i}"))
                return q
    rep.stages.append(Stage("heuristic", "failed", f"{opts.heuristic_restarts} restarts"))
    return None


def full_pipeline(g: ColouredGraph, cfg: AbsorberConfig | None = None, seed: int = 0,
                  opts: PipelineOptions | None = None) -> RunReport:
    """Rainbow Hamilton path for a 1-factorization, or all-colour Hamilton cycle for odd ``n``.

    Odd ``n`` (an optimal colouring with ``n`` colours) goes through the
    one-vertex extension; a cycle there that skips the added vertex and uses
    every colour is the answer for the original graph.
    """
    cfg = cfg or DEFAULT_CONFIG
    opts = opts or PipelineOptions()
    rng = random.Random(seed)
    odd = g.n % 2 == 1
    target = "cycle" if odd else "path"
    rep = RunReport(g.n, seed, target, config_echo(cfg))
    work, forbidden = (odd_to_even(g), g.n) if odd else (g, None)
    if odd:
        rep.stages.append(Stage("extend", "ok", f"added vertex {g.n}"))

    seq = None
    t0 = time.perf_counter()
    if opts.try_absorber:
        try:
            seq = _absorber_route(work, cfg, rng, target, forbidden, opts, rep)
            rep.method = "absorber"
        except (StageFailure, AbsorbError, TemplateError) as exc:
            if isinstance(exc, StageFailure):
                rep.stages.append(Stage(exc.stage, "failed", exc.detail))
            else:
                rep.stages.append(Stage("absorb", "failed", str(exc)))
    rep.timing["absorber"] = time.perf_counter() - t0
    if seq is not None and odd and forbidden in seq:
        seq = None
    t0 = time.perf_counter()
    if seq is None and opts.fallback:
        found = _exact_route(g, target, opts, rep)
        if found:
            seq, rep.method = found, "exact"
        elif found is None:
            seq = _heuristic_route(g, target, seed, opts, rep)
            if seq is not None:
                rep.method = "heuristic"
    rep.timing["fallback"] = time.perf_counter() - t0
    if seq is not None:
        rep.result = list(seq)
        rep.verified = _verify(g, seq, target)
        rep.stages.append(Stage("verify", "ok" if rep.verified else "failed"))
    return rep


__all__ = ["PipelineOptions", "RunReport", "Stage", "full_pipeline", "config_echo", "DEFAULT_CONFIG"]
