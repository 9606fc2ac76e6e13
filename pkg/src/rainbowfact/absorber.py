"""Absorbing structures for rainbow Hamilton paths and cycles.

An absorber consists of a robustly matchable template ``H`` (left side:
vertices, right side: colours), one gadget for every template edge
``(v, c)``, length-4 rainbow links that chain the gadgets into a single
path, and a tail ending at a free vertex ``u``.  For any matching ``M`` of
``H`` there is a rainbow path from ``u`` to the other free end ``u'`` that
contains exactly the template vertices and colours covered by ``M``.

Per gadget the path runs from ``b`` to ``t2`` either as
``b d ~ a e ~ t1 x t2`` (absorbing ``x`` and ``c``) or as
``b a ~ d e ~ t1 t2`` (avoiding them), where ``~`` are links.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Collection, Iterable, Sequence

from .graph import (ColouredGraph, GraphError, _key, path_colours, verify_rainbow_cycle_all_colours,
                    verify_rainbow_hamilton_path, verify_rainbow_path)
from .resilience import Gadget, enumerate_gadgets, gadget_violations
from .template import BipartiteTemplate, TemplateError, build_template, robust_match

SLICES = ("flex", "buff", "abs", "link", "link_res", "main")


class StageFailure(RuntimeError):
    def __init__(self, stage: str, detail: str):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail


class AbsorbError(ValueError):
    pass


# configuration

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class AbsorberConfig:
    """Slice probabilities for the random partition.

    With ``e = |E(H)| / n``: flexible ``eta``, buffer ``5 eta / 2``,
    absorber ``6e + 2mu`` (vertices) and ``3e + mu`` (colours), links
    ``9e + 3mu`` and ``12e + 4mu``, reserve links ``gamma / 3``, and the main
    slice takes the rest.  Vertex and colour main slices always agree.  In
    ``standard`` mode ``e = 896 (eta - 2 eps)``; ``relaxed`` mode takes ``e``
    from ``edge_ratio`` and drops the parameter ordering requirement.
    """

    eps: Fraction
    gamma: Fraction
    eta: Fraction
    mu: Fraction
    mode: str = "standard"
    edge_ratio_override: Fraction | None = None

    def __post_init__(self):
        for name in ("eps", "gamma", "eta", "mu"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.edge_ratio_override is not None:
            object.__setattr__(self, "edge_ratio_override", _frac(self.edge_ratio_override))
        if self.mode not in ("standard", "relaxed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        vals = (self.eps, self.gamma, self.eta, self.mu)
        if any(v <= 0 or v >= 1 for v in vals):
            raise ValueError("parameters must lie strictly between 0 and 1")
        if self.mode == "standard":
            if not self.eps < self.gamma < self.eta < self.mu:
                raise ValueError("standard mode needs eps < gamma < eta < mu")
            if self.edge_ratio_override is not None:
                raise ValueError("standard mode derives the template edge ratio")
        for side in (self.vertex_probs(), self.colour_probs()):
            if any(p < 0 or p > 1 for p in side.values()):
                raise ValueError(f"slice probabilities out of range: {side}")

    @property
    def edge_ratio(self) -> Fraction:
        if self.mode == "standard":
            return 896 * (self.eta - 2 * self.eps)
        return self.edge_ratio_override or Fraction(0)

    def vertex_probs(self) -> dict[str, Fraction]:
        e, mu, eta = self.edge_ratio, self.mu, self.eta
        p = {"flex": eta, "buff": 5 * eta / 2, "abs": 6 * e + 2 * mu,
             "link": 9 * e + 3 * mu, "link_res": self.gamma / 3}
        p["main"] = 1 - sum(p.values())
        return p

    def colour_probs(self) -> dict[str, Fraction]:
        e, mu, eta = self.edge_ratio, self.mu, self.eta
        q = {"flex": eta, "buff": 5 * eta / 2, "abs": 3 * e + mu,
             "link": 12 * e + 4 * mu, "link_res": self.gamma / 3}
        q["main"] = 1 - sum(q.values())
        return q

    @property
    def beta(self) -> Fraction:
        """Edge retention probability ``1 - p_main``."""
        return 1 - self.vertex_probs()["main"]

    @classmethod
    def relaxed(cls, eps=0.01, gamma=0.02, eta=0.05, mu=0.1, edge_ratio=0) -> "AbsorberConfig":
        return cls(eps, gamma, eta, mu, mode="relaxed", edge_ratio_override=edge_ratio)


# random partition

_MASK = (1 << 64) - 1


def _splitmix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


@dataclass(frozen=True)
class EdgeSample:
    """Reproducible random edge subset: ``uv`` is kept with probability ``beta``."""

    seed: int
    beta: float

    def __call__(self, u: int, v: int) -> bool:
        if self.beta >= 1:
            return True
        if self.beta <= 0:
            return False
        a, b = (u, v) if u < v else (v, u)
        h = _splitmix(_splitmix(self.seed & _MASK) ^ ((a << 32) | b))
        return h < self.beta * 2.0 ** 64


def keep_all(u: int, v: int) -> bool:
    return True


@dataclass
class AbsorberPartition:
    vertices: dict[str, frozenset]
    colours: dict[str, frozenset]
    edges: Callable[[int, int], bool] = keep_all

    def to_dict(self) -> dict:
        d = {"vertices": {k: sorted(v) for k, v in self.vertices.items()},
             "colours": {k: sorted(v) for k, v in self.colours.items()}}
        if isinstance(self.edges, EdgeSample):
            d["edge_sample"] = {"seed": self.edges.seed, "beta": self.edges.beta}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _split(items: Sequence[int], probs: dict[str, Fraction], rng: random.Random) -> dict[str, frozenset]:
    names = list(SLICES)
    cum, acc = [], 0.0
    for k in names:
        acc += float(probs[k])
        cum.append(acc)
    out: dict[str, set] = {k: set() for k in names}
    for it in items:
        r = rng.random()
        for k, c in zip(names, cum):
            if r < c:
                out[k].add(it)
                break
        else:
            out["main"].add(it)
    return {k: frozenset(v) for k, v in out.items()}


def partition_random(g: ColouredGraph, cfg: AbsorberConfig, rng: random.Random) -> AbsorberPartition:
    vs = _split(range(g.n), cfg.vertex_probs(), rng)
    cs = _split(g.colours, cfg.colour_probs(), rng)
    return AbsorberPartition(vs, cs, EdgeSample(rng.getrandbits(63), float(cfg.beta)))


# template embedding

@dataclass
class Embedding:
    template: BipartiteTemplate
    m: int
    remainder: dict


def template_size(part: AbsorberPartition) -> int:
    """Largest ``m`` with ``2m`` flexible and ``5m`` buffer vertices and colours."""
    v, c = part.vertices, part.colours
    return min(len(v["flex"]) // 2, len(c["flex"]) // 2, len(v["buff"]) // 5, len(c["buff"]) // 5)


def embed_template(t: BipartiteTemplate, part: AbsorberPartition) -> Embedding:
    """Map the flexible template parts into the flexible slices and the rest into the buffers."""
    fl, fr = sorted(t.flex_left), sorted(t.flex_right)
    bl = sorted(set(t.left) - t.flex_left)
    br = sorted(set(t.right) - t.flex_right)
    vf, vb = sorted(part.vertices["flex"]), sorted(part.vertices["buff"])
    cf, cb = sorted(part.colours["flex"]), sorted(part.colours["buff"])
    if len(fl) > len(vf) or len(bl) > len(vb) or len(fr) > len(cf) or len(br) > len(cb):
        raise StageFailure("embed_template", "partition slices are too small for the template")
    lmap = dict(zip(fl, vf)) | dict(zip(bl, vb))
    rmap = dict(zip(fr, cf)) | dict(zip(br, cb))
    emb = BipartiteTemplate.build(lmap.values(), rmap.values(),
                                  [(lmap[a], rmap[b]) for a, b in t.edges],
                                  [lmap[a] for a in fl], [rmap[b] for b in fr])
    rem = {"vertices_flex": len(vf) - len(fl), "vertices_buff": len(vb) - len(bl),
           "colours_flex": len(cf) - len(fr), "colours_buff": len(cb) - len(br)}
    return Embedding(emb, len(fl) // 2, rem)


# gadgets and matchings

def gadget_inside(gd: Gadget, vpool: Collection[int], cpool: Collection[int], allowed) -> bool:
    return (gd.used_vertices <= vpool and gd.used_colours <= cpool
            and all(allowed(u, v) for u, v in gd.edges))


def greedy_gadgets(g: ColouredGraph, h: BipartiteTemplate, vpool: Collection[int],
                   cpool: Collection[int], allowed=keep_all) -> dict[tuple[int, int], Gadget]:
    """One gadget per template edge, in edge order, taking the first that fits."""
    vpool, cpool = frozenset(vpool), frozenset(cpool)
    tv, tc = set(h.left), set(h.right)
    used_v: set = set()
    used_c: set = set()
    out = {}
    for v, c in h.sorted_edges():
        pick = None
        for gd in enumerate_gadgets(g, v, c):
            if not gadget_inside(gd, vpool, cpool, allowed):
                continue
            if gd.used_vertices & (used_v | tv) or gd.used_colours & (used_c | tc):
                continue
            pick = gd
            break
        if pick is None:
            raise StageFailure("greedy_gadgets", f"no available gadget for vertex {v}, colour {c}")
        out[(v, c)] = pick
        used_v |= pick.used_vertices
        used_c |= pick.used_colours
    return out


def greedy_rainbow_matching(g: ColouredGraph, vertices: Collection[int], colours: Collection[int],
                            allowed=keep_all) -> list[tuple[int, int]]:
    """Scan edges in order, keeping those disjoint in vertices and colours from earlier picks."""
    vs, cs = set(vertices), set(colours)
    used_v: set = set()
    used_c: set = set()
    out = []
    for u in sorted(vs):
        for v, c in sorted(g.neighbours(u).items()):
            if u < v and v in vs and c in cs and u not in used_v and v not in used_v \
                    and c not in used_c and allowed(u, v):
                out.append((u, v))
                used_v |= {u, v}
                used_c.add(c)
    return out


# links

@dataclass(frozen=True)
class Link:
    vertices: tuple[int, int, int, int, int]
    colours: tuple[int, int, int, int]

    @property
    def ends(self) -> tuple[int, int]:
        return self.vertices[0], self.vertices[-1]

    @property
    def inner(self) -> tuple[int, int, int]:
        return self.vertices[1:4]

    def oriented(self, start: int) -> list[int]:
        vs = list(self.vertices)
        if vs[0] == start:
            return vs
        if vs[-1] == start:
            return vs[::-1]
        raise AbsorbError(f"link {self.vertices} does not end at {start}")


@dataclass
class LinkPlan:
    m1: list[tuple[int, int]]
    m2: list[tuple[int, int]]
    m3: list[tuple[int, int]]
    m4: list[tuple[int, int]]
    anchor: int
    free_end: int
    tail_end: int


def plan_link_matchings(gadgets: Sequence[Gadget], tail_matching: Sequence[tuple[int, int]]) -> LinkPlan:
    """Pairs to join by links.

    Gadget ``i`` gets links ``a ~ d`` and ``t1 ~ e``; ``t2`` of gadget ``i``
    is linked to ``b`` of gadget ``i+1``.  Of the two vertices left with
    degree two (``b`` of the first, ``t2`` of the last gadget) the lower id
    anchors the tail, which alternates matching edges and links.
    """
    if not gadgets:
        raise AbsorbError("at least one gadget is needed")
    m1 = [(gd.a, gd.d) for gd in gadgets]
    m2 = [(gd.t1, gd.e) for gd in gadgets]
    m3 = [(gadgets[i].t2, gadgets[i + 1].b) for i in range(len(gadgets) - 1)]
    ends = (gadgets[0].b, gadgets[-1].t2)
    anchor, free_end = min(ends), max(ends)
    m4 = []
    prev = anchor
    for p, q in tail_matching:
        m4.append((prev, p))
        prev = q
    return LinkPlan(m1, m2, m3, m4, anchor, free_end, prev)


def _link_candidates(g, x, vpool, cpool, used_v, used_c, allowed):
    return [(v, c) for v, c in sorted(g.neighbours(x).items())
            if v in vpool and v not in used_v and c in cpool and c not in used_c and allowed(x, v)]


def find_link(g: ColouredGraph, x: int, y: int, vpool: Collection[int], cpool: Collection[int],
              used_v: Collection[int], used_c: Collection[int], allowed=keep_all) -> Link | None:
    """First rainbow path ``x v1 v2 v3 y`` with inner vertices and colours from the pools."""
    firsts = _link_candidates(g, x, vpool, cpool, used_v, used_c, allowed)
    lasts = _link_candidates(g, y, vpool, cpool, used_v, used_c, allowed)
    if not firsts or not lasts:
        return None
    for v1, c1 in firsts:
        if v1 == y:
            continue
        for v3, c3 in lasts:
            if v3 in (v1, x) or c3 == c1:
                continue
            for v2, c2 in sorted(g.neighbours(v1).items()):
                if v2 in (x, y, v1, v3) or v2 not in vpool or v2 in used_v:
                    continue
                if c2 not in cpool or c2 in used_c or c2 in (c1, c3) or not allowed(v1, v2):
                    continue
                c4 = g.colour(v2, v3)
                if c4 is None or c4 not in cpool or c4 in used_c or c4 in (c1, c2, c3):
                    continue
                if not allowed(v2, v3):
                    continue
                return Link((x, v1, v2, v3, y), (c1, c2, c4, c3))
    return None


@dataclass
class LinkReport:
    main: int = 0
    reserve: int = 0
    unused_main_vertices: int = 0
    unused_main_colours: int = 0


def find_links(g: ColouredGraph, pairs: Sequence[tuple[int, int]], main: tuple, reserve: tuple | None,
               used_v: Iterable[int], used_c: Iterable[int], allowed=keep_all,
               mode: str = "spread-greedy") -> tuple[list[Link], LinkReport]:
    """Join every pair by a link, with disjoint inner vertices and colours.

    ``main`` and ``reserve`` are ``(vertices, colours)`` pools.  ``greedy``
    only uses the main pool; ``spread-greedy`` sends pairs the main pool
    cannot serve to the reserve pool.
    """
    if mode not in ("greedy", "spread-greedy"):
        raise ValueError(f"unknown link mode {mode!r}")
    uv, uc = set(used_v), set(used_c)
    out: list[Link] = []
    rep = LinkReport()
    for x, y in pairs:
        link = find_link(g, x, y, main[0], main[1], uv, uc, allowed)
        if link is not None:
            rep.main += 1
        elif mode == "spread-greedy" and reserve is not None:
            link = find_link(g, x, y, reserve[0], reserve[1], uv, uc, allowed)
            if link is not None:
                rep.reserve += 1
        if link is None:
            raise StageFailure("find_links", f"no link available for ({x}, {y})")
        out.append(link)
        uv |= set(link.inner)
        uc |= set(link.colours)
    rep.unused_main_vertices = len(set(main[0]) - uv)
    rep.unused_main_colours = len(set(main[1]) - uc)
    return out, rep


# the assembled absorber

@dataclass
class HAbsorber:
    graph: ColouredGraph
    template: BipartiteTemplate
    gadgets: dict[tuple[int, int], Gadget]
    order: list[tuple[int, int]]
    links: dict[tuple[int, int], Link]
    plan: LinkPlan
    tail_matching: list[tuple[int, int]]
    tail: list[int]
    allowed: Callable[[int, int], bool] = keep_all
    vertices: frozenset = frozenset()
    colours: frozenset = frozenset()

    @property
    def u(self) -> int:
        return self.tail[0]

    @property
    def u_prime(self) -> int:
        return self.plan.free_end

    def link(self, p: int, q: int) -> Link:
        return self.links[_key(p, q)]


def _tail_path(plan: LinkPlan, tail_matching, links) -> list[int]:
    """Tail from its free end ``u`` to the anchor."""
    seq = [plan.anchor]
    for (p, q), (x, y) in zip(tail_matching, plan.m4):
        lk = links[_key(x, y)]
        seq.extend(lk.oriented(x)[1:])
        seq.append(q)
    return seq[::-1]


def _completing(gd: Gadget, links: Iterable[Link]) -> bool:
    tri = {gd.t1, gd.t2}
    off_e = {gd.a, gd.e}
    nonadj = [{gd.a, gd.d}, {gd.b, gd.e}]
    has1 = has2 = False
    for lk in links:
        ends = set(lk.ends)
        if ends in nonadj:
            has1 = True
        if len(ends & off_e) == 1 and len(ends & tri) == 1:
            has2 = True
    return has1 and has2


def _structure_ok(gadgets, links, template_vertices) -> list[str]:
    out = []
    by_end: dict[int, list] = {}
    for lk in links:
        by_end.setdefault(lk.ends[0], []).append(lk)
    for key, gd in gadgets.items():
        vs = set(gd.vertices)
        mine = [lk for v in vs for lk in by_end.get(v, ()) if lk.ends[1] in vs]
        if not _completing(gd, mine):
            out.append(f"gadget {key} has no completing pair of links")
    adj: dict[int, set] = {}

    def add(u, v):
        if u in template_vertices or v in template_vertices:
            return
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)

    for gd in gadgets.values():
        for u, v, _ in gd.coloured_edges():
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            add(u, v)
    for lk in links:
        for u, v in zip(lk.vertices, lk.vertices[1:]):
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            add(u, v)
    for t in template_vertices:
        adj.pop(t, None)
    if adj:
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(adj):
            out.append("gadgets and links minus the template vertices are disconnected")
        if max(len(s) for s in adj.values()) > 3:
            out.append("gadgets and links have a vertex of degree above 3")
    return out


def absorber_violations(ab: HAbsorber) -> list[str]:
    """Every condition for the links to complete the gadgets, and the tail conditions."""
    g, h = ab.graph, ab.template
    out = []
    tv, tc = set(h.left), set(h.right)
    if set(ab.gadgets) != set(h.edges):
        out.append("gadgets do not match the template edges one to one")
    used_v: dict[int, tuple] = {}
    used_c: dict[int, tuple] = {}
    for key, gd in ab.gadgets.items():
        if (gd.x, gd.c) != key:
            out.append(f"gadget {key} is attached to ({gd.x}, {gd.c})")
        out.extend(f"gadget {key}: {s}" for s in gadget_violations(g, gd))
        for v in gd.used_vertices:
            if v in used_v or v in tv:
                out.append(f"vertex {v} is used by more than one gadget or is a template vertex")
            used_v[v] = key
        for c in gd.used_colours:
            if c in used_c or c in tc:
                out.append(f"colour {c} is used by more than one gadget or is a template colour")
            used_c[c] = key
    links = list(ab.links.values())
    link_cols: list[int] = []
    inner: list[int] = []
    for lk in links:
        try:
            if not verify_rainbow_path(g, lk.vertices) or len(lk.vertices) != 5:
                out.append(f"link {lk.vertices} is not a rainbow path of length 4")
            elif tuple(path_colours(g, lk.vertices)) != lk.colours:
                out.append(f"link {lk.vertices} records the wrong colours")
        except GraphError as exc:
            out.append(f"link {lk.vertices}: {exc}")
        link_cols.extend(lk.colours)
        inner.extend(lk.inner)
        if not ab.allowed(lk.vertices[0], lk.vertices[1]):
            out.append(f"link {lk.vertices} uses a non-retained edge")
    if len(set(link_cols)) != len(link_cols):
        out.append("links are not jointly rainbow")
    if set(link_cols) & (tc | set(used_c)):
        out.append("a link uses a template or gadget colour")
    if len(set(inner)) != len(inner):
        out.append("links share inner vertices")
    if set(inner) & (tv | set(used_v)):
        out.append("a link passes through a template or gadget vertex")
    tail_keys = {_key(*p) for p in ab.plan.m4}
    glinks = [lk for key, lk in ab.links.items() if key not in tail_keys]
    out.extend(_structure_ok(ab.gadgets, glinks, tv))
    if not out:
        for lk in glinks:
            rest = [p for p in glinks if p is not lk]
            if not _structure_ok(ab.gadgets, rest, tv):
                out.append(f"link {lk.vertices} is superfluous")
                break
    # tail
    tail = ab.tail
    try:
        if not verify_rainbow_path(g, tail):
            out.append("tail is not a rainbow path")
    except GraphError as exc:
        out.append(f"tail: {exc}")
    x = tail[-1]
    owners = [gd for gd in ab.gadgets.values() if x in gd.vertices]
    if len(owners) != 1 or owners[0].x == x:
        out.append("tail must end at a non-apex vertex of exactly one gadget")
    for gd in ab.gadgets.values():
        if set(tail) & set(gd.vertices) - {x}:
            out.append("tail meets a gadget away from its end")
            break
    tail_set = set(tail)
    if any(tail_set & set(lk.vertices) for lk in glinks):
        out.append("tail meets a gadget link")
    gadget_link_cols = {c for lk in glinks for c in lk.colours}
    tail_cols = set(path_colours(g, tail)) if len(tail) > 1 else set()
    if tail_cols & (tc | set(used_c) | gadget_link_cols):
        out.append("tail reuses a template, gadget or link colour")
    return out


def assemble(g: ColouredGraph, h: BipartiteTemplate, gadgets: dict[tuple[int, int], Gadget],
             links: Iterable[Link], tail_matching: Sequence[tuple[int, int]], plan: LinkPlan,
             allowed=keep_all) -> HAbsorber:
    lk = {_key(*l.ends): l for l in links}
    order = h.sorted_edges()
    for x, y in plan.m1 + plan.m2 + plan.m3 + plan.m4:
        if _key(x, y) not in lk:
            raise AbsorbError(f"missing link for ({x}, {y})")
    tail = _tail_path(plan, tail_matching, lk)
    verts = set(h.left) | set(tail)
    cols = set(h.right)
    for gd in gadgets.values():
        verts |= gd.used_vertices
        cols |= gd.used_colours
    for l in lk.values():
        verts |= set(l.vertices)
        cols |= set(l.colours)
    cols |= {g.colour(p, q) for p, q in tail_matching}
    ab = HAbsorber(g, h, dict(gadgets), order, lk, plan, list(tail_matching), tail, allowed,
                   frozenset(verts), frozenset(cols))
    bad = absorber_violations(ab)
    if bad:
        raise AbsorbError("absorber is invalid: " + "; ".join(bad[:5]))
    return ab


def _traverse(ab: HAbsorber, gd: Gadget, absorbing: bool) -> list[int]:
    """Walk through one gadget from ``b`` to ``t2``."""
    p1 = ab.link(gd.a, gd.d)
    p2 = ab.link(gd.t1, gd.e)
    if absorbing:
        return [gd.b] + p1.oriented(gd.d) + p2.oriented(gd.e) + [gd.x, gd.t2]
    return [gd.b] + p1.oriented(gd.a) + p2.oriented(gd.e) + [gd.t2]


def absorbing_path(ab: HAbsorber, matching: Iterable[tuple[int, int]]) -> list[int]:
    """Rainbow path from ``u`` to ``u'`` through the template vertices and colours of ``matching``."""
    chosen = set(matching)
    if not chosen <= set(ab.template.edges):
        raise AbsorbError("matching uses pairs that are not template edges")
    if len({v for v, _ in chosen}) != len(chosen) or len({c for _, c in chosen}) != len(chosen):
        raise AbsorbError("pairs do not form a matching")
    chain: list[int] = []
    for i, key in enumerate(ab.order):
        gd = ab.gadgets[key]
        part = _traverse(ab, gd, key in chosen)
        if i:
            prev = ab.gadgets[ab.order[i - 1]]
            part = ab.link(prev.t2, gd.b).oriented(prev.t2)[1:-1] + part
        chain.extend(part)
    if chain[0] != ab.plan.anchor:
        chain.reverse()
    path = ab.tail[:-1] + chain
    g = ab.graph
    if not verify_rainbow_path(g, path):
        raise AbsorbError("internal error: absorbing path is not rainbow")
    tv, tc = set(ab.template.left), set(ab.template.right)
    if set(path) & tv != {v for v, _ in chosen}:
        raise AbsorbError("internal error: absorbing path meets the wrong template vertices")
    if set(path_colours(g, path)) & tc != {c for _, c in chosen}:
        raise AbsorbError("internal error: absorbing path uses the wrong template colours")
    return path


# covers and the final absorption

def find_cover(g: ColouredGraph, u: int, v: int, c: int, flex_v: Collection[int],
               flex_c: Collection[int], used_v: Collection[int] = (), used_c: Collection[int] = (),
               allowed=keep_all) -> tuple[int, int, int] | None:
    """Lexicographically first ``(u', w, v')`` making ``u u' w v' v`` a rainbow cover.

    The inner vertices are flexible, ``u'w`` has colour ``c`` and the other
    three edges have distinct unused flexible colours.
    """
    for u1, c_a in sorted(g.neighbours(u).items()):
        if u1 not in flex_v or u1 in used_v or u1 == v or c_a not in flex_c or c_a in used_c:
            continue
        if not allowed(u, u1):
            continue
        w = g.nbr(u1, c)
        if w is None or w not in flex_v or w in used_v or w in (u, v) or not allowed(u1, w):
            continue
        for v1, c_c in sorted(g.neighbours(v).items()):
            if v1 in (u, u1, w) or v1 not in flex_v or v1 in used_v:
                continue
            if c_c not in flex_c or c_c in used_c or c_c == c_a or not allowed(v, v1):
                continue
            c_b = g.colour(w, v1)
            if c_b is None or c_b not in flex_c or c_b in used_c or c_b in (c_a, c_c):
                continue
            if not allowed(w, v1):
                continue
            return u1, w, v1
    return None


@dataclass
class AbsorbResult:
    vertices: list[int]
    mode: str
    covers: list = field(default_factory=list)
    matching: dict = field(default_factory=dict)
    skipped: int | None = None


def _cover_chain(ab, stops, colours, used_v, used_c):
    """Covers joining consecutive stops; returns the inner vertex runs."""
    g, h = ab.graph, ab.template
    runs = []
    for (p, q), c in zip(zip(stops, stops[1:]), colours):
        cov = find_cover(g, p, q, c, h.flex_left, h.flex_right, used_v, used_c, ab.allowed)
        if cov is None:
            return None
        u1, w, v1 = cov
        used_v |= {u1, w, v1}
        used_c |= {g.colour(p, u1), g.colour(w, v1), g.colour(v1, q)}
        runs.append([u1, w, v1])
    return runs


def absorb(ab: HAbsorber, path: Sequence[int], mode: str = "path",
           forbidden: int | None = None) -> AbsorbResult:
    """Extend ``path`` (disjoint from the absorber) to a rainbow Hamilton path, or cycle.

    Leftover vertices and colours are chained by covers through the flexible
    template part; the template is then matched around what the covers used.
    In cycle mode one leftover vertex (``forbidden``, if given) is skipped
    and every colour is used.
    """
    g, h = ab.graph, ab.template
    p = list(path)
    try:
        ok = bool(p) and verify_rainbow_path(g, p)
    except GraphError:
        ok = False
    if not ok:
        raise AbsorbError("input is not a rainbow path")
    if set(p) & ab.vertices or set(path_colours(g, p)) & ab.colours:
        raise AbsorbError("input path meets the absorber")
    if mode not in ("path", "cycle"):
        raise ValueError(f"unknown mode {mode!r}")

    left_v = sorted(set(range(g.n)) - ab.vertices - set(p))
    left_c = sorted(set(g.colours) - ab.colours - set(path_colours(g, p)))
    extra_runs: list = []
    skipped = None
    pre_used_v: set = set()
    pre_used_c: set = set()

    if mode == "cycle":
        if forbidden is None:
            if not left_v:
                raise AbsorbError("cycle mode needs a leftover vertex to skip")
            forbidden = left_v[-1]
        if forbidden in ab.vertices:
            raise AbsorbError("the skipped vertex cannot lie in the absorber")
        if forbidden in left_v:
            left_v.remove(forbidden)
        elif forbidden in (p[0], p[-1]):
            if len(p) < 2:
                raise AbsorbError("path too short to drop its end")
            if p[0] == forbidden:
                p.reverse()
            left_c = sorted(left_c + [g.colour(p[-2], p[-1])])
            p.pop()
        else:
            i = p.index(forbidden)
            w, w2 = p[i - 1], p[i + 1]
            cov = find_cover(g, w, w2, g.colour(forbidden, w), h.flex_left, h.flex_right,
                             (), (), ab.allowed)
            if cov is None:
                raise AbsorbError(f"no cover to route around vertex {forbidden}")
            pre_used_v = set(cov)
            pre_used_c = {g.colour(w, cov[0]), g.colour(cov[1], cov[2]), g.colour(cov[2], w2)}
            left_c = sorted(left_c + [g.colour(forbidden, w2)])
            p = p[:i] + list(cov) + p[i + 1:]
            extra_runs.append(list(cov))
        skipped = forbidden
        if len(left_c) != len(left_v) + 2:
            raise AbsorbError(f"{len(left_v)} leftover vertices and {len(left_c)} colours do not balance")
    elif len(left_c) != len(left_v) + 1:
        raise AbsorbError(f"{len(left_v)} leftover vertices and {len(left_c)} colours do not balance")

    attempts = [p, p[::-1]] if len(p) > 1 else [p]
    last_err = "no cover sequence found"
    for q in attempts:
        used_v, used_c = set(pre_used_v), set(pre_used_c)
        v0 = q[-1]
        direct = None
        if mode == "path" and not left_v and len(left_c) == 1:
            c = g.colour(v0, ab.u)
            if c == left_c[0] and ab.allowed(v0, ab.u):
                direct = []
        if direct is not None:
            runs = direct
        else:
            k_main = left_c if mode == "path" else left_c[:-1]
            runs = _cover_chain(ab, [v0] + left_v + [ab.u], k_main, used_v, used_c)
        if runs is None:
            continue
        tail_run = None
        if mode == "cycle":
            tail_run = _cover_chain(ab, [q[0], ab.u_prime], left_c[-1:], used_v, used_c)
            if tail_run is None:
                continue
        X = used_v & h.flex_left
        Y = used_c & h.flex_right
        if len(X) > len(h.flex_left) / 2:
            raise AbsorbError(f"covers used {len(X)} flexible vertices, more than half of {len(h.flex_left)}")
        try:
            m = robust_match(h, X, Y)
        except TemplateError as exc:
            last_err = str(exc)
            continue
        body = absorbing_path(ab, m.items())
        seq = list(q)
        stops = left_v + [ab.u]
        for run, stop in zip(runs, stops):
            seq += run + [stop]
        if direct is not None:
            seq.append(ab.u)
        seq += body[1:]
        if mode == "cycle":
            seq += tail_run[0][::-1]
            if not verify_rainbow_cycle_all_colours(g, seq):
                raise AbsorbError("internal error: assembled cycle does not verify")
        elif not verify_rainbow_hamilton_path(g, seq):
            raise AbsorbError("internal error: assembled path does not verify")
        return AbsorbResult(seq, mode, extra_runs + runs + (tail_run or []), m, skipped)
    raise AbsorbError(last_err)


# building an absorber from a random partition

@dataclass
class BuildReport:
    m: int = 0
    gadgets: int = 0
    links: LinkReport | None = None
    tail_matching: int = 0
    remainder: dict = field(default_factory=dict)


def build_absorber(g: ColouredGraph, part: AbsorberPartition, template: BipartiteTemplate | None = None,
                   link_mode: str = "spread-greedy") -> tuple[HAbsorber, BuildReport]:
    """Run embedding, gadget selection, tail matching and linking on a partition."""
    rep = BuildReport()
    if template is None:
        m = template_size(part)
        if m < 1:
            raise StageFailure("embed_template", "flexible or buffer slices too small for m >= 1")
        template = build_template(m)
    emb = embed_template(template, part)
    rep.m, rep.remainder = emb.m, emb.remainder
    h = emb.template
    vabs, cabs = part.vertices["abs"], part.colours["abs"]
    gadgets = greedy_gadgets(g, h, vabs, cabs, part.edges)
    rep.gadgets = len(gadgets)
    used_v = set().union(*(gd.used_vertices for gd in gadgets.values()))
    used_c = set().union(*(gd.used_colours for gd in gadgets.values()))
    order = [gadgets[k] for k in h.sorted_edges()]
    rest_v = vabs - used_v
    rest_c = cabs - used_c
    tail_m = greedy_rainbow_matching(g, rest_v, rest_c, part.edges)
    rep.tail_matching = len(tail_m)
    plan = plan_link_matchings(order, tail_m)
    busy_v = used_v | set(h.left) | {x for e in tail_m for x in e}
    busy_c = used_c | set(h.right) | {g.colour(*e) for e in tail_m}
    pairs = plan.m1 + plan.m2 + plan.m3 + plan.m4
    links, lrep = find_links(g, pairs, (part.vertices["link"], part.colours["link"]),
                             (part.vertices["link_res"], part.colours["link_res"]),
                             busy_v, busy_c, part.edges, link_mode)
    rep.links = lrep
    ab = assemble(g, h, gadgets, links, tail_m, plan, part.edges)
    return ab, rep
