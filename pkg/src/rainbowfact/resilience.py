"""Absorbing gadgets and the resilience properties of coloured graphs.

A gadget for ``(x, c)`` is a triangle ``x t1 t2`` (colours ``c1, c2, c3``)
together with a 4-cycle ``b d e a`` in which ``bd`` has colour ``c``,
``ba`` colour ``c1``, ``de`` colour ``c2`` and ``ae`` colour ``c3``.  Taking
either the triangle edges ``xt1, xt2`` plus ``ae, bd`` or the edges
``t1t2, ba, de`` lets a path pass through the gadget with or without ``x``
and ``c``.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph import ColouredGraph, ColourPartition, GraphError, _key, count_edges_within, crossing_edges


@dataclass(frozen=True)
class Gadget:
    """Labelled gadget; ``e`` is the 4-cycle vertex joined to ``d`` in colour ``c2``."""

    x: int
    c: int
    t1: int
    t2: int
    a: int
    b: int
    d: int
    e: int
    c1: int
    c2: int
    c3: int

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.x, self.t1, self.t2, self.a, self.b, self.d, self.e)

    @property
    def used_vertices(self) -> frozenset:
        return frozenset((self.t1, self.t2, self.a, self.b, self.d, self.e))

    @property
    def used_colours(self) -> frozenset:
        return frozenset((self.c1, self.c2, self.c3))

    def coloured_edges(self) -> list[tuple[int, int, int]]:
        return [(self.x, self.t1, self.c1), (self.x, self.t2, self.c2), (self.t1, self.t2, self.c3),
                (self.b, self.d, self.c), (self.a, self.b, self.c1), (self.d, self.e, self.c2),
                (self.a, self.e, self.c3)]

    @property
    def edges(self) -> frozenset:
        return frozenset(_key(u, v) for u, v, _ in self.coloured_edges())

    def mirrored(self) -> "Gadget":
        """The same subgraph with the roles of the two triangle colours exchanged."""
        return Gadget(self.x, self.c, self.t2, self.t1, self.e, self.d, self.b, self.a,
                      self.c2, self.c1, self.c3)

    @property
    def d3_edges(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (_key(self.t1, self.t2), _key(self.a, self.e))


def gadget_violations(g: ColouredGraph, gd: Gadget) -> list[str]:
    out = []
    if len(set(gd.vertices)) != 7:
        return ["gadget vertices are not distinct"]
    for u, v, c in gd.coloured_edges():
        if g.colour(u, v) != c:
            out.append(f"({u}, {v}) should have colour {c}")
    if gd.c3 == gd.c:
        out.append("triangle edge t1t2 must not have colour c")
    return out


def enumerate_gadgets(g: ColouredGraph, x: int, c: int) -> Iterator[Gadget]:
    """Every gadget for ``(x, c)`` exactly once (labelled with ``c1 < c2``)."""
    at_x = g.colours_at(x)
    cedges = g.colour_class(c)
    for c1, c2 in itertools.combinations(sorted(at_x), 2):
        if c in (c1, c2):
            continue
        t1, t2 = at_x[c1], at_x[c2]
        c3 = g.colour(t1, t2)
        if c3 is None or c3 == c:
            continue
        for p, q in cedges:
            for b, d in ((p, q), (q, p)):
                a, e = g.nbr(b, c1), g.nbr(d, c2)
                if a is None or e is None or g.colour(a, e) != c3:
                    continue
                gd = Gadget(x, c, t1, t2, a, b, d, e, c1, c2, c3)
                if len(set(gd.vertices)) == 7:
                    yield gd


# gadgets with an extra edge, relative to a colour partition

@dataclass(frozen=True)
class XcpGadget:
    """Gadget whose ``c1`` lies in D1, ``c2`` in D2, ``c3`` in D3, plus ``f = xb`` in D4."""

    gadget: Gadget
    f_colour: int

    @property
    def edges(self) -> frozenset:
        return self.gadget.edges | {_key(self.gadget.x, self.gadget.b)}

    @property
    def c_edge(self) -> tuple[int, int]:
        return _key(self.gadget.b, self.gadget.d)

    @property
    def d3_edges(self):
        return self.gadget.d3_edges


def _check_xcp_graph(g: ColouredGraph, c: int, part: ColourPartition) -> None:
    if c in part.colours:
        raise GraphError(f"colour {c} must lie outside D")
    need = set(part.colours) | {c}
    if set(g.colours) != need or g.relaxed:
        raise GraphError("graph must be strictly coloured by D together with c")


def enumerate_xcp(g: ColouredGraph, x: int, c: int, part: ColourPartition) -> Iterator[XcpGadget]:
    _check_xcp_graph(g, c, part)
    for gd in enumerate_gadgets(g, x, c):
        for h in (gd, gd.mirrored()):
            if h.c1 in part[1] and h.c2 in part[2] and h.c3 in part[3]:
                f = g.colour(x, h.b)
                if f is not None and f in part[4]:
                    yield XcpGadget(h, f)


def distinguishable(gadgets: list[XcpGadget]) -> list[XcpGadget]:
    """Gadgets none of whose D3 edges lies in another gadget.

    Within these gadgets the only D3-coloured edges are the two D3 edges,
    so it suffices to bucket gadgets by those.
    """
    owners: Counter = Counter()
    for j in gadgets:
        for e in set(j.d3_edges):
            owners[e] += 1
    return [j for j in gadgets if all(owners[e] == 1 for e in j.d3_edges)]


def saturation_map(g: ColouredGraph, x: int, c: int, part: ColourPartition) -> dict[tuple[int, int], int]:
    """Saturation of every ``c``-edge: its number of distinguishable gadgets."""
    dist = distinguishable(list(enumerate_xcp(g, x, c, part)))
    sat = {e: 0 for e in g.colour_class(c)}
    for j in dist:
        sat[j.c_edge] += 1
    return sat


def saturation(g: ColouredGraph, x: int, c: int, part: ColourPartition, e: tuple[int, int]) -> int:
    sat = saturation_map(g, x, c, part)
    e = _key(*e)
    if e not in sat:
        raise GraphError(f"{e} is not an edge of colour {c}")
    return sat[e]


def classify(sat: int, k: int) -> str:
    if sat >= k + 6:
        return "supersaturated"
    if sat >= k:
        return "saturated"
    return "unsaturated"


@dataclass
class RValue:
    r: int
    saturated: list
    unsaturated: list
    supersaturated: list


def r_value(g: ColouredGraph, x: int, c: int, part: ColourPartition) -> RValue:
    """``|D| * #saturated + sum of saturations over unsaturated c-edges``."""
    k = len(part.colours)
    sat = saturation_map(g, x, c, part)
    saturated = sorted(e for e, s in sat.items() if s >= k)
    unsat = sorted(e for e, s in sat.items() if s < k)
    sup = sorted(e for e, s in sat.items() if s >= k + 6)
    return RValue(k * len(saturated) + sum(sat[e] for e in unsat), saturated, unsat, sup)


# well-spread collections

@dataclass
class SpreadResult:
    kept: list
    rejected: list = field(default_factory=list)


def greedy_well_spread(gadgets: Iterable[Gadget], t: int) -> SpreadResult:
    """Keep gadgets in order while no vertex, edge or colour is used more than ``t`` times."""
    vc, ec, cc = Counter(), Counter(), Counter()
    res = SpreadResult([])
    for gd in gadgets:
        vs, es, cs = gd.used_vertices, gd.edges, gd.used_colours
        why = None
        if any(vc[v] >= t for v in vs):
            why = "vertex"
        elif any(ec[e] >= t for e in es):
            why = "edge"
        elif any(cc[c] >= t for c in cs):
            why = "colour"
        if why:
            res.rejected.append((gd, why))
            continue
        vc.update(vs)
        ec.update(es)
        cc.update(cs)
        res.kept.append(gd)
    return res


def is_well_spread(gadgets: Iterable[Gadget], t: int) -> bool:
    vc, ec, cc = Counter(), Counter(), Counter()
    for gd in gadgets:
        vc.update(gd.used_vertices)
        ec.update(gd.edges)
        cc.update(gd.used_colours)
    return all(v <= t for cnt in (vc, ec, cc) for v in cnt.values())


# resilience checks

@dataclass
class Verdict:
    passed: bool
    exact: bool
    checked: int
    witness: object = None
    note: str = ""


def is_locally_edge_resilient(g: ColouredGraph, eps: float, mode: str = "exact",
                              budget: int = 10**7, samples: int = 10_000,
                              rng: random.Random | None = None) -> Verdict:
    """Every ``ceil(eps n)`` vertices and colours span at least ``eps^3 n^2 / 100`` edges.

    Checking sets of exactly that size suffices because the edge count only
    grows with the sets.  Sampled mode can only refute; a pass there is
    reported as inexact.
    """
    n = g.n
    s = math.ceil(eps * n)
    need = eps ** 3 * n * n / 100
    if s > n or s > len(g.colours):
        return Verdict(True, True, 0, note="no sets of the required size")
    total = math.comb(n, s) * math.comb(len(g.colours), s)
    if mode == "exact":
        if total > budget:
            raise GraphError(f"exact check needs {total} set pairs, budget is {budget}")
        checked = 0
        for vs in itertools.combinations(range(n), s):
            inner = Counter(g.colour(u, v) for u, v in itertools.combinations(vs, 2)
                            if g.has_edge(u, v))
            for cs in itertools.combinations(g.colours, s):
                checked += 1
                if sum(inner[c] for c in cs) < need:
                    return Verdict(False, True, checked, (vs, cs))
        return Verdict(True, True, checked)
    if mode == "sampled":
        rng = rng or random.Random(0)
        for i in range(samples):
            vs = rng.sample(range(n), s)
            cs = rng.sample(g.colours, s)
            if count_edges_within(g, vs, cs) < need:
                return Verdict(False, True, i + 1, (tuple(sorted(vs)), tuple(sorted(cs))))
        return Verdict(True, False, samples, note=f"no violation in {samples} samples")
    raise ValueError(f"unknown mode {mode!r}")


def is_quasirandom(g: ColouredGraph, mode: str = "exact", budget: int = 10**7,
                   samples: int = 10_000, rng: random.Random | None = None) -> Verdict:
    """All ``A, B`` with ``|A| = |B| = |D|`` have ``e(A, B) < 8 (|D| - 1)^3 / n``."""
    n, k = g.n, len(g.colours)
    bound = 8 * (k - 1) ** 3 / n
    if k > n:
        return Verdict(True, True, 0, note="no sets of the required size")
    if mode == "exact":
        total = math.comb(n, k) ** 2
        if total > budget:
            raise GraphError(f"exact check needs {total} set pairs, budget is {budget}")
        subsets = list(itertools.combinations(range(n), k))
        checked = 0
        for A in subsets:
            for B in subsets:
                checked += 1
                if crossing_edges(g, A, B) >= bound:
                    return Verdict(False, True, checked, (A, B))
        return Verdict(True, True, checked)
    if mode == "sampled":
        rng = rng or random.Random(0)
        for i in range(samples):
            A, B = rng.sample(range(n), k), rng.sample(range(n), k)
            if crossing_edges(g, A, B) >= bound:
                return Verdict(False, True, i + 1, (tuple(sorted(A)), tuple(sorted(B))))
        return Verdict(True, False, samples, note=f"no violation in {samples} samples")
    raise ValueError(f"unknown mode {mode!r}")


def gadget_resilience_parameters(n: int, mu: float) -> tuple[int, int]:
    """Spread cap ``t = floor(5 mu n / 4)`` and required count ``ceil(mu^4 n^2 / 2^23)``."""
    return math.floor(5 * mu * n / 4), math.ceil(mu ** 4 * n * n / 2 ** 23)


def is_robustly_gadget_resilient(g: ColouredGraph, mu: float) -> Verdict:
    """One-sided check: for every ``(x, c)`` greedily build a well-spread gadget family.

    A pass certifies the property.  A failure only means the greedy
    construction fell short at the reported ``(x, c)``.
    """
    if not g.is_full:
        raise GraphError("expected a 1-factorization of K_n")
    t, need = gadget_resilience_parameters(g.n, mu)
    checked = 0
    for x in range(g.n):
        for c in g.colours:
            checked += 1
            got = 0
            vc, ec, cc = Counter(), Counter(), Counter()
            for gd in enumerate_gadgets(g, x, c):
                if got >= need:
                    break
                vs, es, cs = gd.used_vertices, gd.edges, gd.used_colours
                if any(vc[v] >= t for v in vs) or any(ec[e] >= t for e in es) \
                        or any(cc[q] >= t for q in cs):
                    continue
                vc.update(vs)
                ec.update(es)
                cc.update(cs)
                got += 1
            if got < need:
                return Verdict(False, False, checked, (x, c),
                               note=f"greedy found {got} of {need} gadgets")
    return Verdict(True, True, checked, note=f"t={t}, need={need}")


def count_gadgets_by_edge(gadgets: Iterable[XcpGadget]) -> dict:
    out = defaultdict(int)
    for j in gadgets:
        out[j.c_edge] += 1
    return dict(out)
