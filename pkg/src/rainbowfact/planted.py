"""Planted instances: sparse coloured graphs built around a known absorber.

The graph contains exactly the gadgets, links, tail, a rainbow path ``P'``,
leftover vertices and colours, and the covers needed to absorb the
leftovers in both path and cycle mode.  Ids are shuffled so that nothing
depends on a convenient labelling.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .absorber import AbsorberPartition, Link, keep_all, plan_link_matchings
from .graph import ColouredGraph
from .resilience import Gadget
from .template import BipartiteTemplate


@dataclass
class PlantedInstance:
    graph: ColouredGraph
    template: BipartiteTemplate
    partition: AbsorberPartition
    gadgets: dict
    links: list
    tail_matching: list
    path: list
    leftover_vertices: list
    leftover_colours: list


class _Pool:
    def __init__(self, ids):
        self.ids = list(ids)
        self.i = 0

    def take(self, k=1):
        out = self.ids[self.i:self.i + k]
        if len(out) < k:
            raise ValueError("id pool exhausted")
        self.i += k
        return out


def planted_instance(template: BipartiteTemplate, seed: int = 0, tail_len: int = 1,
                     path_len: int = 10, leftover_colours: int = 2) -> PlantedInstance:
    """Plant an absorber for ``template`` together with what ``absorb`` needs.

    With ``path_len = 0`` only the absorber is planted.  Otherwise the path
    covers chain ``P'`` through ``leftover_colours - 1`` leftover vertices to
    the tail, and the cycle covers skip the last leftover vertex and close
    through the free gadget end; the two cover families use disjoint
    flexible vertices and colours.
    """
    rng = random.Random(seed)
    L, R = sorted(template.left), sorted(template.right)
    if len(L) != len(R):
        raise ValueError("template sides must have equal size")
    ne = len(template.edges)
    k = leftover_colours if path_len else 0
    ell = k - 1 if path_len else 0
    if path_len and k < 2:
        raise ValueError("need at least two leftover colours to plant both cover families")
    if path_len and 6 * k > min(len(template.flex_left), len(template.flex_right)):
        raise ValueError("flexible sides are too small for the planted covers")
    nlinks = 3 * ne - 1 + tail_len
    n = len(L) + 6 * ne + 2 * tail_len + 3 * nlinks + path_len + ell
    ncol = len(R) + 3 * ne + tail_len + 4 * nlinks + max(path_len - 1, 0) + k
    assert ncol == n - 1
    vids = list(range(n))
    cids = list(range(n - 1))
    rng.shuffle(vids)
    rng.shuffle(cids)
    vp, cp = _Pool(vids), _Pool(cids)
    edges: list[tuple[int, int, int]] = []

    lmap = dict(zip(L, vp.take(len(L))))
    rmap = dict(zip(R, cp.take(len(R))))
    h = BipartiteTemplate.build(lmap.values(), rmap.values(),
                                [(lmap[a], rmap[b]) for a, b in template.edges],
                                [lmap[a] for a in template.flex_left],
                                [rmap[b] for b in template.flex_right])

    gadgets = {}
    for v, c in h.sorted_edges():
        t1, t2, a, b, d, e = vp.take(6)
        c1, c2, c3 = cp.take(3)
        gd = Gadget(v, c, t1, t2, a, b, d, e, c1, c2, c3)
        if c1 > c2:
            gd = gd.mirrored()
        gadgets[(v, c)] = gd
        edges.extend(gd.coloured_edges())

    tail_m = []
    for _ in range(tail_len):
        p, q = vp.take(2)
        (c,) = cp.take(1)
        tail_m.append((min(p, q), max(p, q)))
        edges.append((p, q, c))
    # same orientation and order as a greedy matching scan
    tail_m.sort()

    order = [gadgets[key] for key in h.sorted_edges()]
    plan = plan_link_matchings(order, tail_m)
    links = []
    for x, y in plan.m1 + plan.m2 + plan.m3 + plan.m4:
        inner = vp.take(3)
        cols = tuple(cp.take(4))
        vs = (x, *inner, y)
        links.append(Link(vs, cols))
        edges.extend((vs[i], vs[i + 1], cols[i]) for i in range(4))

    path = vp.take(path_len)
    pcols = cp.take(max(path_len - 1, 0))
    edges.extend((path[i], path[i + 1], pcols[i]) for i in range(path_len - 1))
    left_v = sorted(vp.take(ell))
    left_c = sorted(cp.take(k))

    if path_len:
        u = plan.tail_end
        u_prime = plan.free_end
        at: dict[int, set] = {}
        for x, y, c in edges:
            at.setdefault(x, set()).add(c)
            at.setdefault(y, set()).add(c)
        flex_v = sorted(h.flex_left)
        flex_c = sorted(h.flex_right)
        rng.shuffle(flex_v)
        rng.shuffle(flex_c)

        def plant(stops, colours):
            for (p, q), mid in zip(zip(stops, stops[1:]), colours):
                u1, w, v1 = flex_v[:3]
                del flex_v[:3]
                trio = []
                for x, y in ((p, u1), (w, v1), (v1, q)):
                    pick = next(f for f in flex_c if f not in at.get(x, set()) | at.get(y, set()))
                    flex_c.remove(pick)
                    trio.append((x, y, pick))
                trio.append((u1, w, mid))
                for x, y, c in trio:
                    at.setdefault(x, set()).add(c)
                    at.setdefault(y, set()).add(c)
                edges.extend(trio)

        # the cover at the free gadget end is the only constrained one, so it goes first
        plant([path[0], u_prime], left_c[-1:])
        plant([path[-1]] + left_v + [u], left_c)
        plant([path[-1]] + left_v[:-1] + [u], left_c[:-1])

    g = ColouredGraph(n, range(n - 1), edges, relaxed=True)
    tail_v = {x for e in tail_m for x in e}
    vsl = {"flex": frozenset(h.flex_left), "buff": frozenset(set(h.left) - h.flex_left),
           "abs": frozenset(set().union(*(gd.used_vertices for gd in gadgets.values())) | tail_v),
           "link": frozenset(x for lk in links for x in lk.inner), "link_res": frozenset(),
           "main": frozenset(path) | frozenset(left_v)}
    csl = {"flex": frozenset(h.flex_right), "buff": frozenset(set(h.right) - h.flex_right),
           "abs": frozenset(set().union(*(gd.used_colours for gd in gadgets.values()))
                            | {g.colour(*e) for e in tail_m}),
           "link": frozenset(c for lk in links for c in lk.colours), "link_res": frozenset(),
           "main": frozenset(pcols) | frozenset(left_c)}
    part = AbsorberPartition(vsl, csl, keep_all)
    return PlantedInstance(g, h, part, gadgets, links, tail_m, list(path), left_v, left_c)
