import dataclasses
import itertools
import random
from fractions import Fraction

import pytest

from rainbowfact.absorber import (SLICES, AbsorbError, AbsorberConfig, EdgeSample, Link, StageFailure, absorb,
                                  absorber_violations, absorbing_path, build_absorber, find_cover, find_links,
                                  greedy_rainbow_matching, partition_random, plan_link_matchings,
                                  template_size)
from rainbowfact.graph import ColouredGraph, path_colours, verify_rainbow_cycle_all_colours, \
    verify_rainbow_hamilton_path, verify_rainbow_path
from rainbowfact.planted import planted_instance
from rainbowfact.resilience import Gadget
from rainbowfact.template import BipartiteTemplate, circulant_template, complete_template

from conftest import random_factorization


@pytest.fixture(scope="module")
def planted():
    inst = planted_instance(circulant_template(12, 7), seed=0, path_len=10, leftover_colours=2)
    ab, rep = build_absorber(inst.graph, inst.partition, template=inst.template)
    return inst, ab, rep


@pytest.fixture(scope="module")
def toy():
    inst = planted_instance(complete_template(2, 2, 2, 2), seed=3, path_len=0)
    ab, _ = build_absorber(inst.graph, inst.partition, template=inst.template)
    return inst, ab


# configuration

def test_standard_mode_closed_form():
    cfg = AbsorberConfig("1e-5", "2e-5", "3e-5", "1e-4")
    e = 896 * (Fraction("3e-5") - 2 * Fraction("1e-5"))
    assert cfg.edge_ratio == e
    p, q = cfg.vertex_probs(), cfg.colour_probs()
    assert p["abs"] == 6 * e + 2 * Fraction("1e-4") and q["abs"] == 3 * e + Fraction("1e-4")
    assert p["link"] == 9 * e + 3 * Fraction("1e-4") and q["link"] == 12 * e + 4 * Fraction("1e-4")
    assert p["buff"] == q["buff"] == Fraction(5, 2) * Fraction("3e-5")
    assert p["link_res"] == Fraction("2e-5") / 3
    assert sum(p.values()) == sum(q.values()) == 1
    assert p["main"] == q["main"] and cfg.beta == 1 - p["main"]


def test_config_validation():
    with pytest.raises(ValueError, match="eps < gamma"):
        AbsorberConfig(0.1, 0.05, 0.2, 0.3)
    with pytest.raises(ValueError, match="between 0 and 1"):
        AbsorberConfig.relaxed(eps=0)
    with pytest.raises(ValueError, match="out of range"):
        AbsorberConfig(0.01, 0.02, 0.03, 0.04)
    with pytest.raises(ValueError, match="mode"):
        AbsorberConfig(0.01, 0.02, 0.03, 0.04, mode="loose")
    # this preset over-allocates the slices
    with pytest.raises(ValueError, match="out of range"):
        AbsorberConfig.relaxed(0.01, 0.03, 0.1, 0.25)
    cfg = AbsorberConfig.relaxed()
    assert cfg.edge_ratio == 0 and 0 < cfg.vertex_probs()["main"] < 1


def test_edge_sample_is_deterministic_and_symmetric():
    s = EdgeSample(42, 0.3)
    pairs = list(itertools.combinations(range(60), 2))
    keep = [s(u, v) for u, v in pairs]
    assert keep == [EdgeSample(42, 0.3)(v, u) for u, v in pairs]
    assert abs(sum(keep) / len(keep) - 0.3) < 0.05
    assert keep != [EdgeSample(43, 0.3)(u, v) for u, v in pairs]
    assert EdgeSample(1, 1.0)(0, 1) and not EdgeSample(1, 0.0)(0, 1)


def test_partition_covers_everything_once():
    g = random_factorization(40, 0, steps=5)
    cfg = AbsorberConfig.relaxed()
    a = partition_random(g, cfg, random.Random(5))
    b = partition_random(g, cfg, random.Random(5))
    assert a.to_json() == b.to_json()
    for side, items in ((a.vertices, range(g.n)), (a.colours, g.colours)):
        assert set(side) == set(SLICES)
        assert sorted(x for k in SLICES for x in side[k]) == sorted(items)
    assert template_size(a) >= 0


# links and gadgets on hand-made graphs

def _gadget(base):
    x, t1, t2, a, b, d, e = range(base, base + 7)
    return Gadget(x, 100, t1, t2, a, b, d, e, 101, 102, 103)


def test_plan_link_matchings_pairs():
    g1, g2 = _gadget(0), _gadget(10)
    plan = plan_link_matchings([g1, g2], [(30, 31), (32, 33)])
    assert plan.m1 == [(3, 5), (13, 15)] and plan.m2 == [(1, 6), (11, 16)]
    assert plan.m3 == [(2, 14)]
    # b of the first gadget (4) and t2 of the last (12): the lower anchors the tail
    assert plan.anchor == 4 and plan.free_end == 12
    assert plan.m4 == [(4, 30), (31, 32)] and plan.tail_end == 33
    with pytest.raises(AbsorbError):
        plan_link_matchings([], [])


def test_greedy_rainbow_matching_is_rainbow_and_maximal():
    g = random_factorization(12, 1)
    m = greedy_rainbow_matching(g, range(12), g.colours[:6])
    cols = [g.colour(u, v) for u, v in m]
    assert len(set(cols)) == len(cols) and len({x for e in m for x in e}) == 2 * len(m)
    used_v = {x for e in m for x in e}
    for u, v, c in g.edges():
        if c in g.colours[:6]:
            assert u in used_v or v in used_v or c in cols


def test_find_links_uses_reserve_and_reports():
    # path 0-1-2-3-4 in the main pool is missing, the reserve has 0-5-6-7-4
    g = ColouredGraph(8, range(4), [(0, 5, 0), (5, 6, 1), (6, 7, 2), (7, 4, 3)], relaxed=True)
    links, rep = find_links(g, [(0, 4)], ({1, 2, 3}, {0, 1, 2, 3}), ({5, 6, 7}, {0, 1, 2, 3}), (), ())
    assert links == [Link((0, 5, 6, 7, 4), (0, 1, 2, 3))] and rep.reserve == 1
    with pytest.raises(StageFailure):
        find_links(g, [(0, 4)], ({5, 6, 7}, {0, 1, 2, 3}), None, (), {2}, mode="greedy")
    with pytest.raises(ValueError):
        find_links(g, [], ({5}, {0}), None, (), (), mode="lazy")


# the planted absorber

def test_builder_recovers_planted_structure(planted):
    inst, ab, rep = planted
    assert ab.gadgets == inst.gadgets
    assert sorted(ab.links.values(), key=lambda l: l.ends) == sorted(inst.links, key=lambda l: l.ends)
    assert absorber_violations(ab) == []
    assert rep.gadgets == len(inst.template.edges) == 84
    assert rep.m == 6


def test_toy_absorber_every_matching(toy):
    inst, ab = toy
    h = ab.template
    edges = sorted(h.edges)
    seen = set()
    for k in range(3):
        for m in itertools.combinations(edges, k):
            if len({v for v, _ in m}) < k or len({c for _, c in m}) < k:
                continue
            p = absorbing_path(ab, m)
            assert verify_rainbow_path(ab.graph, p)
            assert p[0] == ab.u and p[-1] == ab.u_prime
            assert set(p) & set(h.left) == {v for v, _ in m}
            assert set(path_colours(ab.graph, p)) & set(h.right) == {c for _, c in m}
            seen.add(m)
    # empty, four single edges, two perfect matchings
    assert len(seen) == 7
    with pytest.raises(AbsorbError):
        absorbing_path(ab, [edges[0], edges[1]] if edges[0][0] == edges[1][0] else [edges[0], edges[2]])
    with pytest.raises(AbsorbError):
        absorbing_path(ab, [(-1, -1)])


def test_dropping_a_link_breaks_the_absorber(toy):
    _, ab = toy
    gd = ab.gadgets[ab.order[0]]
    links = dict(ab.links)
    del links[tuple(sorted((gd.a, gd.d)))]
    bad = absorber_violations(dataclasses.replace(ab, links=links))
    assert any("completing" in s for s in bad)


def test_extra_link_is_superfluous(toy):
    _, ab = toy
    g = ab.graph
    gd = ab.gadgets[ab.order[0]]
    n, k = g.n, len(g.colours)
    inner, cols = [n, n + 1, n + 2], list(range(max(g.colours) + 1, max(g.colours) + 5))
    vs = (gd.t1, *inner, gd.t2)
    g2 = ColouredGraph(n + 3, list(g.colours) + cols,
                       list(g.edges()) + [(vs[i], vs[i + 1], cols[i]) for i in range(4)], relaxed=True)
    links = dict(ab.links)
    links[tuple(sorted((gd.t1, gd.t2)))] = Link(vs, tuple(cols))
    bad = absorber_violations(dataclasses.replace(ab, graph=g2, links=links))
    assert any("superfluous" in s for s in bad)
    assert k == n - 1


def test_planted_absorbs_in_both_modes(planted):
    inst, ab, _ = planted
    r = absorb(ab, inst.path, "path")
    assert verify_rainbow_hamilton_path(inst.graph, r.vertices)
    assert len(r.covers) == len(inst.leftover_colours)
    c = absorb(ab, inst.path, "cycle")
    assert c.skipped == inst.leftover_vertices[-1]
    assert verify_rainbow_cycle_all_colours(inst.graph, c.vertices)
    assert len(c.vertices) == inst.graph.n - 1


def test_absorb_input_checks(planted):
    inst, ab, _ = planted
    with pytest.raises(AbsorbError, match="not a rainbow path"):
        absorb(ab, [inst.path[0], inst.path[2]])
    with pytest.raises(AbsorbError, match="meets the absorber"):
        absorb(ab, [ab.u])
    with pytest.raises(ValueError):
        absorb(ab, inst.path, "loop")
    # the freed vertex has no planted cover
    with pytest.raises(AbsorbError, match="no cover"):
        absorb(ab, inst.path[:-1])
    with pytest.raises(AbsorbError, match="absorber"):
        absorb(ab, inst.path, "cycle", forbidden=ab.u)


def test_absorb_refuses_more_than_half_the_flexible_side(planted):
    inst, ab, _ = planted
    used = {v for run in absorb(ab, inst.path, "path").covers for v in run}
    h = ab.template
    others = sorted(h.flex_left - used)[:2]
    # six cover vertices out of eight flexible ones
    narrow = BipartiteTemplate.build(h.left, h.right, h.edges, used | set(others), h.flex_right)
    with pytest.raises(AbsorbError, match="more than half"):
        absorb(dataclasses.replace(ab, template=narrow), inst.path, "path")


def test_direct_edge_when_nothing_is_left(toy):
    inst, ab = toy
    g = ab.graph
    n, top = g.n, max(g.colours)
    path = [n, n + 1, n + 2]
    new = [(n, n + 1, top + 1), (n + 1, n + 2, top + 2), (n + 2, ab.u, top + 3)]
    g2 = ColouredGraph(n + 3, list(g.colours) + [top + 1, top + 2, top + 3], list(g.edges()) + new,
                       relaxed=True)
    ab2 = dataclasses.replace(ab, graph=g2)
    r = absorb(ab2, path, "path")
    assert r.covers == [] and r.vertices[:4] == path + [ab.u]
    assert verify_rainbow_hamilton_path(g2, r.vertices)


def test_find_cover_is_lexicographic(planted):
    inst, ab, _ = planted
    g, h = ab.graph, ab.template
    c = inst.leftover_colours[0]
    cov = find_cover(g, inst.path[-1], inst.leftover_vertices[0], c, h.flex_left, h.flex_right)
    assert cov is not None
    u1, w, v1 = cov
    assert g.colour(u1, w) == c
    assert find_cover(g, inst.path[-1], inst.leftover_vertices[0], c, (), h.flex_right) is None


def test_builder_reports_stage_on_failure():
    g = random_factorization(12, 2)
    part = partition_random(g, AbsorberConfig.relaxed(), random.Random(0))
    with pytest.raises(StageFailure) as err:
        build_absorber(g, part)
    assert err.value.stage in ("embed_template", "greedy_gadgets", "find_links")
