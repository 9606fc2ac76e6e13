import json
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from rainbowfact.template import (BipartiteTemplate, TemplateError, build_template, circulant_link,
                                  circulant_template, complete_template, compose_2rmbg, max_matching,
                                  perfect_matching, random_regular_bipartite, rmbg_complete, robust_match,
                                  verify_one_sided, verify_robust)

from oracles import robust_by_networkx


@st.composite
def templates(draw, max_side=6):
    size = draw(st.integers(1, max_side))
    edges = draw(st.sets(st.tuples(st.integers(0, size - 1), st.integers(0, size - 1))))
    fl = draw(st.sets(st.integers(0, size - 1)))
    fr = draw(st.sets(st.integers(0, size - 1)))
    return BipartiteTemplate.build(range(size), range(size), edges, fl, fr)


@given(templates())
def test_max_matching_size_matches_networkx(t):
    G = nx.Graph()
    L = [("L", a) for a in t.left]
    G.add_nodes_from(L)
    G.add_nodes_from(("R", b) for b in t.right)
    G.add_edges_from((("L", a), ("R", b)) for a, b in t.edges)
    ref = nx.bipartite.hopcroft_karp_matching(G, top_nodes=L)
    m = max_matching(t.adjacency(), t.left, set(t.right))
    assert len(m) == len(ref) // 2
    assert len(set(m.values())) == len(m)
    assert all((a, b) in t.edges for a, b in m.items())


@given(templates())
def test_verify_robust_matches_networkx(t):
    v = verify_robust(t, mode="exhaustive")
    ref = robust_by_networkx(t)
    assert v.exhaustive
    assert v.passed == (ref is None)
    if ref is not None:
        assert v.witness == ref


def test_broken_template_gives_witness():
    # a perfect matching alone: removing a and a b that is not its partner breaks it
    t = BipartiteTemplate.build(range(4), range(4), [(i, i) for i in range(4)], range(4), range(4))
    v = verify_robust(t)
    assert not v.passed and v.exhaustive
    X, Y = v.witness
    assert len(X) == len(Y) == 1 and X != Y
    assert perfect_matching(t, X, Y) is None


def test_sampled_mode_finds_a_violation():
    t = BipartiteTemplate.build(range(6), range(6), [(i, i) for i in range(6)], range(6), range(6))
    v = verify_robust(t, mode="sampled", samples=500, rng=random.Random(1))
    assert not v.passed and not v.exhaustive
    assert perfect_matching(t, *v.witness) is None


def test_circulant_templates_are_robust_above_half():
    for size in (4, 5, 6, 7):
        for degree in range(1, size + 1):
            v = verify_robust(circulant_template(size, degree))
            if 2 * degree > size:
                assert v.passed
            assert v.passed == (robust_by_networkx(circulant_template(size, degree)) is None)
    with pytest.raises(TemplateError):
        circulant_template(3, 4)


def test_robust_match_errors_and_success():
    t = complete_template(4, 4, 4, 4)
    m = robust_match(t, [0, 1], [2, 3])
    assert set(m) == {2, 3} and set(m.values()) == {0, 1}
    with pytest.raises(TemplateError, match="differs"):
        robust_match(t, [0], [])
    with pytest.raises(TemplateError, match="flexible"):
        robust_match(complete_template(4, 4, 2, 2), [3], [0])
    with pytest.raises(TemplateError, match="half"):
        robust_match(t, [0, 1, 2], [0, 1, 2])
    sparse = BipartiteTemplate.build(range(2), range(2), [(0, 0), (1, 1)], range(2), range(2))
    with pytest.raises(TemplateError, match="no perfect matching"):
        robust_match(sparse, [0], [1])


def test_template_rejects_bad_edges_and_flex():
    with pytest.raises(TemplateError):
        BipartiteTemplate.build([0], [0], [(0, 1)])
    with pytest.raises(TemplateError):
        BipartiteTemplate.build([0], [0], [], flex_left=[5])


def test_dict_round_trip():
    t = build_template(1, "random-regular", d=4, rng=random.Random(2))
    back = BipartiteTemplate.from_dict(json.loads(json.dumps(t.to_dict())))
    assert back == t
    with pytest.raises(TemplateError, match="malformed"):
        BipartiteTemplate.from_dict({"left": [0]})


def test_build_template_strategies():
    t = build_template(1)
    assert len(t.left) == len(t.right) == 7 and len(t.flex_left) == len(t.flex_right) == 2
    assert verify_robust(t).passed
    r = build_template(2, "random-regular", d=8, rng=random.Random(0), samples=300)
    assert r.is_regular(8)
    assert verify_robust(r, mode="exhaustive").passed
    with pytest.raises(TemplateError):
        build_template(0)
    with pytest.raises(TemplateError):
        build_template(1, "random-regular", d=9)
    with pytest.raises(TemplateError):
        build_template(1, "magic")


def test_compose_two_one_sided_templates():
    m = 2
    h, h2 = rmbg_complete(m), rmbg_complete(m)
    assert verify_one_sided(h, m).passed
    link = circulant_link(m, 3)
    t = compose_2rmbg(h, h2, link)
    assert len(t.left) == len(t.right) == 7 * m
    assert len(t.flex_left) == len(t.flex_right) == 2 * m
    assert verify_robust(t, mode="exhaustive").passed
    assert robust_by_networkx(t) is None


def test_compose_rejects_bad_shapes():
    m = 1
    h = rmbg_complete(m)
    with pytest.raises(TemplateError):
        compose_2rmbg(complete_template(4, 4, 0, 2), h, circulant_link(m, 2))
    # no matching between the flexible parts when the link avoids them
    bad = BipartiteTemplate.build(range(4), range(4), [(0, 2), (1, 3), (2, 0), (3, 1)])
    with pytest.raises(TemplateError, match="flexible"):
        compose_2rmbg(h, h, bad)


def test_one_sided_witness():
    h = BipartiteTemplate.build(range(3), range(4), [(0, 0), (1, 1), (2, 2), (0, 3), (1, 3)],
                                (), range(3))
    # without right vertex 2, left vertex 2 has no partner
    v = verify_one_sided(h, 1)
    assert not v.passed and v.witness == ((), (2,))


@given(st.integers(1, 10), st.data())
def test_random_regular_bipartite_is_regular(size, data):
    d = data.draw(st.integers(0, size))
    edges = random_regular_bipartite(size, d, random.Random(data.draw(st.integers(0, 999))))
    t = BipartiteTemplate.build(range(size), range(size), edges)
    assert len(edges) == size * d
    assert d == 0 or t.is_regular(d)
