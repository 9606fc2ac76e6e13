import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from rainbowfact.factorgen import canonical_form, count_one_factorizations, uniform_sample_small
from rainbowfact.graph import ColouredGraph, count_edges_within, crossing_edges, restrict
from rainbowfact.resilience import enumerate_xcp
from rainbowfact.switching import (RotationSystem, SpinSystem, SwitchError, TWIST_D3_EDGES, TWIST_NEW_EDGES,
                                   TwistSystem, apply_rotation, apply_spin, apply_twist, jm_square_walk,
                                   random_rotation, random_spin, random_switch_walk, rotation_violations,
                                   spin_violations, twist_candidates, twist_gadget_edges, twist_violations)

from conftest import random_factorization, twist_setting
from oracles import twist_systems


def _one_colour_graph():
    # colour 0 is a perfect matching of 8 vertices, colour 1 a single edge
    return ColouredGraph(8, [0, 1], [(0, 5, 0), (1, 2, 0), (3, 4, 0), (6, 7, 0), (0, 2, 1)],
                         relaxed=True)


def test_spin_by_hand():
    # vw = 1-2, xy = 3-4, zu = 5-0 all colour 0; V' = {0, 1}
    g = _one_colour_graph()
    s = SpinSystem(0, 1, 2, 3, 4, 5)
    assert spin_violations(g, s, {0, 1}) == []
    h = apply_spin(g, s, {0, 1})
    assert h.colour(0, 1) == h.colour(2, 3) == h.colour(4, 5) == 0
    assert not h.has_edge(1, 2) and not h.has_edge(3, 4) and not h.has_edge(0, 5)
    assert count_edges_within(h, {0, 1}, h.colours) == count_edges_within(g, {0, 1}, g.colours) + 1


def test_spin_rejects_bad_systems():
    g = _one_colour_graph()
    assert spin_violations(g, SpinSystem(0, 1, 2, 3, 4, 4), {0, 1}) == ["vertices are not distinct"]
    assert any("V'" in m for m in spin_violations(g, SpinSystem(0, 1, 2, 3, 4, 5), {0}))
    with pytest.raises(SwitchError):
        # u = 0, v = 2 are already joined
        apply_spin(g, SpinSystem(0, 2, 1, 3, 4, 5), {0, 2})


def test_rotation_by_hand_and_inverse():
    g = _one_colour_graph()
    r = RotationSystem(1, 2, 3, 4)
    assert rotation_violations(g, r, {1}, {2}) == []
    h = apply_rotation(g, r, {1}, {2})
    assert h.colour(1, 4) == h.colour(2, 3) == 0
    assert crossing_edges(h, {1}, {2}) == crossing_edges(g, {1}, {2}) - 1
    # rotating back along a-w / v-b restores the graph
    back = apply_rotation(h, RotationSystem(1, 4, 3, 2), {1}, {4})
    assert back == g


def _check_counts(g, h):
    assert h.n == g.n and h.num_edges() == g.num_edges()
    assert all(len(h.colour_class(c)) == len(g.colour_class(c)) for c in g.colours)


@given(st.sampled_from([8, 10, 12]), st.integers(0, 10**6))
def test_random_spin_is_valid_and_gains_an_edge(n, seed):
    rng = random.Random(seed)
    g = restrict(random_factorization(n, seed), range(n // 2))
    vp = rng.sample(range(n), n // 2)
    s = random_spin(g, vp, rng)
    if s is None:
        return
    h = apply_spin(g, s, vp)
    _check_counts(g, h)
    assert count_edges_within(h, vp, h.colours) == count_edges_within(g, vp, g.colours) + 1


@given(st.sampled_from([8, 10, 12]), st.integers(0, 10**6))
def test_random_rotation_is_valid_and_loses_a_crossing(n, seed):
    rng = random.Random(seed)
    g = restrict(random_factorization(n, seed), range(n // 2))
    pick = rng.sample(range(n), 4)
    A, B = pick[:2], pick[2:]
    r = random_rotation(g, A, B, rng)
    if r is None:
        return
    h = apply_rotation(g, r, A, B)
    _check_counts(g, h)
    assert crossing_edges(h, A, B) == crossing_edges(g, A, B) - 1
    assert apply_rotation(h, RotationSystem(r.a, r.w, r.v, r.b), A, [r.w]) == g


def test_switch_walk_zero_steps_is_identity(rng):
    g = restrict(random_factorization(10, 1), range(5))
    res = random_switch_walk(g, 0, rng)
    assert res.graph == g and res.accepted == 0 and res.distinct_states == 1


def test_switch_walk_moves_and_counts(rng):
    g = restrict(random_factorization(12, 2), range(6))
    res = random_switch_walk(g, 200, rng)
    assert res.accepted + res.stalls == 200
    assert sum(res.moves.values()) == res.accepted > 0
    assert res.distinct_states > 1
    _check_counts(g, res.graph)
    with pytest.raises(SwitchError):
        random_switch_walk(g, 1, rng, moves=("flip",))


def test_switch_walk_stalls_on_complete_graph(rng):
    # every pair is an edge, so no required non-edge exists
    g = random_factorization(8, 3)
    res = random_switch_walk(g, 20, rng)
    assert res.accepted == 0 and res.stalls == 20


# twists

def _clean_twist(seed):
    g, x, c, part = twist_setting(seed)
    for t in twist_candidates(g, x, c, part):
        return g, t, part
    return None


@pytest.mark.parametrize("seed", range(6))
def test_twist_candidates_match_pattern_oracle(seed):
    g, x, c, part = twist_setting(seed, n=18 + 2 * (seed % 2), k=8)
    mine = {t.u[1:] for t in twist_candidates(g, x, c, part)}
    assert mine == twist_systems(g, x, c, [part[i] for i in range(1, 5)])
    cands = list(twist_candidates(g, x, c, part))
    assert len(cands) == len(set(cands))


def test_twist_applies_and_builds_its_gadget():
    found = 0
    for seed in range(20):
        got = _clean_twist(seed)
        if got is None:
            continue
        g, t, part = got
        h = apply_twist(g, t, part)
        _check_counts(g, h)
        u = t.u
        for i, j in TWIST_D3_EDGES:
            assert not h.has_edge(u[i], u[j])
        for i, j in TWIST_NEW_EDGES:
            assert h.colour(u[i], u[j]) == g.colour(u[1], u[2])
        made = set(twist_gadget_edges(t))
        assert any(j.edges == made | {tuple(sorted((t.x, j.gadget.b)))} or made <= j.edges
                   for j in enumerate_xcp(h, t.x, t.c, part))
        found += 1
        if found == 3:
            break
    assert found == 3


def test_twist_violations_name_each_condition():
    got = _clean_twist(0) or _clean_twist(1)
    assert got is not None
    g, t, part = got
    assert twist_violations(g, t, part) == []
    u = list(t.u[1:])
    u[0], u[1] = u[1], u[0]
    swapped = TwistSystem.of(t.x, u, t.c)
    assert twist_violations(g, swapped, part)
    with pytest.raises(SwitchError):
        apply_twist(g, swapped, part)
    with pytest.raises(SwitchError):
        TwistSystem.of(t.x, u[:13], t.c)
    assert twist_violations(g, TwistSystem.of(t.x, [t.x] + u[1:], t.c), part) == ["vertices are not distinct"]


# the walk on full factorizations

def test_jm_walk_rejects_partial_graphs(rng):
    with pytest.raises(Exception):
        jm_square_walk(restrict(random_factorization(6, 0), range(3)), 5, rng)


def test_jm_walk_stays_valid_over_many_steps():
    g = random_factorization(10, 4, steps=0)
    res = jm_square_walk(g, 10_000, random.Random(4))
    h = res.graph
    assert h.is_full and not h.relaxed
    assert res.accepted + res.stalls == 10_000
    assert res.moves["cycle"] > 0 and res.moves["block"] > 0


def test_jm_walk_is_close_to_uniform_at_six():
    from scipy.stats import chisquare

    total = count_one_factorizations(6)
    rng = random.Random(99)
    g = uniform_sample_small(6, rng)
    counts = Counter()
    for _ in range(3000):
        g = jm_square_walk(g, 10, rng).graph
        counts[canonical_form(g)] += 1
    assert len(counts) == total
    assert chisquare(list(counts.values())).pvalue > 1e-4
