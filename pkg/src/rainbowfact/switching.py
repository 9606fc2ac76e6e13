"""Local edge switchings on coloured graphs and the Markov chains built from them.

* A *spin* on ``(u, v, w, x, y, z)`` deletes ``vw, xy, zu`` and adds
  ``uv, wx, yz`` in the same colour; it raises the number of edges inside a
  vertex set ``V'`` by one.
* A *rotation* on ``(a, b, v, w)`` deletes ``ab, vw`` and adds ``aw, bv``;
  it lowers the number of edges between ``A`` and ``B`` by one.
* A *twist* on ``(x, u1..u14)`` re-pairs six edges of one colour so that a
  fresh gadget appears around ``x``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Collection, Iterator, Sequence

from .graph import ColouredGraph, ColourPartition, GraphError, _key
from .factorgen import factorizations_by_matchings


class SwitchError(ValueError):
    pass


# spins

@dataclass(frozen=True)
class SpinSystem:
    u: int
    v: int
    w: int
    x: int
    y: int
    z: int


def spin_violations(g: ColouredGraph, s: SpinSystem, vprime: Collection[int]) -> list[str]:
    vp = set(vprime)
    out = []
    vs = (s.u, s.v, s.w, s.x, s.y, s.z)
    if len(set(vs)) != 6:
        out.append("vertices are not distinct")
        return out
    if s.u not in vp or s.v not in vp:
        out.append("u and v must lie in V'")
    if any(t in vp for t in (s.w, s.x, s.y, s.z)):
        out.append("w, x, y, z must lie outside V'")
    cols = {g.colour(s.v, s.w), g.colour(s.x, s.y), g.colour(s.z, s.u)}
    if None in cols or len(cols) != 1:
        out.append("vw, xy, zu must be edges of one colour")
    for p, q in ((s.u, s.v), (s.w, s.x), (s.y, s.z)):
        if g.has_edge(p, q):
            out.append(f"({p}, {q}) must be a non-edge")
    return out


def apply_spin(g: ColouredGraph, s: SpinSystem, vprime: Collection[int]) -> ColouredGraph:
    bad = spin_violations(g, s, vprime)
    if bad:
        raise SwitchError("invalid spin system: " + "; ".join(bad))
    d = g.colour(s.v, s.w)
    return g.replace_edges([(s.v, s.w), (s.x, s.y), (s.z, s.u)],
                           [(s.u, s.v, d), (s.w, s.x, d), (s.y, s.z, d)])


def random_spin(g: ColouredGraph, vprime: Collection[int], rng: random.Random,
                tries: int = 200) -> SpinSystem | None:
    vp = sorted(set(vprime))
    outside = [t for t in range(g.n) if t not in set(vp)]
    if len(vp) < 2 or len(outside) < 4 or not g.colours:
        return None
    for _ in range(tries):
        u, v = rng.sample(vp, 2)
        d = rng.choice(g.colours)
        w, z = g.nbr(v, d), g.nbr(u, d)
        x = rng.choice(outside)
        y = g.nbr(x, d)
        if None in (w, z, y):
            continue
        s = SpinSystem(u, v, w, x, y, z)
        if not spin_violations(g, s, vp):
            return s
    return None


# rotations

@dataclass(frozen=True)
class RotationSystem:
    a: int
    b: int
    v: int
    w: int


def rotation_violations(g: ColouredGraph, r: RotationSystem, A: Collection[int],
                        B: Collection[int]) -> list[str]:
    sa, sb = set(A), set(B)
    out = []
    if len({r.a, r.b, r.v, r.w}) != 4:
        return ["vertices are not distinct"]
    if r.a not in sa or r.b not in sb:
        out.append("a must lie in A and b in B")
    if r.v in sa | sb or r.w in sa | sb:
        out.append("v and w must lie outside A and B")
    c1, c2 = g.colour(r.a, r.b), g.colour(r.v, r.w)
    if c1 is None or c1 != c2:
        out.append("ab and vw must be edges of one colour")
    for p, q in ((r.a, r.w), (r.b, r.v)):
        if g.has_edge(p, q):
            out.append(f"({p}, {q}) must be a non-edge")
    return out


def apply_rotation(g: ColouredGraph, r: RotationSystem, A: Collection[int],
                   B: Collection[int]) -> ColouredGraph:
    bad = rotation_violations(g, r, A, B)
    if bad:
        raise SwitchError("invalid rotation system: " + "; ".join(bad))
    d = g.colour(r.a, r.b)
    return g.replace_edges([(r.a, r.b), (r.v, r.w)], [(r.a, r.w, d), (r.b, r.v, d)])


def random_rotation(g: ColouredGraph, A: Collection[int], B: Collection[int],
                    rng: random.Random, tries: int = 200) -> RotationSystem | None:
    sa, sb = sorted(set(A)), set(B)
    outside = [t for t in range(g.n) if t not in set(sa) and t not in sb]
    if not sa or len(outside) < 2 or not g.colours:
        return None
    for _ in range(tries):
        a = rng.choice(sa)
        d = rng.choice(g.colours)
        b = g.nbr(a, d)
        v = rng.choice(outside)
        w = g.nbr(v, d)
        if b is None or w is None:
            continue
        r = RotationSystem(a, b, v, w)
        if not rotation_violations(g, r, sa, sb):
            return r
    return None


# twists

TWIST_D3_EDGES = ((1, 2), (3, 5), (4, 6), (9, 11), (10, 12), (13, 14))
TWIST_NEW_EDGES = ((1, 3), (2, 4), (5, 6), (9, 10), (11, 13), (12, 14))


@dataclass(frozen=True)
class TwistSystem:
    """Vertices ``x`` and ``u[1..14]`` (``u[0]`` is unused) around the colour ``c``."""

    x: int
    u: tuple[int, ...]
    c: int

    @classmethod
    def of(cls, x: int, us: Sequence[int], c: int) -> "TwistSystem":
        if len(us) != 14:
            raise SwitchError("a twist system needs fourteen u-vertices")
        return cls(x, (-1,) + tuple(us), c)


def twist_violations(g: ColouredGraph, t: TwistSystem, part: ColourPartition) -> list[str]:
    u, x, c = t.u, t.x, t.c
    out = []
    if len(set(u[1:]) | {x}) != 15:
        return ["vertices are not distinct"]
    if c in part.colours:
        out.append("c must lie outside D")
    col = g.colour

    def same(p, q, r, s, k):
        a, b = col(p, q), col(r, s)
        return a is not None and a == b and a in part[k]

    if not same(u[5], u[7], x, u[9], 1):
        out.append("u5u7 and xu9 must share a colour in D1")
    if not same(u[6], u[8], x, u[10], 2):
        out.append("u6u8 and xu10 must share a colour in D2")
    d3 = [col(u[i], u[j]) for i, j in TWIST_D3_EDGES]
    if None in d3 or len(set(d3)) != 1 or d3[0] not in part[3]:
        out.append("the six re-paired edges must share a colour in D3")
    f = col(u[7], x)
    if f is None or f not in part[4]:
        out.append("u7x must have a colour in D4")
    if col(u[7], u[8]) != c:
        out.append("u7u8 must have colour c")
    for i, j in TWIST_NEW_EDGES:
        if g.has_edge(u[i], u[j]):
            out.append(f"u{i}u{j} must be a non-edge")
    return out


def apply_twist(g: ColouredGraph, t: TwistSystem, part: ColourPartition) -> ColouredGraph:
    bad = twist_violations(g, t, part)
    if bad:
        raise SwitchError("invalid twist system: " + "; ".join(bad))
    u = t.u
    d3 = g.colour(u[1], u[2])
    return g.replace_edges([(u[i], u[j]) for i, j in TWIST_D3_EDGES],
                           [(u[i], u[j], d3) for i, j in TWIST_NEW_EDGES])


def twist_gadget_edges(t: TwistSystem) -> list[tuple[int, int]]:
    """Edges of the gadget a twist creates: u5u6 u5u7 u6u8 u7u8 u7x xu9 xu10 u9u10."""
    u, x = t.u, t.x
    return [_key(*p) for p in ((u[5], u[6]), (u[5], u[7]), (u[6], u[8]), (u[7], u[8]),
                               (u[7], x), (x, u[9]), (x, u[10]), (u[9], u[10]))]


def twist_candidates(g: ColouredGraph, x: int, c: int, part: ColourPartition) -> Iterator[TwistSystem]:
    """Valid twist systems at ``(x, c)`` built colour by colour.

    Colours are chosen in the order d4, d1, d2, d3 and then two oriented
    d3-edges ``u1u2`` and ``u13u14``; each choice skips colours that would
    force two labels onto one vertex.  Only fully valid systems are yielded.
    """
    col, nb = g.colour, g.nbr
    for d4 in sorted(part[4]):
        u7 = nb(x, d4)
        u8 = nb(u7, c) if u7 is not None else None
        if u8 is None:
            continue
        for d1 in sorted(part[1]):
            if d1 == col(x, u8):
                continue
            u5, u9 = nb(u7, d1), nb(x, d1)
            if u5 is None or u9 is None:
                continue
            for d2 in sorted(part[2]):
                if d2 in (col(u5, u8), col(u5, x), col(u8, x), col(u8, u9)):
                    continue
                u6, u10 = nb(u8, d2), nb(x, d2)
                if u6 is None or u10 is None:
                    continue
                inner = [x, u5, u6, u7, u8, u9, u10]
                if len(set(inner)) != 7:
                    continue
                for d3 in sorted(part[3]):
                    u3, u4, u11, u12 = nb(u5, d3), nb(u6, d3), nb(u9, d3), nb(u10, d3)
                    if None in (u3, u4, u11, u12):
                        continue
                    blocked = set(inner) | {u3, u4, u11, u12}
                    if len(blocked) != 11:
                        continue
                    free = [(p, q) for p, q in g.colour_class(d3)
                            if p not in blocked and q not in blocked]
                    oriented = [e for p, q in free for e in ((p, q), (q, p))]
                    for u1, u2 in oriented:
                        if g.has_edge(u1, u3) or g.has_edge(u2, u4):
                            continue
                        for u13, u14 in oriented:
                            if u13 in (u1, u2) or u14 in (u1, u2):
                                continue
                            t = TwistSystem.of(x, (u1, u2, u3, u4, u5, u6, u7, u8, u9, u10,
                                                   u11, u12, u13, u14), c)
                            if not twist_violations(g, t, part):
                                yield t


# walks

@dataclass
class WalkResult:
    graph: ColouredGraph
    accepted: int = 0
    stalls: int = 0
    moves: dict = field(default_factory=dict)
    distinct_states: int = 0


def random_switch_walk(g: ColouredGraph, steps: int, rng: random.Random,
                       moves: Sequence[str] = ("spin", "rotation"),
                       vprime: Collection[int] | None = None,
                       A: Collection[int] | None = None, B: Collection[int] | None = None,
                       tries: int = 100) -> WalkResult:
    """Random walk by spins and rotations; a step with no valid system is a stall.

    Without fixed ``vprime`` / ``A`` / ``B`` each step draws fresh random sets
    (``V'`` of size ``n/2``, disjoint ``A`` and ``B`` of size ``|D|``).
    """
    for m in moves:
        if m not in ("spin", "rotation"):
            raise SwitchError(f"unknown move {m!r}")
    n, k = g.n, len(g.colours)
    res = WalkResult(g, moves={m: 0 for m in moves})
    seen = {g}
    for _ in range(steps):
        m = rng.choice(list(moves))
        if m == "spin":
            vp = vprime if vprime is not None else rng.sample(range(n), n // 2)
            s = random_spin(res.graph, vp, rng, tries)
            new = apply_spin(res.graph, s, vp) if s else None
        else:
            if A is not None and B is not None:
                a, b = A, B
            else:
                size = max(1, min(k, n // 3))
                pick = rng.sample(range(n), 2 * size)
                a, b = pick[:size], pick[size:]
            r = random_rotation(res.graph, a, b, rng, tries)
            new = apply_rotation(res.graph, r, a, b) if r else None
        if new is None:
            res.stalls += 1
            continue
        res.graph = new
        res.accepted += 1
        res.moves[m] += 1
        seen.add(new)
    res.distinct_states = len(seen)
    return res


@lru_cache(maxsize=4096)
def _block_factorizations(n: int, edges: frozenset, cap: int) -> tuple | None:
    out = []
    for classes in factorizations_by_matchings(n, sorted(edges)):
        out.append(classes)
        if len(out) > cap:
            return None
    return tuple(out)


def jm_square_walk(g: ColouredGraph, steps: int, rng: random.Random,
                   block: int | None = None, cap: int = 5000) -> WalkResult:
    """Symmetric random walk on 1-factorizations of ``K_n``.

    Each step is, with equal probability, (i) a two-colour cycle switch:
    pick colours ``a, b`` and a vertex and swap ``a`` and ``b`` along the
    alternating cycle through it; or (ii) a heat-bath block move: pick
    ``block`` colours and replace their classes by a uniformly random
    factorization of their union.  Both moves are symmetric, so the uniform
    distribution is stationary.  In square form (via the odd/even
    correspondence) the moves act on the symmetric Latin square of order
    ``n - 1``; block moves with four colours are what connect ``n = 6``.
    """
    if not g.is_full:
        raise GraphError("expected a 1-factorization of K_n")
    n = g.n
    cols = list(g.colours)
    s = block if block is not None else (4 if n <= 8 else 3)
    s = min(s, len(cols))
    mate = {c: [g.nbr(v, c) for v in range(n)] for c in cols}
    res = WalkResult(g, moves={"cycle": 0, "block": 0})
    for _ in range(steps):
        if len(cols) < 2:
            break
        if rng.random() < 0.5:
            a, b = rng.sample(cols, 2)
            v = rng.randrange(n)
            cyc = [v]
            cur, use_a = v, True
            while True:
                cur = mate[a][cur] if use_a else mate[b][cur]
                use_a = not use_a
                if cur == v:
                    break
                cyc.append(cur)
            for i in range(0, len(cyc), 2):
                p, q = cyc[i], cyc[i + 1]
                r = cyc[(i + 2) % len(cyc)]
                mate[b][p], mate[b][q] = q, p
                mate[a][q], mate[a][r] = r, q
            res.moves["cycle"] += 1
            res.accepted += 1
        else:
            chosen = rng.sample(cols, s)
            edges = frozenset(_key(v, mate[c][v]) for c in chosen for v in range(n))
            facts = _block_factorizations(n, edges, cap)
            if facts is None:
                res.stalls += 1
                continue
            classes = facts[rng.randrange(len(facts))]
            order = chosen[:]
            rng.shuffle(order)
            for c, cls in zip(order, classes):
                for p, q in cls:
                    mate[c][p], mate[c][q] = q, p
            res.moves["block"] += 1
            res.accepted += 1
    edges = [(v, mate[c][v], c) for c in cols for v in range(n) if v < mate[c][v]]
    res.graph = ColouredGraph(n, cols, edges)
    return res
