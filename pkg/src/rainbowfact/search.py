"""Exact and heuristic searches for rainbow paths and cycles."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Collection, Sequence

from .graph import ColouredGraph, verify_rainbow_cycle, verify_rainbow_path

FOUND, NONE, EXHAUSTED = "found", "none", "budget_exhausted"


@dataclass
class SearchResult:
    status: str
    vertices: list[int] | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


class _Budget(Exception):
    pass


class _Searcher:
    """Depth-first rainbow path search over bitmask states.

    A state is (tail, visited vertices, used colours); states proven dead are
    remembered, since whether a state can be completed does not depend on
    how it was reached.
    """

    def __init__(self, g: ColouredGraph, budget: int | None):
        self.g = g
        self.budget = budget
        self.nodes = 0
        self.cbit = {c: 1 << i for i, c in enumerate(g.colours)}
        self.adj = [sorted((v, self.cbit[c]) for v, c in g.neighbours(u).items()) for u in range(g.n)]
        self.dead: set = set()

    def _tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget

    def _options(self, tail: int, vmask: int, cmask: int, floor: int = -1) -> list[tuple[int, int]]:
        return [(v, cb) for v, cb in self.adj[tail]
                if v > floor and not (vmask >> v) & 1 and not cmask & cb]

    def _ordered(self, tail, vmask, cmask, floor=-1):
        # fail-first: try the continuation with fewest onward moves first
        opts = self._options(tail, vmask, cmask, floor)
        scored = []
        for v, cb in opts:
            nv, nc = vmask | (1 << v), cmask | cb
            scored.append((len(self._options(v, nv, nc, floor)), v, cb))
        scored.sort()
        return [(v, cb) for _, v, cb in scored]

    def path(self, length: int, starts: Sequence[int]) -> list[int] | None:
        stack: list[int] = []

        def rec(tail, vmask, cmask, left):
            if left == 0:
                return True
            key = (tail, vmask, cmask)
            if key in self.dead:
                return False
            self._tick()
            for v, cb in self._ordered(tail, vmask, cmask):
                stack.append(v)
                if rec(v, vmask | (1 << v), cmask | cb, left - 1):
                    return True
                stack.pop()
            self.dead.add(key)
            return False

        for s in starts:
            stack[:] = [s]
            if rec(s, 1 << s, 0, length):
                return list(stack)
        return None

    def cycle(self, length: int) -> list[int] | None:
        # the smallest vertex of the cycle is its start, the rest exceed it
        g = self.g
        stack: list[int] = []

        def rec(s, tail, vmask, cmask, left):
            if left == 1:
                c = g.colour(tail, s)
                return c is not None and not cmask & self.cbit[c] and len(stack) > 2
            key = (s, tail, vmask, cmask)
            if key in self.dead:
                return False
            self._tick()
            for v, cb in self._ordered(tail, vmask, cmask, floor=s):
                stack.append(v)
                if rec(s, v, vmask | (1 << v), cmask | cb, left - 1):
                    return True
                stack.pop()
            self.dead.add(key)
            return False

        for s in range(g.n):
            stack[:] = [s]
            if rec(s, s, 1 << s, 0, length):
                return list(stack)
        return None


def exact_rainbow_path(g: ColouredGraph, length: int, budget: int | None = None) -> SearchResult:
    """Search for a rainbow path with ``length`` edges."""
    if length < 0 or length > g.n - 1 or length > len(g.colours):
        return SearchResult(NONE)
    s = _Searcher(g, budget)
    try:
        p = s.path(length, range(g.n))
    except _Budget:
        return SearchResult(EXHAUSTED, nodes=s.nodes)
    if p is None:
        return SearchResult(NONE, nodes=s.nodes)
    return SearchResult(FOUND, p, s.nodes)


def exact_rainbow_hamilton_path(g: ColouredGraph, budget: int | None = None) -> SearchResult:
    return exact_rainbow_path(g, g.n - 1, budget)


def exact_andersen_path(g: ColouredGraph, budget: int | None = None) -> SearchResult:
    """Rainbow path of length ``n - 2``."""
    return exact_rainbow_path(g, g.n - 2, budget)


def exact_rainbow_cycle(g: ColouredGraph, length: int, budget: int | None = None) -> SearchResult:
    """Search for a rainbow cycle with ``length`` edges (closing edge implicit in the output)."""
    if length < 3 or length > g.n or length > len(g.colours):
        return SearchResult(NONE)
    s = _Searcher(g, budget)
    try:
        c = s.cycle(length)
    except _Budget:
        return SearchResult(EXHAUSTED, nodes=s.nodes)
    if c is None:
        return SearchResult(NONE, nodes=s.nodes)
    return SearchResult(FOUND, c, s.nodes)


def exact_all_colour_cycle(g: ColouredGraph, budget: int | None = None) -> SearchResult:
    """Rainbow cycle using every colour exactly once."""
    return exact_rainbow_cycle(g, len(g.colours), budget)


def naive_rainbow_hamilton_paths(g: ColouredGraph):
    """Every rainbow Hamilton path by brute force over vertex orderings (small n only)."""
    for perm in itertools.permutations(range(g.n)):
        if perm[0] > perm[-1]:
            continue
        ok = True
        seen = set()
        for u, v in zip(perm, perm[1:]):
            c = g.colour(u, v)
            if c is None or c in seen:
                ok = False
                break
            seen.add(c)
        if ok:
            yield list(perm)


# heuristic long paths

@dataclass
class LongPathResult:
    path: list[int]
    missing_vertices: list[int] = field(default_factory=list)
    missing_colours: list[int] = field(default_factory=list)
    restarts_used: int = 0

    def within(self, bound: float) -> bool:
        return len(self.missing_vertices) <= bound and len(self.missing_colours) <= bound


class _PathState:
    def __init__(self, g, vertices, colours, allowed):
        self.g = g
        self.vertices = vertices
        self.colours = colours
        self.allowed = allowed

    def ok_edge(self, u, v):
        c = self.g.colour(u, v)
        if c is None or c not in self.colours:
            return None
        if self.allowed is not None and not self.allowed(u, v):
            return None
        return c

    def moves(self, tail, on_path, used):
        out = []
        for v, c in self.g.neighbours(tail).items():
            if v in self.vertices and v not in on_path and c in self.colours and c not in used:
                if self.allowed is None or self.allowed(tail, v):
                    out.append((v, c))
        return out


def _grow(st: _PathState, path: list[int], rng: random.Random, rotations: int) -> list[int]:
    g = st.g
    on_path = set(path)
    used = {g.colour(u, v) for u, v in zip(path, path[1:])}
    flips_left = 1
    rot_left = rotations
    while True:
        tail = path[-1]
        opts = st.moves(tail, on_path, used)
        if opts:
            # prefer the vertex with fewest onward moves, random tie-break
            scored = []
            for v, c in opts:
                used.add(c)
                on_path.add(v)
                k = len(st.moves(v, on_path, used))
                used.discard(c)
                on_path.discard(v)
                scored.append((k, rng.random(), v, c))
            scored.sort()
            _, _, v, c = scored[0]
            path.append(v)
            on_path.add(v)
            used.add(c)
            continue
        # Posa rotation: tail -- path[i] replaces path[i]path[i+1]
        rots = []
        for i in range(len(path) - 2):
            c = st.ok_edge(tail, path[i])
            if c is None:
                continue
            old = g.colour(path[i], path[i + 1])
            if c == old or c not in used:
                rots.append((i, c, old))
        if rots and rot_left > 0:
            rot_left -= 1
            i, c, old = rng.choice(rots)
            path[i + 1:] = reversed(path[i + 1:])
            used.discard(old)
            used.add(c)
            continue
        if flips_left > 0:
            flips_left -= 1
            path.reverse()
            continue
        return path


def long_rainbow_path(g: ColouredGraph, vertices: Collection[int] | None = None,
                      colours: Collection[int] | None = None, allowed=None,
                      restarts: int = 20, rotations: int = 200, seed: int = 0) -> LongPathResult:
    """Greedy rainbow path growth with rotations, keeping the best of several restarts.

    ``vertices``/``colours`` restrict the path; ``allowed(u, v)`` filters
    edges.  Restart ``i`` draws from its own seeded generator, so raising
    ``restarts`` never makes the kept path shorter.
    """
    vs = set(range(g.n)) if vertices is None else set(vertices)
    cs = set(g.colours) if colours is None else set(colours)
    st = _PathState(g, vs, cs, allowed)
    order = sorted(vs)
    best: list[int] = order[:1]
    used_restarts = 0
    target = min(len(vs), len(cs) + 1)
    for i in range(restarts):
        if len(best) >= target:
            break
        used_restarts += 1
        rng = random.Random(seed * 1_000_003 + i)
        p = _grow(st, [rng.choice(order)], rng, rotations)
        if len(p) > len(best):
            best = p
    on = set(best)
    used = {g.colour(u, v) for u, v in zip(best, best[1:])}
    assert verify_rainbow_path(g, best)
    return LongPathResult(best, sorted(vs - on), sorted(cs - used), used_restarts)


__all__ = [
    "SearchResult", "FOUND", "NONE", "EXHAUSTED", "exact_rainbow_path",
    "exact_rainbow_hamilton_path", "exact_andersen_path", "exact_rainbow_cycle",
    "exact_all_colour_cycle", "naive_rainbow_hamilton_paths", "LongPathResult",
    "long_rainbow_path", "verify_rainbow_cycle",
]
