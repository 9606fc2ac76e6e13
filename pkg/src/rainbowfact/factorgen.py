"""Generators for 1-factorizations of complete graphs.

Covers the round-robin and XOR constructions, the odd/even conversion
between optimal colourings of ``K_n`` (n odd) and 1-factorizations of
``K_{n+1}``, and exhaustive enumeration for ``n <= 8``.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator

from .graph import ColouredGraph, GraphError

MAX_ENUM_N = 8


def _require_even(n: int) -> None:
    if n < 2 or n % 2:
        raise GraphError(f"n must be even and at least 2, got {n}")


def canonical_one_factorization(n: int) -> ColouredGraph:
    """Round-robin (circle method) factorization of ``K_n``.

    Vertex ``n-1`` sits in the centre; colour ``r`` pairs it with ``r`` and
    pairs ``r+i`` with ``r-i`` (mod ``n-1``).
    """
    _require_even(n)
    m = n - 1
    edges = []
    for r in range(m):
        edges.append((r, m, r))
        for i in range(1, n // 2):
            edges.append(((r + i) % m, (r - i) % m, r))
    return ColouredGraph(n, range(m), edges)


def xor_factorization(n: int) -> ColouredGraph:
    """Factorization of ``K_{2^k}`` with ``xy`` coloured ``(x ^ y) - 1``."""
    if n < 2 or n & (n - 1):
        raise GraphError(f"n must be a power of two, got {n}")
    edges = [(x, y, (x ^ y) - 1) for x in range(n) for y in range(x + 1, n)]
    return ColouredGraph(n, range(n - 1), edges)


def canonical_odd_colouring(n: int) -> ColouredGraph:
    """Optimal ``n``-edge-colouring of ``K_n`` for odd ``n``: ``xy`` gets ``(x+y) mod n``.

    Vertex ``v`` misses colour ``2v mod n``.
    """
    if n < 1 or n % 2 == 0:
        raise GraphError(f"n must be odd, got {n}")
    edges = [(x, y, (x + y) % n) for x in range(n) for y in range(x + 1, n)]
    return ColouredGraph(n, range(n), edges, relaxed=True)


def _check_optimal_odd(g: ColouredGraph) -> None:
    n = g.n
    if n % 2 == 0:
        raise GraphError(f"expected an odd number of vertices, got {n}")
    if len(g.colours) != n:
        raise GraphError(f"expected {n} colours, got {len(g.colours)}")
    if g.num_edges() != n * (n - 1) // 2:
        raise GraphError("colouring does not cover every pair")
    for c in g.colours:
        size = len(g.colour_class(c))
        if size != (n - 1) // 2:
            raise GraphError(f"colour {c} has class size {size}, expected {(n - 1) // 2}")


def odd_to_even(g: ColouredGraph) -> ColouredGraph:
    """Add vertex ``z = n`` joined to each ``v`` in the colour missing at ``v``."""
    _check_optimal_odd(g)
    n = g.n
    edges = g.edges()
    for v in range(n):
        miss = g.missing_colours(v)
        if len(miss) != 1:
            raise GraphError(f"vertex {v} misses {len(miss)} colours, expected one")
        edges.append((v, n, miss[0]))
    return ColouredGraph(n + 1, g.colours, edges)


def even_to_odd(g: ColouredGraph) -> ColouredGraph:
    """Delete the last vertex of a 1-factorization, leaving an optimal odd colouring."""
    if not g.is_full:
        raise GraphError("expected a 1-factorization of a complete graph")
    z = g.n - 1
    return ColouredGraph(z, g.colours, [e for e in g.edges() if e[1] != z], relaxed=True)


# enumeration

def _perfect_matchings_with(adj: list[set], first: tuple[int, int], alive: set) -> Iterator[list]:
    """Perfect matchings of ``adj`` restricted to ``alive`` that contain ``first``."""
    a, b = first
    rest = alive - {a, b}

    def rec(left: set) -> Iterator[list]:
        if not left:
            yield []
            return
        u = min(left)
        for v in sorted(adj[u] & left):
            if v == u:
                continue
            for m in rec(left - {u, v}):
                yield [(u, v)] + m

    for m in rec(rest):
        yield [(a, b)] + m


def factorizations_by_matchings(n: int, edges: list[tuple[int, int]]) -> Iterator[list[list]]:
    """Unordered 1-factorizations of a regular graph, classes ordered by minimum edge.

    Each new class is forced to contain the smallest edge not yet used, so
    every factorization is produced exactly once.
    """
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    verts = set(range(n))

    def rec(adj: list[set]) -> Iterator[list[list]]:
        u = next((x for x in range(n) if adj[x]), None)
        if u is None:
            yield []
            return
        first = (u, min(adj[u]))
        for m in _perfect_matchings_with(adj, first, verts):
            sub = [set(s) for s in adj]
            for x, y in m:
                sub[x].discard(y)
                sub[y].discard(x)
            for rest in rec(sub):
                yield [m] + rest

    yield from rec(adj)


def _count_by_matchings(n: int) -> int:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return sum(1 for _ in factorizations_by_matchings(n, edges))


def _count_by_edge_colouring(n: int) -> int:
    """Count by colouring edges one at a time, with ``0j`` fixed to colour ``j-1``.

    Fixing the colours at vertex 0 picks one labelling per unordered
    factorization, so no division is needed.
    """
    k = n - 1
    pairs = [(u, v) for u in range(1, n) for v in range(u + 1, n)]
    used = [[False] * k for _ in range(n)]
    for j in range(1, n):
        used[0][j - 1] = True
        used[j][j - 1] = True

    def rec(i: int) -> int:
        if i == len(pairs):
            return 1
        u, v = pairs[i]
        total = 0
        uu, uv = used[u], used[v]
        for c in range(k):
            if not uu[c] and not uv[c]:
                uu[c] = uv[c] = True
                total += rec(i + 1)
                uu[c] = uv[c] = False
        return total

    return rec(0)


def count_one_factorizations(n: int, strategy: str = "matchings") -> int:
    """Exact number of 1-factorizations of ``K_n`` (colour classes unordered)."""
    _require_even(n)
    if n > MAX_ENUM_N:
        raise GraphError(f"enumeration is limited to n <= {MAX_ENUM_N}")
    if strategy == "matchings":
        return _count_by_matchings(n)
    if strategy == "edges":
        return _count_by_edge_colouring(n)
    raise ValueError(f"unknown strategy {strategy!r}")


def _classes_to_graph(n: int, classes: list[list]) -> ColouredGraph:
    edges = [(u, v, i) for i, cls in enumerate(classes) for u, v in cls]
    return ColouredGraph(n, range(len(classes)), edges)


def enumerate_one_factorizations(n: int) -> Iterator[ColouredGraph]:
    """Every 1-factorization of ``K_n`` once, colour ``i`` being the class with the i-th smallest edge."""
    _require_even(n)
    if n > MAX_ENUM_N:
        raise GraphError(f"enumeration is limited to n <= {MAX_ENUM_N}")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for classes in factorizations_by_matchings(n, edges):
        yield _classes_to_graph(n, classes)


def canonical_form(g: ColouredGraph) -> tuple:
    """Colour-label-free key: the sorted tuple of sorted colour classes."""
    return tuple(sorted(tuple(g.colour_class(c)) for c in g.colours))


@lru_cache(maxsize=None)
def _all_factorizations(n: int) -> tuple:
    return tuple(enumerate_one_factorizations(n))


def uniform_sample_small(n: int, rng: random.Random) -> ColouredGraph:
    """Exactly uniform 1-factorization of ``K_n`` for ``n <= 8`` by index sampling."""
    pool = _all_factorizations(n)
    return pool[rng.randrange(len(pool))]


def random_relabelled(g: ColouredGraph, rng: random.Random) -> ColouredGraph:
    """Apply a uniformly random vertex permutation."""
    perm = list(range(g.n))
    rng.shuffle(perm)
    return g.relabel_vertices(perm)
