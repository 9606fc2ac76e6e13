"""Robustly matchable bipartite templates.

A template ``H`` with sides ``A, B`` and flexible subsets ``A' <= A``,
``B' <= B`` is robustly matchable when ``H - X - Y`` has a perfect matching
for all ``X <= A'``, ``Y <= B'`` with ``|X| = |Y| <= |A'| / 2``.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteTemplate:
    left: tuple[int, ...]
    right: tuple[int, ...]
    edges: frozenset
    flex_left: frozenset
    flex_right: frozenset

    def __post_init__(self):
        ls, rs = set(self.left), set(self.right)
        for a, b in self.edges:
            if a not in ls or b not in rs:
                raise TemplateError(f"edge ({a}, {b}) leaves the template sides")
        if not self.flex_left <= ls or not self.flex_right <= rs:
            raise TemplateError("flexible sets must lie inside their sides")

    @classmethod
    def build(cls, left: Iterable[int], right: Iterable[int], edges: Iterable[tuple[int, int]],
              flex_left: Iterable[int] = (), flex_right: Iterable[int] = ()) -> "BipartiteTemplate":
        return cls(tuple(sorted(set(left))), tuple(sorted(set(right))), frozenset(edges),
                   frozenset(flex_left), frozenset(flex_right))

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {a: [] for a in self.left}
        for a, b in sorted(self.edges):
            adj[a].append(b)
        return adj

    def degrees(self) -> tuple[set[int], set[int]]:
        dl = {a: 0 for a in self.left}
        dr = {b: 0 for b in self.right}
        for a, b in self.edges:
            dl[a] += 1
            dr[b] += 1
        return set(dl.values()), set(dr.values())

    def is_regular(self, d: int | None = None) -> bool:
        dl, dr = self.degrees()
        vals = dl | dr
        return len(vals) == 1 and (d is None or vals == {d})

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dict(self) -> dict:
        return {"left": list(self.left), "right": list(self.right),
                "edges": [list(e) for e in self.sorted_edges()],
                "flex_left": sorted(self.flex_left), "flex_right": sorted(self.flex_right)}

    @classmethod
    def from_dict(cls, d: dict) -> "BipartiteTemplate":
        try:
            return cls.build(d["left"], d["right"], [tuple(e) for e in d["edges"]],
                             d.get("flex_left", ()), d.get("flex_right", ()))
        except (KeyError, TypeError) as exc:
            raise TemplateError(f"malformed template: {exc}") from None


# matching

def max_matching(adj: dict[int, list[int]], left: Iterable[int], right: set) -> dict[int, int]:
    """Maximum matching by augmenting paths; returns left -> right."""
    match_r: dict[int, int] = {}
    match_l: dict[int, int] = {}
    lefts = list(left)
    for a in lefts:
        for b in adj.get(a, ()):
            if b in right and b not in match_r:
                match_r[b] = a
                match_l[a] = b
                break
    for a in lefts:
        if a in match_l:
            continue
        # iterative DFS for an augmenting path from a
        seen: set = set()
        stack = [(a, iter(adj.get(a, ())))]
        parent: dict[int, tuple[int, int]] = {}
        found = None
        while stack:
            u, it = stack[-1]
            advanced = False
            for b in it:
                if b not in right or b in seen:
                    continue
                seen.add(b)
                parent[b] = u
                if b not in match_r:
                    found = b
                    break
                stack.append((match_r[b], iter(adj.get(match_r[b], ()))))
                advanced = True
                break
            if found is not None:
                break
            if not advanced:
                stack.pop()
        if found is None:
            continue
        b = found
        while True:
            u = parent[b]
            prev = match_l.get(u)
            match_l[u] = b
            match_r[b] = u
            if u == a:
                break
            b = prev
    return match_l


def perfect_matching(t: BipartiteTemplate, X: Iterable[int] = (), Y: Iterable[int] = ()) -> dict[int, int] | None:
    """Perfect matching of ``t - X - Y`` or ``None``."""
    sx, sy = set(X), set(Y)
    lefts = [a for a in t.left if a not in sx]
    rights = {b for b in t.right if b not in sy}
    if len(lefts) != len(rights):
        return None
    m = max_matching(t.adjacency(), lefts, rights)
    return m if len(m) == len(lefts) else None


@dataclass
class RobustVerdict:
    passed: bool
    exhaustive: bool
    checked: int
    witness: tuple | None = None


def _pairs_count(t: BipartiteTemplate) -> int:
    fa, fb = len(t.flex_left), len(t.flex_right)
    return sum(math.comb(fa, s) * math.comb(fb, s) for s in range(min(fa // 2, fb) + 1))


def verify_robust(t: BipartiteTemplate, budget: int = 10**6, samples: int = 10**4,
                  rng: random.Random | None = None, mode: str = "auto") -> RobustVerdict:
    """Check robust matchability; exhaustive when the pair count fits ``budget``."""
    fa, fb = sorted(t.flex_left), sorted(t.flex_right)
    smax = min(len(fa) // 2, len(fb))
    total = _pairs_count(t)
    exhaustive = mode == "exhaustive" or (mode == "auto" and total <= budget)
    adj = t.adjacency()
    right_all = set(t.right)

    def ok(X, Y) -> bool:
        sx = set(X)
        lefts = [a for a in t.left if a not in sx]
        rights = right_all - set(Y)
        return len(max_matching(adj, lefts, rights)) == len(lefts)

    if exhaustive:
        checked = 0
        for s in range(smax + 1):
            for X in itertools.combinations(fa, s):
                for Y in itertools.combinations(fb, s):
                    checked += 1
                    if not ok(X, Y):
                        return RobustVerdict(False, True, checked, (X, Y))
        return RobustVerdict(True, True, checked)
    rng = rng or random.Random(0)
    for i in range(samples):
        s = rng.randint(0, smax)
        X = tuple(sorted(rng.sample(fa, s)))
        Y = tuple(sorted(rng.sample(fb, s)))
        if not ok(X, Y):
            return RobustVerdict(False, False, i + 1, (X, Y))
    return RobustVerdict(True, False, samples)


def robust_match(t: BipartiteTemplate, X: Iterable[int], Y: Iterable[int]) -> dict[int, int]:
    X, Y = tuple(sorted(X)), tuple(sorted(Y))
    if len(X) != len(Y):
        raise TemplateError(f"|X| = {len(X)} differs from |Y| = {len(Y)}")
    if not set(X) <= t.flex_left or not set(Y) <= t.flex_right:
        raise TemplateError("removed sets must be flexible")
    if len(X) > len(t.flex_left) / 2:
        raise TemplateError(f"|X| = {len(X)} exceeds half the flexible side ({len(t.flex_left)})")
    m = perfect_matching(t, X, Y)
    if m is None:
        raise TemplateError(f"no perfect matching after removing X={X}, Y={Y}")
    return m


# constructions

def complete_template(size_left: int, size_right: int, flex_left: int, flex_right: int) -> BipartiteTemplate:
    left, right = range(size_left), range(size_right)
    return BipartiteTemplate.build(left, right, itertools.product(left, right),
                                   range(flex_left), range(flex_right))


def circulant_template(size: int, degree: int) -> BipartiteTemplate:
    """``a_i ~ b_{i+j}`` for ``0 <= j < degree``, everything flexible.

    Neighbourhoods of ``S`` have at least ``min(size, |S| + degree - 1)``
    vertices, so the template is robust once ``degree > size / 2``.
    """
    if not 1 <= degree <= size:
        raise TemplateError("degree must lie in 1..size")
    edges = {(i, (i + j) % size) for i in range(size) for j in range(degree)}
    return BipartiteTemplate.build(range(size), range(size), edges, range(size), range(size))


def rmbg_complete(m: int) -> BipartiteTemplate:
    """Complete bipartite graph on ``3m`` and ``4m`` vertices, the first ``2m`` right vertices flexible."""
    return complete_template(3 * m, 4 * m, 0, 2 * m)


def verify_one_sided(h: BipartiteTemplate, m: int) -> RobustVerdict:
    """``H - B'`` has a perfect matching for every ``m``-subset ``B'`` of the flexible right side."""
    checked = 0
    for Y in itertools.combinations(sorted(h.flex_right), m):
        checked += 1
        if perfect_matching(h, (), Y) is None:
            return RobustVerdict(False, True, checked, ((), Y))
    return RobustVerdict(True, True, checked)


def compose_2rmbg(h: BipartiteTemplate, h2: BipartiteTemplate,
                  link: BipartiteTemplate) -> BipartiteTemplate:
    """Glue two one-sided templates through a bipartite graph on their right sides.

    ``h`` and ``h2`` have left sides of size ``3m`` and right sides
    ``B1 + B2`` of size ``4m`` with ``B1`` (flexible, ``2m``) listed first.
    ``link`` joins ``h``'s right side (its left) to ``h2``'s right side (its
    right) and must contain a perfect matching between the two ``B1`` parts.
    The result has sides of size ``7m`` with the two ``B1`` parts flexible.
    Left side: ``B1, B2`` of ``h`` then ``A`` of ``h2``; right side: ``B1, B2``
    of ``h2`` then ``A`` of ``h``.
    """
    m, r = divmod(len(h.left), 3)
    if r or len(h.right) != 4 * m or len(h.flex_right) != 2 * m:
        raise TemplateError("first template does not have the (3m, 2m, 2m) shape")
    if len(h2.left) != 3 * m or len(h2.right) != 4 * m or len(h2.flex_right) != 2 * m:
        raise TemplateError("second template does not have the (3m, 2m, 2m) shape")
    if set(link.left) != set(h.right) or set(link.right) != set(h2.right):
        raise TemplateError("link graph must span the two right sides")

    def order(t):
        flex = sorted(t.flex_right)
        rest = sorted(set(t.right) - t.flex_right)
        return flex + rest

    hb, h2b = order(h), order(h2)
    lmap = {b: i for i, b in enumerate(hb)}
    lmap_a2 = {a: 4 * m + i for i, a in enumerate(sorted(h2.left))}
    rmap = {b: i for i, b in enumerate(h2b)}
    rmap_a = {a: 4 * m + i for i, a in enumerate(sorted(h.left))}

    inner = BipartiteTemplate.build(
        sorted(h.flex_right), sorted(h2.flex_right),
        [(a, b) for a, b in link.edges if a in h.flex_right and b in h2.flex_right])
    if perfect_matching(inner) is None:
        raise TemplateError("link graph has no perfect matching between the flexible parts")

    edges = set()
    for a, b in h.edges:
        edges.add((lmap[b], rmap_a[a]))
    for a, b in h2.edges:
        edges.add((lmap_a2[a], rmap[b]))
    for a, b in link.edges:
        edges.add((lmap[a], rmap[b]))
    return BipartiteTemplate.build(range(7 * m), range(7 * m), edges, range(2 * m), range(2 * m))


def circulant_link(m: int, degree: int) -> BipartiteTemplate:
    """``degree``-regular bipartite graph on ``4m + 4m`` vertices containing the matching ``i -> i``."""
    size = 4 * m
    if not 1 <= degree <= size:
        raise TemplateError("degree must lie in 1..4m")
    edges = {(i, (i + j) % size) for i in range(size) for j in range(degree)}
    return BipartiteTemplate.build(range(size), range(size), edges)


def random_regular_bipartite(size: int, d: int, rng: random.Random) -> set | None:
    """Union of ``d`` random perfect matchings with no repeated edge.

    Each matching is taken from the complement of the edges so far, which
    stays regular and so always has one; shuffled adjacency lists make the
    choice random.
    """
    if not 0 <= d <= size:
        return None
    edges: set = set()
    for _ in range(d):
        adj = {}
        for a in range(size):
            nb = [b for b in range(size) if (a, b) not in edges]
            rng.shuffle(nb)
            adj[a] = nb
        lefts = list(range(size))
        rng.shuffle(lefts)
        m = max_matching(adj, lefts, set(range(size)))
        if len(m) != size:
            return None
        edges |= set(m.items())
    return edges


def build_template(m: int, strategy: str = "complete", d: int | None = None,
                   rng: random.Random | None = None, attempts: int = 20,
                   samples: int = 2000) -> BipartiteTemplate:
    """Template with sides of size ``7m`` and flexible parts of size ``2m``."""
    if m < 1:
        raise TemplateError("m must be positive")
    size = 7 * m
    if strategy == "complete":
        return complete_template(size, size, 2 * m, 2 * m)
    if strategy == "random-regular":
        if d is None or not 1 <= d <= size:
            raise TemplateError(f"degree {d} is impossible on sides of size {size}")
        rng = rng or random.Random(0)
        for _ in range(attempts):
            edges = random_regular_bipartite(size, d, rng)
            if edges is None:
                continue
            t = BipartiteTemplate.build(range(size), range(size), edges, range(2 * m), range(2 * m))
            if verify_robust(t, samples=samples, rng=rng).passed:
                return t
        raise TemplateError(f"no robust {d}-regular template found in {attempts} attempts")
    raise TemplateError(f"unknown strategy {strategy!r}")
