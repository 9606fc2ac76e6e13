"""Symmetric Latin squares of odd order and their transversals.

An optimal colouring of ``K_n`` (n odd, colours ``c_0 < ... < c_{n-1}``)
corresponds to a symmetric Latin square: cell ``(i, j)`` holds the index of
``colour(i, j)`` and the diagonal cell ``(i, i)`` holds the colour missing at
``i``.  Symbols are ``0..n-1`` internally and ``1..n`` in the text format.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .graph import ColouredGraph, GraphError
from .factorgen import canonical_odd_colouring, even_to_odd, odd_to_even


class SquareError(ValueError):
    pass


@dataclass(frozen=True)
class LatinSquare:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        full = set(range(n))
        for i, row in enumerate(self.rows):
            if len(row) != n or set(row) != full:
                raise SquareError(f"row {i} is not a permutation of the {n} symbols")
        for j in range(n):
            if {row[j] for row in self.rows} != full:
                raise SquareError(f"column {j} repeats a symbol")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]

    @property
    def is_symmetric(self) -> bool:
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.n) for j in range(i))

    def to_text(self) -> str:
        return "\n".join(" ".join(str(s + 1) for s in row) for row in self.rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        try:
            rows = tuple(tuple(int(t) - 1 for t in ln) for ln in lines)
        except ValueError as exc:
            raise SquareError(f"non-integer entry: {exc}") from exc
        return cls(rows)


def square_from_colouring(g: ColouredGraph) -> LatinSquare:
    """Symmetric Latin square of an optimal colouring of ``K_n``, n odd."""
    n = g.n
    if n % 2 == 0 or len(g.colours) != n or g.num_edges() != n * (n - 1) // 2:
        raise SquareError("expected an optimal colouring of K_n with n odd")
    idx = {c: i for i, c in enumerate(g.colours)}
    rows = []
    for i in range(n):
        miss = g.missing_colours(i)
        row = []
        for j in range(n):
            row.append(idx[miss[0]] if i == j else idx[g.colour(i, j)])
        rows.append(tuple(row))
    return LatinSquare(tuple(rows))


def colouring_from_square(sq: LatinSquare) -> ColouredGraph:
    """Inverse of :func:`square_from_colouring` (colour ids equal symbols)."""
    n = sq.n
    if n % 2 == 0:
        raise SquareError("square order must be odd")
    if not sq.is_symmetric:
        raise SquareError("square is not symmetric")
    diag = [sq[i, i] for i in range(n)]
    if sorted(diag) != list(range(n)):
        raise SquareError("diagonal is not a transversal")
    edges = [(i, j, sq[i, j]) for i in range(n) for j in range(i + 1, n)]
    try:
        return ColouredGraph(n, range(n), edges, relaxed=True)
    except GraphError as exc:
        raise SquareError(str(exc)) from exc


def is_transversal(sq: LatinSquare, cells: Sequence[tuple[int, int]]) -> bool:
    """One cell per row and column, all symbols distinct."""
    n = sq.n
    if len(cells) != n:
        return False
    rows = {i for i, _ in cells}
    cols = {j for _, j in cells}
    syms = {sq[c] for c in cells}
    return len(rows) == len(cols) == len(syms) == n


def is_hamilton_transversal(sq: LatinSquare, cells: Sequence[tuple[int, int]]) -> bool:
    """A transversal whose row-to-column permutation is a single ``n``-cycle."""
    if not is_transversal(sq, cells):
        return False
    sigma = dict(cells)
    v, steps = 0, 0
    while True:
        v = sigma[v]
        steps += 1
        if v == 0:
            break
    return steps == sq.n


def transversals_from_cycle(sq: LatinSquare, cycle: Sequence[int]) -> tuple[list, list]:
    """Cells ``(v_i, v_{i+1})`` of a rainbow Hamilton cycle, and the reversed orientation."""
    n = len(cycle)
    fwd = [(cycle[i], cycle[(i + 1) % n]) for i in range(n)]
    back = [(b, a) for a, b in fwd]
    return fwd, back


def diagonal(sq: LatinSquare) -> list[tuple[int, int]]:
    return [(i, i) for i in range(sq.n)]


def random_symmetric_square(n: int, rng: random.Random, steps: int = 200) -> LatinSquare:
    """Symmetric Latin square of odd order ``n`` from a randomised factorization of ``K_{n+1}``."""
    from .switching import jm_square_walk

    if n % 2 == 0:
        raise SquareError("order must be odd")
    g = odd_to_even(canonical_odd_colouring(n))
    perm = list(range(n + 1))
    rng.shuffle(perm)
    g = g.relabel_vertices(perm)
    if n + 1 >= 4:
        g = jm_square_walk(g, steps, rng).graph
    return square_from_colouring(even_to_odd(g))
