"""Properly edge-coloured graphs stored as a vertex x colour neighbour table.

Vertices are ``0..n-1`` and colours are non-negative integer ids.  A graph is
*strict* when every colour class is a perfect matching (so the graph is
``|D|``-regular) and *relaxed* when colour classes are only required to be
matchings.  A strict graph with ``n - 1`` colours is a 1-factorization of
``K_n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

Edge = tuple[int, int, int]


class GraphError(ValueError):
    """Raised when a coloured graph violates one of its invariants."""


class NonEdgeError(GraphError):
    """A vertex sequence steps across a pair that is not an edge."""

    def __init__(self, u: int, v: int):
        super().__init__(f"({u}, {v}) is not an edge")
        self.pair = (u, v)


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class ColouredGraph:
    """Immutable properly edge-coloured simple graph.

    ``nbr(v, c)`` is the ``c``-neighbour of ``v`` (or ``None``), ``colour(u, v)``
    the colour of ``uv`` (or ``None``).  Construction validates properness,
    simplicity and, unless ``relaxed``, that each colour class is perfect.
    """

    __slots__ = ("n", "colours", "relaxed", "_nbr", "_col", "_hash")

    def __init__(self, n: int, colours: Iterable[int], edges: Iterable[Sequence[int]],
                 relaxed: bool = False):
        if n < 1:
            raise GraphError("n must be positive")
        cols = tuple(sorted(set(colours)))
        if any(c < 0 for c in cols):
            raise GraphError("colour ids must be non-negative")
        colset = set(cols)
        nbr: list[dict[int, int]] = [dict() for _ in range(n)]
        col: list[dict[int, int]] = [dict() for _ in range(n)]
        for u, v, c in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if c not in colset:
                raise GraphError(f"edge ({u}, {v}) has unknown colour {c}")
            if v in col[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            if c in nbr[u] or c in nbr[v]:
                w = u if c in nbr[u] else v
                raise GraphError(f"colour {c} appears twice at vertex {w}")
            nbr[u][c] = v
            nbr[v][c] = u
            col[u][v] = c
            col[v][u] = c
        if not relaxed:
            if n % 2:
                if cols:
                    raise GraphError("a strict graph with colours needs an even number of vertices")
            for c in cols:
                for v in range(n):
                    if c not in nbr[v]:
                        raise GraphError(f"colour {c} is not a perfect matching (misses vertex {v})")
        self.n = n
        self.colours = cols
        self.relaxed = relaxed
        self._nbr = tuple(nbr)
        self._col = tuple(col)
        self._hash = None

    # basic queries

    def nbr(self, v: int, c: int) -> int | None:
        return self._nbr[v].get(c)

    def colour(self, u: int, v: int) -> int | None:
        return self._col[u].get(v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._col[u]

    def neighbours(self, v: int) -> dict[int, int]:
        """Map neighbour -> colour for ``v`` (a fresh dict)."""
        return dict(self._col[v])

    def colours_at(self, v: int) -> dict[int, int]:
        """Map colour -> neighbour for ``v`` (a fresh dict)."""
        return dict(self._nbr[v])

    def degree(self, v: int) -> int:
        return len(self._col[v])

    def missing_colours(self, v: int) -> list[int]:
        return [c for c in self.colours if c not in self._nbr[v]]

    def edges(self) -> list[Edge]:
        out = []
        for u in range(self.n):
            for v, c in self._col[u].items():
                if u < v:
                    out.append((u, v, c))
        out.sort()
        return out

    def num_edges(self) -> int:
        return sum(len(d) for d in self._col) // 2

    def colour_class(self, c: int) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n)
                      if (v := self._nbr[u].get(c)) is not None and u < v)

    @property
    def is_full(self) -> bool:
        """True for a 1-factorization of ``K_n``."""
        return not self.relaxed and len(self.colours) == self.n - 1

    # derived graphs

    def replace_edges(self, removed: Iterable[Sequence[int]], added: Iterable[Edge],
                      colours: Iterable[int] | None = None) -> "ColouredGraph":
        """Return a new graph with ``removed`` pairs deleted and ``added`` edges inserted."""
        gone = {_key(e[0], e[1]) for e in removed}
        for u, v in gone:
            if not self.has_edge(u, v):
                raise NonEdgeError(u, v)
        edges = [e for e in self.edges() if (e[0], e[1]) not in gone]
        edges.extend(added)
        return ColouredGraph(self.n, self.colours if colours is None else colours, edges,
                             relaxed=self.relaxed)

    def relabel_colours(self, mapping: dict[int, int]) -> "ColouredGraph":
        return ColouredGraph(self.n, [mapping[c] for c in self.colours],
                             [(u, v, mapping[c]) for u, v, c in self.edges()], relaxed=self.relaxed)

    def relabel_vertices(self, perm: Sequence[int]) -> "ColouredGraph":
        return ColouredGraph(self.n, self.colours,
                             [(perm[u], perm[v], c) for u, v, c in self.edges()], relaxed=self.relaxed)

    # serialisation

    def to_dict(self) -> dict:
        d = {"n": self.n, "colours": list(self.colours),
             "edges": [list(e) for e in self.edges()]}
        if self.relaxed:
            d["relaxed"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ColouredGraph":
        try:
            n = int(d["n"])
            colours = [int(c) for c in d["colours"]]
            edges = [(int(u), int(v), int(c)) for u, v, c in d["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph document: {exc}") from exc
        if len(set(colours)) != len(colours):
            raise GraphError("duplicate colour ids")
        return cls(n, colours, edges, relaxed=bool(d.get("relaxed", False)))

    @classmethod
    def from_json(cls, text: str) -> "ColouredGraph":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise GraphError("graph document must be a JSON object")
        return cls.from_dict(d)

    def __eq__(self, other):
        if not isinstance(other, ColouredGraph):
            return NotImplemented
        return (self.n == other.n and self.colours == other.colours
                and self.relaxed == other.relaxed and self._col == other._col)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.colours, tuple(self.edges())))
        return self._hash

    def __repr__(self):
        kind = "relaxed" if self.relaxed else "strict"
        return f"ColouredGraph(n={self.n}, colours={len(self.colours)}, edges={self.num_edges()}, {kind})"


def load_graph(path: str) -> ColouredGraph:
    with open(path) as fh:
        return ColouredGraph.from_json(fh.read())


def save_graph(g: ColouredGraph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(g.to_json())
        fh.write("\n")


# walking and counting

def c_neighbour(g: ColouredGraph, v: int, c: int) -> int | None:
    return g.nbr(v, c)


def walk_end(g: ColouredGraph, v: int, colours: Sequence[int]) -> int | None:
    """Follow the colours in order from ``v``; ``None`` if some step is missing."""
    for c in colours:
        v = g.nbr(v, c)
        if v is None:
            return None
    return v


def count_edges_within(g: ColouredGraph, vertices: Iterable[int], colours: Iterable[int]) -> int:
    """Number of edges with both ends in ``vertices`` and colour in ``colours``."""
    vs = set(vertices)
    cs = set(colours)
    total = 0
    for u in vs:
        for c, v in g._nbr[u].items():
            if c in cs and v in vs:
                total += 1
    return total // 2


def crossing_edges(g: ColouredGraph, a: Iterable[int], b: Iterable[int]) -> int:
    """Number of edges ``xy`` with ``x`` in ``a`` and ``y`` in ``b``.

    Each edge is counted once, including edges lying inside ``a & b``.
    """
    sa, sb = set(a), set(b)
    seen = set()
    for x in sa:
        for y in g._col[x]:
            if y in sb:
                seen.add(_key(x, y))
    return len(seen)


def restrict(g: ColouredGraph, colours: Iterable[int]) -> ColouredGraph:
    """Subgraph formed by the given colour classes."""
    keep = set(colours)
    missing = keep - set(g.colours)
    if missing:
        raise GraphError(f"colours {sorted(missing)} are not in the graph")
    return ColouredGraph(g.n, keep, [e for e in g.edges() if e[2] in keep], relaxed=g.relaxed)


# verification

def path_colours(g: ColouredGraph, vertices: Sequence[int]) -> list[int]:
    out = []
    for u, v in zip(vertices, vertices[1:]):
        c = g.colour(u, v)
        if c is None:
            raise NonEdgeError(u, v)
        out.append(c)
    return out


def verify_rainbow_path(g: ColouredGraph, vertices: Sequence[int]) -> bool:
    """Distinct vertices, consecutive pairs adjacent, all edge colours distinct.

    Raises ``NonEdgeError`` naming the first non-adjacent consecutive pair.
    """
    if len(set(vertices)) != len(vertices):
        return False
    cols = path_colours(g, vertices)
    return len(set(cols)) == len(cols)


def verify_rainbow_hamilton_path(g: ColouredGraph, vertices: Sequence[int]) -> bool:
    return len(vertices) == g.n and verify_rainbow_path(g, vertices)


def verify_rainbow_cycle(g: ColouredGraph, vertices: Sequence[int]) -> bool:
    """``vertices`` lists a cycle (closing edge implicit) with distinct colours."""
    if len(vertices) < 3 or len(set(vertices)) != len(vertices):
        return False
    cols = path_colours(g, list(vertices) + [vertices[0]])
    return len(set(cols)) == len(cols)


def verify_rainbow_cycle_all_colours(g: ColouredGraph, vertices: Sequence[int]) -> bool:
    if not verify_rainbow_cycle(g, vertices):
        return False
    cols = set(path_colours(g, list(vertices) + [vertices[0]]))
    return cols == set(g.colours)


@dataclass(frozen=True)
class ColourPartition:
    """Four disjoint colour classes ``D1..D4`` of near-equal size."""

    parts: tuple[frozenset, frozenset, frozenset, frozenset]

    def __post_init__(self):
        seen: set[int] = set()
        for p in self.parts:
            if seen & p:
                raise GraphError("colour partition parts overlap")
            seen |= p
        sizes = [len(p) for p in self.parts]
        if max(sizes) - min(sizes) > 1:
            raise GraphError(f"colour partition is not equitable: sizes {sizes}")

    @classmethod
    def equitable(cls, colours: Iterable[int]) -> "ColourPartition":
        """Split sorted colours into four contiguous blocks, larger blocks first."""
        cols = sorted(colours)
        q, r = divmod(len(cols), 4)
        parts, i = [], 0
        for j in range(4):
            size = q + (1 if j < r else 0)
            parts.append(frozenset(cols[i:i + size]))
            i += size
        return cls(tuple(parts))

    def part_of(self, c: int) -> int | None:
        """Index 1..4 of the part containing ``c``."""
        for i, p in enumerate(self.parts, start=1):
            if c in p:
                return i
        return None

    @property
    def colours(self) -> frozenset:
        return frozenset().union(*self.parts)

    def __getitem__(self, i: int) -> frozenset:
        return self.parts[i - 1]
