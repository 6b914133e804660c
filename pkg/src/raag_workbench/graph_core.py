"""Finite simplicial graphs and the vertex-set combinatorics of their RAAGs.

A vertex set is a plain ``frozenset`` of vertex names; every function that
takes one validates it against the graph it is used with.
"""
from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError

VertexSet = frozenset


class SimplicialGraph:
    """Immutable simplicial graph with a declared (total) vertex order.

    The declaration order is part of the data: it fixes the shortlex order
    used for canonical forms of group elements.
    """

    __slots__ = ("vertices", "edges", "index", "_nbr", "_nbr_idx", "_noncomm_idx", "_hash")

    def __init__(self, vertices: Sequence[str], edges: Iterable[Iterable[str]] = ()):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError(f"duplicate vertex names in {vertices}")
        for v in vertices:
            if not isinstance(v, str) or not v or any(c.isspace() for c in v) or "^" in v:
                raise InputError(f"invalid vertex name {v!r}")
            if v == "ε":
                raise InputError("'ε' is reserved for the identity")
        index = {v: i for i, v in enumerate(vertices)}
        edge_set = set()
        for e in edges:
            pair = tuple(e)
            if len(pair) != 2:
                raise InputError(f"edge must have two endpoints: {pair}")
            u, v = pair
            if u == v:
                raise InputError(f"loop at {u!r}")
            for w in pair:
                if w not in index:
                    raise InputError(f"edge endpoint {w!r} is not a vertex")
            edge_set.add(frozenset(pair))
        self.vertices = vertices
        self.edges = frozenset(edge_set)
        self.index = index
        nbr = {v: set() for v in vertices}
        for e in self.edges:
            u, v = tuple(e)
            nbr[u].add(v)
            nbr[v].add(u)
        self._nbr = {v: frozenset(s) for v, s in nbr.items()}
        n = len(vertices)
        self._nbr_idx = tuple(frozenset(index[w] for w in self._nbr[v]) for v in vertices)
        # vertices that do not commute with i (i itself excluded)
        self._noncomm_idx = tuple(
            tuple(j for j in range(n) if j != i and j not in self._nbr_idx[i]) for i in range(n)
        )
        self._hash = hash((self.vertices, self.edges))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SimplicialGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"SimplicialGraph({list(self.vertices)}, {sorted(self.edge_list())})"

    def __len__(self):
        return len(self.vertices)

    def neighbors(self, v: str) -> frozenset:
        try:
            return self._nbr[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def adjacent(self, u: str, v: str) -> bool:
        return v in self.neighbors(u)

    def edge_list(self) -> list[tuple[str, str]]:
        """Edges as pairs ordered by declaration order, sorted."""
        idx = self.index
        pairs = []
        for e in self.edges:
            u, v = sorted(e, key=idx.__getitem__)
            pairs.append((u, v))
        pairs.sort(key=lambda p: (idx[p[0]], idx[p[1]]))
        return pairs

    def check_subset(self, u: Iterable[str]) -> frozenset:
        u = frozenset(u)
        bad = [v for v in u if v not in self.index]
        if bad:
            raise InputError(f"vertices {sorted(bad)} not in graph")
        return u

    def sorted_vertices(self, u: Iterable[str]) -> list[str]:
        return sorted(u, key=self.index.__getitem__)

    def full_subgraph(self, u: Iterable[str]) -> "SimplicialGraph":
        u = self.check_subset(u)
        verts = [v for v in self.vertices if v in u]
        return SimplicialGraph(verts, [e for e in self.edges if e <= u])

    def to_text(self) -> str:
        lines = ["vertices: " + " ".join(self.vertices) if self.vertices else "vertices:"]
        lines += [f"edge: {u} {v}" for u, v in self.edge_list()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SimplicialGraph":
        vertices = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, rest = line.partition(":")
            if not sep:
                raise InputError(f"line {lineno}: expected 'key: value', got {raw!r}")
            key = key.strip()
            fields = rest.split()
            if vertices is None:
                if key != "vertices":
                    raise InputError(f"line {lineno}: first data line must be 'vertices:'")
                vertices = fields
            elif key == "edge":
                if len(fields) != 2:
                    raise InputError(f"line {lineno}: edge needs two vertices")
                edges.append(fields)
            else:
                raise InputError(f"line {lineno}: unknown key {key!r}")
        if vertices is None:
            raise InputError("no 'vertices:' line")
        return cls(vertices, edges)

    @classmethod
    def from_file(cls, path) -> "SimplicialGraph":
        return cls.from_text(Path(path).read_text())


def link(g: SimplicialGraph, u: Iterable[str]) -> frozenset:
    """Common neighbourhood of ``u``; the link of the empty set is every vertex."""
    u = g.check_subset(u)
    result = set(g.vertices)
    for v in u:
        result &= g.neighbors(v)
    return frozenset(result)


def irreducible_components(g: SimplicialGraph, u: Iterable[str]) -> list[frozenset]:
    """Split ``u`` into its irreducible blocks.

    Blocks are the connected components of the complement graph on ``u``,
    listed in order of their earliest declared vertex.
    """
    u = g.check_subset(u)
    if not u:
        raise InputError("irreducible_components of the empty set")
    remaining = g.sorted_vertices(u)
    blocks = []
    seen = set()
    for start in remaining:
        if start in seen:
            continue
        block = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in u:
                if w not in block and w != v and w not in g.neighbors(v):
                    block.add(w)
                    stack.append(w)
        seen |= block
        blocks.append(frozenset(block))
    return blocks


def is_irreducible(g: SimplicialGraph, u: Iterable[str]) -> bool:
    return len(irreducible_components(g, u)) == 1


def clique_number(g: SimplicialGraph) -> int:
    """Exact clique number by Bron-Kerbosch with pivoting on bitmasks."""
    n = len(g.vertices)
    if n == 0:
        raise InputError("clique number of the empty graph")
    nbr = [sum(1 << j for j in g._nbr_idx[i]) for i in range(n)]
    best = 0

    def expand(size: int, p: int, x: int) -> None:
        nonlocal best
        if p == 0:
            if x == 0 and size > best:
                best = size
            return
        if size + p.bit_count() <= best:
            return
        pivot = (p | x).bit_length() - 1
        candidates = p & ~nbr[pivot]
        while candidates:
            v = candidates.bit_length() - 1
            candidates &= ~(1 << v)
            expand(size + 1, p & nbr[v], x & nbr[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, (1 << n) - 1, 0)
    return best


# -- constructors ------------------------------------------------------------

def discrete(k, prefix: str = "v") -> SimplicialGraph:
    """Edgeless graph; ``k`` is a count (names prefix1..prefixk) or a name list."""
    names = [f"{prefix}{i}" for i in range(1, k + 1)] if isinstance(k, int) else list(k)
    return SimplicialGraph(names)


def complete(k, prefix: str = "v") -> SimplicialGraph:
    names = [f"{prefix}{i}" for i in range(1, k + 1)] if isinstance(k, int) else list(k)
    return SimplicialGraph(names, combinations(names, 2))


def _merged_names(g1: SimplicialGraph, g2: SimplicialGraph) -> dict[str, str]:
    taken = set(g1.vertices)
    own = set(g2.vertices)
    rename = {}
    for v in g2.vertices:
        name = v
        k = 2
        while name in taken or (name != v and name in own):
            name = f"{v}_{k}"
            k += 1
            if k > 10_000:
                raise InputError(f"cannot resolve name collision for {v!r}")
        taken.add(name)
        rename[v] = name
    return rename


def _combine(g1, g2, cross: bool, return_maps: bool):
    rename = _merged_names(g1, g2)
    verts = list(g1.vertices) + [rename[v] for v in g2.vertices]
    edges = [tuple(e) for e in g1.edges]
    edges += [(rename[u], rename[v]) for u, v in (tuple(e) for e in g2.edges)]
    if cross:
        edges += [(u, rename[v]) for u in g1.vertices for v in g2.vertices]
    g = SimplicialGraph(verts, edges)
    if return_maps:
        return g, {v: v for v in g1.vertices}, rename
    return g


def join(g1: SimplicialGraph, g2: SimplicialGraph, return_maps: bool = False):
    """Graph of A(g1) x A(g2). Colliding names from ``g2`` get a ``_k`` suffix."""
    return _combine(g1, g2, True, return_maps)


def disjoint_union(g1: SimplicialGraph, g2: SimplicialGraph, return_maps: bool = False):
    """Graph of A(g1) * A(g2)."""
    return _combine(g1, g2, False, return_maps)


def f2_power(d: int) -> SimplicialGraph:
    """Graph of F_2^d: vertices x1 y1 ... xd yd, edges across distinct factors."""
    if d < 1:
        raise InputError("f2_power needs d >= 1")
    verts = [name for i in range(1, d + 1) for name in (f"x{i}", f"y{i}")]
    edges = [
        (a, b)
        for i in range(1, d + 1)
        for j in range(i + 1, d + 1)
        for a in (f"x{i}", f"y{i}")
        for b in (f"x{j}", f"y{j}")
    ]
    return SimplicialGraph(verts, edges)


def build_graph(spec: str, *args) -> SimplicialGraph:
    """Dispatch by variant name: discrete, complete, join, disjoint_union, f2_power, from_file."""
    builders = {
        "discrete": discrete,
        "complete": complete,
        "join": join,
        "disjoint_union": disjoint_union,
        "f2_power": f2_power,
        "from_file": SimplicialGraph.from_file,
    }
    try:
        return builders[spec](*args)
    except KeyError:
        raise InputError(f"unknown graph variant {spec!r}") from None
