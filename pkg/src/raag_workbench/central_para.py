"""Centralizers, primitive roots and parabolic subgroups of a RAAG."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, PreconditionError, VerificationError
from .graph_core import SimplicialGraph, irreducible_components, link
from .trace_words import (
    TraceWord,
    _back_letters,
    _front_letters,
    cyclic_reduce,
    is_cyclically_reduced,
    retract,
)


@dataclass(frozen=True)
class FactorDecomposition:
    factors: tuple[TraceWord, ...]
    exponents: tuple[int, ...]
    link_set: frozenset

    @property
    def k(self) -> int:
        return len(self.factors)


def _shortlex_key(g: SimplicialGraph, u: Iterable[str]):
    idx = sorted(g.index[v] for v in u)
    return len(idx), idx


def factor_decomposition(t: TraceWord) -> FactorDecomposition:
    """Split a cyclically reduced ``t`` as t_1^n_1 ... t_k^n_k over its irreducible blocks."""
    if not t:
        raise PreconditionError("factor_decomposition of the identity")
    if not is_cyclically_reduced(t):
        raise PreconditionError(f"{t} is not cyclically reduced")
    g = t.graph
    blocks = sorted(irreducible_components(g, t.support), key=lambda b: _shortlex_key(g, b))
    factors, exponents = [], []
    for block in blocks:
        root, m = primitive_root(retract(block, t))
        factors.append(root)
        exponents.append(m)
    return FactorDecomposition(tuple(factors), tuple(exponents), link(g, t.support))


def _prefixes(g: SimplicialGraph, codes: Sequence[int], k: int, counts: dict) -> list[tuple]:
    """All prefix traces of length k of the geodesic ``codes`` with letter counts ``counts``."""
    level = {(): tuple(codes)}
    for _ in range(k):
        nxt = {}
        for prefix, rest in level.items():
            used = {}
            for c in prefix:
                used[c] = used.get(c, 0) + 1
            for c, pos in _front_letters(g, rest).items():
                if used.get(c, 0) >= counts.get(c, 0):
                    continue
                new = TraceWord(g, prefix + (c,)).codes
                if new not in nxt:
                    nxt[new] = rest[:pos] + rest[pos + 1:]
        level = nxt
    return sorted(level, key=lambda p: (len(p), p))


def primitive_root(x: TraceWord) -> tuple[TraceWord, int]:
    """Return ``(r, m)`` with x = r^m and m maximal."""
    if not x:
        raise PreconditionError("the identity has no primitive root")
    g = x.graph
    u, c = cyclic_reduce(x)
    n = len(c)
    total = {}
    for code in c.codes:
        total[code] = total.get(code, 0) + 1
    for m in range(n, 1, -1):
        if n % m or any(v % m for v in total.values()):
            continue
        counts = {code: v // m for code, v in total.items()}
        for prefix in _prefixes(g, c.codes, n // m, counts):
            r = TraceWord(g, prefix, _trusted=True)
            if r ** m == c:
                return r.conjugate(u), m
    return x, 1


def centralizer_generators(t: TraceWord) -> list[TraceWord]:
    """Generators of C_A(t): conjugated pure factors plus the link of the support."""
    g = t.graph
    if not t:
        return [TraceWord.generator(g, v) for v in g.vertices]
    u, core = cyclic_reduce(t)
    dec = factor_decomposition(core)
    gens = [f.conjugate(u) for f in dec.factors]
    gens += [TraceWord.generator(g, s).conjugate(u) for s in g.sorted_vertices(dec.link_set)]
    return gens


# -- parabolic subgroups ----------------------------------------------------------

def _strip_right(u: TraceWord, allowed: Iterable[str]) -> TraceWord:
    """Shortest representative of the coset u A_allowed."""
    g = u.graph
    keep = {g.index[v] for v in allowed}
    codes = list(u.codes)
    while codes:
        drop = {pos for c, pos in _back_letters(g, codes).items() if (c >> 1) in keep}
        if not drop:
            break
        codes = [c for k, c in enumerate(codes) if k not in drop]
    return TraceWord(g, codes)


class Parabolic:
    """The parabolic subgroup ``conj A_base conj^-1``.

    ``conj`` is kept as the shortest element of ``conj A_{base u link(base)}``,
    so two Parabolics are equal as subgroups iff their fields are equal.
    """

    __slots__ = ("graph", "conj", "base")

    def __init__(self, graph: SimplicialGraph, conj: TraceWord | None = None, base: Iterable[str] = ()):
        base = graph.check_subset(base)
        if conj is None:
            conj = TraceWord.identity(graph)
        elif conj.graph != graph:
            raise InputError("conjugator lives over a different graph")
        self.graph = graph
        self.base = base
        self.conj = _strip_right(conj, base | link(graph, base))

    def __eq__(self, other):
        if not isinstance(other, Parabolic):
            return NotImplemented
        return self.graph == other.graph and self.base == other.base and self.conj == other.conj

    def __hash__(self):
        return hash((self.graph, self.base, self.conj))

    def __repr__(self):
        return f"Parabolic({format_parabolic(self)!r})"

    def __str__(self):
        return format_parabolic(self)

    @property
    def rank(self) -> int:
        return len(self.base)

    def is_full(self) -> bool:
        return not self.conj

    def generators(self) -> list[TraceWord]:
        g = self.graph
        return [TraceWord.generator(g, v).conjugate(self.conj) for v in g.sorted_vertices(self.base)]

    def __contains__(self, x: TraceWord) -> bool:
        return member(x, self)


def format_parabolic(p: Parabolic) -> str:
    return f"conj: {p.conj} ; base: {' '.join(p.graph.sorted_vertices(p.base))}".rstrip()


def member(x: TraceWord, p: Parabolic) -> bool:
    _same_graph(p.graph, x.graph)
    return x.conjugate(~p.conj).support <= p.base


def equal(p: Parabolic, q: Parabolic) -> bool:
    _same_graph(p.graph, q.graph)
    return p == q


def normalizer(p: Parabolic) -> Parabolic:
    return Parabolic(p.graph, p.conj, p.base | link(p.graph, p.base))


def contains(p: Parabolic, q: Parabolic) -> bool:
    """Whether ``q`` is a subgroup of ``p``."""
    _same_graph(p.graph, q.graph)
    return all(member(h, p) for h in q.generators())


def _same_graph(g1: SimplicialGraph, g2: SimplicialGraph) -> None:
    if g1 is not g2 and g1 != g2:
        raise InputError("objects live over different graphs")


def pc_element(x: TraceWord) -> Parabolic:
    """Parabolic closure of a single element: u A_supp(t) u^-1 for x = u t u^-1."""
    u, t = cyclic_reduce(x)
    return Parabolic(x.graph, u, t.support)


def pc_join(p: Parabolic, q: Parabolic) -> Parabolic:
    """Smallest parabolic containing both ``p`` and ``q``.

    Conjugate so that p = A_X and q = w A_Y w^-1, then shorten w: leading
    letters in X are absorbed by A_X, leading letters in link(X) move into an
    outer conjugator (they normalize A_X), trailing letters in Y u link(Y) are
    absorbed by the normalizer of A_Y.  What is left spans the closure.
    """
    _same_graph(p.graph, q.graph)
    g = p.graph
    if not p.base:
        return q
    if not q.base:
        return p
    x_set, y_set = p.base, q.base
    x_idx = {g.index[v] for v in x_set}
    lx_idx = {g.index[v] for v in link(g, x_set)}
    ny_idx = {g.index[v] for v in y_set | link(g, y_set)}
    w = list(((~p.conj) * q.conj).codes)
    outer = []
    while w:
        front = _front_letters(g, w)
        drop = {pos for c, pos in front.items() if (c >> 1) in x_idx}
        if not drop:
            drop = {pos for c, pos in _back_letters(g, w).items() if (c >> 1) in ny_idx}
        if not drop:
            moved = sorted((c, pos) for c, pos in front.items() if (c >> 1) in lx_idx)
            if not moved:
                break
            c, pos = moved[0]
            outer.append(c)
            drop = {pos}
        w = [c for k, c in enumerate(w) if k not in drop]
    names = g.vertices
    base = x_set | y_set | {names[c >> 1] for c in w}
    conj = p.conj * TraceWord(g, outer)
    return Parabolic(g, conj, base)


def pc_set(gs: Sequence[TraceWord], graph: SimplicialGraph | None = None,
           certified: bool = False, bound: int = 6) -> Parabolic:
    """Parabolic closure of a finite set of elements.

    With ``certified`` the answer is cross-checked against exhaustive search
    over conjugators of length at most ``bound``.
    """
    gs = list(gs)
    if graph is None:
        if not gs:
            raise InputError("pc_set of an empty list needs the graph")
        graph = gs[0].graph
    result = Parabolic(graph)
    for x in gs:
        _same_graph(graph, x.graph)
        result = pc_join(result, pc_element(x))
    if certified:
        check = pc_set_bounded(gs, graph, bound)
        if check is not None and check != result:
            raise VerificationError(f"pc_set disagrees with bounded search: {result} vs {check}")
    return result


def pc_set_bounded(gs: Sequence[TraceWord], graph: SimplicialGraph, bound: int = 6) -> Parabolic | None:
    """Inclusion-least parabolic u A_X u^-1 containing ``gs`` over all |u| <= bound."""
    gs = list(gs)
    best = None
    stack = [(TraceWord.identity(graph), None, 0)]
    gens = [TraceWord(graph, (c,), _trusted=True) for c in range(2 * len(graph))]
    while stack:
        u, last, depth = stack.pop()
        base = frozenset().union(*(x.conjugate(~u).support for x in gs)) if gs else frozenset()
        cand = Parabolic(graph, u, base)
        if best is None or (cand.rank, len(cand.conj), cand.conj.codes) < (best.rank, len(best.conj), best.conj.codes):
            best = cand
        if depth < bound:
            for c, l in enumerate(gens):
                if last is not None and c == last ^ 1:
                    continue
                stack.append((u * l, c, depth + 1))
    return best


def is_direct_factor(p: Parabolic) -> tuple[bool, frozenset | None]:
    """Whether the full subgroup A_X splits off: V = X disjoint-union link(X)."""
    if p.conj:
        raise PreconditionError(f"{p} is not a full subgroup")
    g = p.graph
    lk = link(g, p.base)
    if p.base | lk == frozenset(g.vertices):
        return True, lk
    return False, None
