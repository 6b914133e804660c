"""Free-group infrastructure.

Free groups are RAAGs on edgeless graphs, so free words are ``TraceWord``s
over a ``discrete`` graph and are always freely reduced.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import InputError
from .graph_core import SimplicialGraph, discrete
from .trace_words import TraceWord, format_word, normalize


def free_group(names: Sequence[str]) -> SimplicialGraph:
    return discrete(list(names))


def _as_free_word(g: SimplicialGraph, w) -> TraceWord:
    if g.edges:
        raise InputError("free words need an edgeless graph")
    return w if isinstance(w, TraceWord) else normalize(g, w)


# -- Stallings foldings ---------------------------------------------------------

class StallingsAutomaton:
    """Folded core graph of a finitely generated subgroup of a free group.

    Edges are ``(src, label, dst)`` with ``label`` a generator name; reading
    ``label^-1`` at ``dst`` moves to ``src``.  States are numbered by a
    breadth-first walk from the base state (always 0), so two automata of the
    same subgroup are identical.
    """

    def __init__(self, alphabet: SimplicialGraph, n_states: int, edges: Iterable[tuple[int, str, int]]):
        self.alphabet = alphabet
        self.n_states = n_states
        self.edges = frozenset(edges)
        self.base = 0
        self._out = {(s, a): d for s, a, d in self.edges}
        self._in = {(d, a): s for s, a, d in self.edges}

    def __eq__(self, other):
        if not isinstance(other, StallingsAutomaton):
            return NotImplemented
        return self.n_states == other.n_states and self.edges == other.edges

    def __hash__(self):
        return hash((self.n_states, self.edges))

    def __repr__(self):
        return f"StallingsAutomaton(states={self.n_states}, edges={sorted(self.edges)})"

    def rank(self) -> int:
        return len(self.edges) - self.n_states + 1

    def member(self, w) -> bool:
        w = _as_free_word(self.alphabet, w)
        state = self.base
        for vertex, sign in w.letters:
            nxt = self._out.get((state, vertex)) if sign > 0 else self._in.get((state, vertex))
            if nxt is None:
                return False
            state = nxt
        return state == self.base

    def is_whole_group(self) -> bool:
        return self.n_states == 1 and len(self.edges) == len(self.alphabet.vertices)


def stallings_build(alphabet: SimplicialGraph, gens: Iterable) -> StallingsAutomaton:
    """Fold the bouquet of generator petals into the core graph of <gens>."""
    parent: list[int] = [0]
    edges: set[tuple[int, str, int]] = set()

    def new_state() -> int:
        parent.append(len(parent))
        return len(parent) - 1

    for w in gens:
        w = _as_free_word(alphabet, w)
        if not w:
            continue
        letters = w.letters
        state = 0
        for k, (vertex, sign) in enumerate(letters):
            nxt = 0 if k == len(letters) - 1 else new_state()
            edges.add((state, vertex, nxt) if sign > 0 else (nxt, vertex, state))
            state = nxt

    def find(s: int) -> int:
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    folded = True
    while folded:
        folded = False
        edges = {(find(s), a, find(d)) for s, a, d in edges}
        out: dict = {}
        inn: dict = {}
        for s, a, d in sorted(edges):
            for table, key, val in ((out, (s, a), d), (inn, (d, a), s)):
                other = table.get(key)
                if other is None:
                    table[key] = val
                elif other != val:
                    # keep the base state as root so it survives as 0
                    lo, hi = sorted((other, val))
                    parent[hi] = lo
                    folded = True
                    break
            if folded:
                break

    # prune hanging trees down to the core
    while True:
        degree: dict[int, int] = {}
        for s, _, d in edges:
            degree[s] = degree.get(s, 0) + 1
            degree[d] = degree.get(d, 0) + 1
        leaves = {v for v, k in degree.items() if k == 1 and v != 0}
        if not leaves:
            break
        edges = {e for e in edges if e[0] not in leaves and e[2] not in leaves}

    # canonical renumbering by BFS from the base in letter order
    adj: dict[int, list] = {}
    for s, a, d in edges:
        adj.setdefault(s, []).append(((alphabet.index[a], 0), d))
        adj.setdefault(d, []).append(((alphabet.index[a], 1), s))
    order = {0: 0}
    queue = [0]
    for v in queue:
        for _, w in sorted(adj.get(v, [])):
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    renamed = {(order[s], a, order[d]) for s, a, d in edges}
    return StallingsAutomaton(alphabet, len(order), renamed)


def stallings_rank(alphabet: SimplicialGraph, gens: Iterable) -> int:
    return stallings_build(alphabet, gens).rank()


def is_free_basis(alphabet: SimplicialGraph, gens: Sequence) -> bool:
    """Whether ``gens`` freely generate a free subgroup of rank len(gens)."""
    words = [_as_free_word(alphabet, w) for w in gens]
    if any(not w for w in words) or len(set(words)) != len(words):
        return False
    return stallings_build(alphabet, words).rank() == len(words)


# -- presentations and abelianization -------------------------------------------

@dataclass(frozen=True)
class Presentation:
    gens: tuple[str, ...]
    relators: tuple[TraceWord, ...]

    @classmethod
    def make(cls, gens: Sequence[str], relators: Iterable) -> "Presentation":
        g = free_group(gens)
        return cls(tuple(gens), tuple(_as_free_word(g, r) for r in relators))

    @property
    def graph(self) -> SimplicialGraph:
        return free_group(self.gens)

    def exponent_matrix(self) -> list[list[int]]:
        rows = []
        for r in self.relators:
            row = [0] * len(self.gens)
            for c in r.codes:
                row[c >> 1] += -1 if c & 1 else 1
            rows.append(row)
        return rows

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.gens)]
        lines += [f"rel: {format_word(r)}" for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        gens = None
        rels = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, rest = line.partition(":")
            key = key.strip()
            if not sep:
                raise InputError(f"line {lineno}: expected 'key: value'")
            if gens is None:
                if key != "gens":
                    raise InputError(f"line {lineno}: first data line must be 'gens:'")
                gens = rest.split()
            elif key == "rel":
                rels.append(rest.strip())
            else:
                raise InputError(f"line {lineno}: unknown key {key!r}")
        if gens is None:
            raise InputError("no 'gens:' line")
        return cls.make(gens, rels)

    @classmethod
    def from_file(cls, path) -> "Presentation":
        return cls.from_text(Path(path).read_text())


def smith_normal_form(matrix: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` over the integers.

    D is diagonal with non-negative entries, each dividing the next.  Entries
    are Python ints, so nothing overflows.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = [list(map(int, row)) for row in matrix]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not entries:
                return u, a, v
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    add_row(t, i, -q)
                dirty |= a[i][t] != 0
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    add_col(t, j, -q)
                dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is not None:
                add_row(bad, t, 1)
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v


def hermite_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows`` (zero rows dropped)."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    n = len(a[0])
    out = []
    col = 0
    while a and col < n:
        nz = [r for r in a if r[col]]
        if not nz:
            col += 1
            continue
        rest = [r for r in a if not r[col]]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            nxt = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[col] else rest).append(r)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, r in enumerate(out):
            q = r[col] // piv[col]
            out[k] = [x - q * y for x, y in zip(r, piv)]
        out.append(piv)
        a = [r for r in rest if any(r)]
        col += 1
    return out


@dataclass(frozen=True)
class AbelianInvariants:
    diagonal: tuple[int, ...]
    free_rank: int

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d > 1)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def abelianization_snf(p: Presentation) -> AbelianInvariants:
    """Abelianization of <gens | relators> as Z^free_rank + sum Z/d."""
    mat = p.exponent_matrix()
    n = len(p.gens)
    if not mat:
        return AbelianInvariants((), n)
    _, d, _ = smith_normal_form(mat)
    diag = tuple(d[i][i] for i in range(min(len(mat), n)) if d[i][i])
    return AbelianInvariants(diag, n - len(diag))


def integer_kernel(matrix: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Hermite basis of {v in Z^ncols : matrix v = 0}."""
    if not matrix:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    _, d, v = smith_normal_form(matrix)
    rank = sum(1 for i in range(min(len(matrix), ncols)) if d[i][i])
    cols = [[v[i][j] for i in range(ncols)] for j in range(rank, ncols)]
    return hermite_rows(cols)


def infinite_quotient_certificate(p: Presentation) -> tuple[int, ...] | None:
    """A weight vector on the generators killing every relator, if one exists.

    Such a vector defines a surjection of the presented group onto Z.
    """
    basis = integer_kernel(p.exponent_matrix(), len(p.gens))
    if not basis:
        return None
    return tuple(basis[0])


def check_certificate(p: Presentation, weights: Sequence[int]) -> bool:
    if len(weights) != len(p.gens) or not any(weights):
        return False
    return all(sum(a * b for a, b in zip(row, weights)) == 0 for row in p.exponent_matrix())


# -- free products --------------------------------------------------------------

@dataclass(frozen=True)
class FreeProductWord:
    """Reduced element of a free product: alternating non-trivial syllables."""

    syllables: tuple[tuple[str, Any], ...]

    def __len__(self):
        return len(self.syllables)

    def __bool__(self):
        return bool(self.syllables)

    def __str__(self):
        if not self.syllables:
            return "ε"
        return " | ".join(f"{f}: {v}" for f, v in self.syllables)


def _default_trivial(value) -> bool:
    return not value


def free_product_reduce(syllables: Iterable[tuple[str, Any]],
                        is_trivial: Mapping[str, Callable[[Any], bool]] | None = None) -> FreeProductWord:
    """Drop trivial syllables and merge neighbours from the same factor.

    Syllable values must support ``*``; ``is_trivial`` maps a factor name to
    its word-problem oracle (default: falsy means trivial).
    """
    oracles = is_trivial or {}
    stack: list[tuple[str, Any]] = []
    for factor, value in syllables:
        trivial = oracles.get(factor, _default_trivial)
        if trivial(value):
            continue
        if stack and stack[-1][0] == factor:
            merged = stack[-1][1] * value
            stack.pop()
            if not trivial(merged):
                stack.append((factor, merged))
        else:
            stack.append((factor, value))
    return FreeProductWord(tuple(stack))
