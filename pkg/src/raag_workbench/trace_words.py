"""RAAG elements as canonical trace words.

A letter is stored internally as an integer code ``2*i + (sign < 0)`` where
``i`` is the vertex index, so the integer order of codes is the letter order
used for shortlex: vertices in declaration order, ``v`` before ``v^-1``.

Normalization piles letters per vertex (heaps of pieces): pile ``i`` records
letters on vertex ``i`` and a blocking marker for every letter that does not
commute with it.  A new letter cancels iff the top of its own pile is its
inverse.  Reading the piles back, always taking the least available letter,
gives the shortlex-least geodesic.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence, Union

from .errors import InputError
from .graph_core import SimplicialGraph


class Letter(NamedTuple):
    vertex: str
    sign: int = 1

    def inverse(self) -> "Letter":
        return Letter(self.vertex, -self.sign)

    def __str__(self):
        return self.vertex if self.sign > 0 else f"{self.vertex}^-1"


def _normal_codes(g: SimplicialGraph, codes: Iterable[int]) -> tuple[int, ...]:
    noncomm = g._noncomm_idx
    n = len(noncomm)
    piles: list[list[int]] = [[] for _ in range(n)]
    total = 0
    for c in codes:
        i = c >> 1
        s = -1 if c & 1 else 1
        p = piles[i]
        if p and p[-1] == -s:
            p.pop()
            for j in noncomm[i]:
                piles[j].pop()
            total -= 1
        else:
            p.append(s)
            for j in noncomm[i]:
                piles[j].append(0)
            total += 1
    if total <= 1:
        for i, p in enumerate(piles):
            if p and p[0]:
                return (2 * i + (p[0] < 0),)
        return ()
    heads = [0] * n
    lens = [len(p) for p in piles]
    out = []
    for _ in range(total):
        for i in range(n):
            h = heads[i]
            if h < lens[i]:
                s = piles[i][h]
                if s:
                    break
        out.append(2 * i + (s < 0))
        heads[i] = h + 1
        for j in noncomm[i]:
            heads[j] += 1
    return tuple(out)


class TraceWord:
    """An element of A(graph) held in shortlex-least geodesic form.

    Equality of group elements is equality of stored codes.
    """

    __slots__ = ("graph", "codes", "_hash")

    def __init__(self, graph: SimplicialGraph, codes: Sequence[int] = (), _trusted: bool = False):
        self.graph = graph
        self.codes = tuple(codes) if _trusted else _normal_codes(graph, codes)
        self._hash = None

    @classmethod
    def identity(cls, graph: SimplicialGraph) -> "TraceWord":
        return cls(graph, (), _trusted=True)

    @classmethod
    def generator(cls, graph: SimplicialGraph, vertex: str, sign: int = 1) -> "TraceWord":
        return cls(graph, (_code(graph, vertex, sign),), _trusted=True)

    @property
    def letters(self) -> tuple[Letter, ...]:
        names = self.graph.vertices
        return tuple(Letter(names[c >> 1], -1 if c & 1 else 1) for c in self.codes)

    @property
    def support(self) -> frozenset:
        names = self.graph.vertices
        return frozenset(names[c >> 1] for c in self.codes)

    def __len__(self):
        return len(self.codes)

    def __bool__(self):
        return bool(self.codes)

    def is_identity(self) -> bool:
        return not self.codes

    def __eq__(self, other):
        if not isinstance(other, TraceWord):
            return NotImplemented
        return self.codes == other.codes and self.graph == other.graph

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.graph, self.codes))
        return self._hash

    def __lt__(self, other: "TraceWord") -> bool:
        return (len(self.codes), self.codes) < (len(other.codes), other.codes)

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"TraceWord({format_word(self)!r})"

    def _check(self, other: "TraceWord") -> None:
        if not isinstance(other, TraceWord):
            raise InputError(f"expected a TraceWord, got {type(other).__name__}")
        if other.graph is not self.graph and other.graph != self.graph:
            raise InputError("trace words live over different graphs")

    def __mul__(self, other: "TraceWord") -> "TraceWord":
        self._check(other)
        if not other.codes:
            return self
        if not self.codes:
            return other
        return TraceWord(self.graph, self.codes + other.codes)

    def __invert__(self) -> "TraceWord":
        return TraceWord(self.graph, tuple(c ^ 1 for c in reversed(self.codes)))

    inverse = __invert__

    def __pow__(self, k: int) -> "TraceWord":
        if k == 0:
            return TraceWord.identity(self.graph)
        base = self.codes if k > 0 else tuple(c ^ 1 for c in reversed(self.codes))
        return TraceWord(self.graph, base * abs(k))

    def conjugate(self, y: "TraceWord") -> "TraceWord":
        """Return ``y self y^-1``."""
        self._check(y)
        return TraceWord(self.graph, y.codes + self.codes + tuple(c ^ 1 for c in reversed(y.codes)))

    def commutes(self, y: "TraceWord") -> bool:
        self._check(y)
        return (self * y) == (y * self)


GroupElementLike = Union[TraceWord, str, Iterable]


def _code(g: SimplicialGraph, vertex: str, sign: int) -> int:
    try:
        i = g.index[vertex]
    except KeyError:
        raise InputError(f"unknown vertex {vertex!r}") from None
    if sign not in (1, -1):
        raise InputError(f"letter sign must be +1 or -1, got {sign!r}")
    return 2 * i + (sign < 0)


def parse_tokens(text: str) -> list[Letter]:
    """Parse ``v``, ``v^-1``, ``v^k`` tokens into letters (no graph check)."""
    letters: list[Letter] = []
    for tok in text.split():
        if tok in ("ε", "1"):
            continue
        name, sep, exp = tok.partition("^")
        if not name:
            raise InputError(f"bad token {tok!r}")
        k = 1
        if sep:
            try:
                k = int(exp)
            except ValueError:
                raise InputError(f"bad exponent in token {tok!r}") from None
            if k == 0:
                raise InputError(f"zero exponent in token {tok!r}")
        letters.extend([Letter(name, 1 if k > 0 else -1)] * abs(k))
    return letters


def raw_codes(g: SimplicialGraph, raw) -> list[int]:
    if isinstance(raw, TraceWord):
        if raw.graph != g:
            raise InputError("trace word lives over a different graph")
        return list(raw.codes)
    if isinstance(raw, str):
        raw = parse_tokens(raw)
    codes = []
    for item in raw:
        if isinstance(item, str):
            codes.append(_code(g, item, 1))
        else:
            vertex, sign = item
            codes.append(_code(g, vertex, sign))
    return codes


def normalize(g: SimplicialGraph, raw) -> TraceWord:
    """Canonical form of a raw letter sequence (or token string) over ``g``."""
    return TraceWord(g, raw_codes(g, raw))


def parse_word(g: SimplicialGraph, text: str) -> TraceWord:
    return normalize(g, text)


def format_word(x: TraceWord) -> str:
    if not x.codes:
        return "ε"
    return " ".join(str(letter) for letter in x.letters)


# -- group operations ----------------------------------------------------------

def multiply(x: TraceWord, y: TraceWord) -> TraceWord:
    return x * y


def invert(x: TraceWord) -> TraceWord:
    return ~x


def conjugate(x: TraceWord, y: TraceWord) -> TraceWord:
    """``y x y^-1``."""
    return x.conjugate(y)


def power(x: TraceWord, k: int) -> TraceWord:
    return x ** k


def commutes(x: TraceWord, y: TraceWord) -> bool:
    return x.commutes(y)


def equal(x: TraceWord, y: TraceWord) -> bool:
    x._check(y)
    return x == y


def length_support(x: TraceWord) -> tuple[int, frozenset]:
    return len(x), x.support


def retract(u: Iterable[str], x: TraceWord, to_subgraph: bool = False) -> TraceWord:
    """Canonical retraction onto the full subgroup A_u.

    The result is expressed over the ambient graph unless ``to_subgraph``.
    """
    g = x.graph
    keep = {g.index[v] for v in g.check_subset(u)}
    codes = [c for c in x.codes if (c >> 1) in keep]
    # deleting letters of a canonical word and renormalizing is a homomorphism
    y = TraceWord(g, codes)
    if to_subgraph:
        sub = g.full_subgraph(u)
        return normalize(sub, y.letters)
    return y


def _front_letters(g: SimplicialGraph, codes: Sequence[int]) -> dict[int, int]:
    """Map code -> position for letters that can be shuffled to the front."""
    noncomm = g._noncomm_idx
    blocked: set[int] = set()
    front = {}
    for pos, c in enumerate(codes):
        i = c >> 1
        if i not in blocked:
            front.setdefault(c, pos)
        blocked.add(i)
        blocked.update(noncomm[i])
    return front


def _back_letters(g: SimplicialGraph, codes: Sequence[int]) -> dict[int, int]:
    noncomm = g._noncomm_idx
    blocked: set[int] = set()
    back = {}
    for pos in range(len(codes) - 1, -1, -1):
        c = codes[pos]
        i = c >> 1
        if i not in blocked:
            back.setdefault(c, pos)
        blocked.add(i)
        blocked.update(noncomm[i])
    return back


def cyclic_reduce(x: TraceWord) -> tuple[TraceWord, TraceWord]:
    """Return ``(u, t)`` with ``x = u t u^-1``, t cyclically reduced, |x| = |t| + 2|u|.

    Greedy: while some letter ``l`` can be shuffled to the front and ``l^-1``
    to the back, strip both and append ``l`` to the conjugator.  The least
    such letter is taken each time so the result is deterministic.
    """
    g = x.graph
    codes = list(x.codes)
    conj = []
    while len(codes) >= 2:
        front = _front_letters(g, codes)
        back = _back_letters(g, codes)
        choice = None
        for c in sorted(front):
            if (c ^ 1) in back:
                choice = c
                break
        if choice is None:
            break
        p, q = front[choice], back[choice ^ 1]
        conj.append(choice)
        codes = [c for k, c in enumerate(codes) if k != p and k != q]
    u = TraceWord(g, conj)
    t = TraceWord(g, codes)
    if len(x) != len(t) + 2 * len(u):
        raise AssertionError(f"length identity failed for {x}")
    return u, t


def is_cyclically_reduced(x: TraceWord) -> bool:
    front = _front_letters(x.graph, x.codes)
    back = _back_letters(x.graph, x.codes)
    return not any((c ^ 1) in back for c in front)


class Homomorphism:
    """Substitution map from named generators to trace words over a target graph."""

    def __init__(self, domain: Sequence[str], images: dict, target: SimplicialGraph):
        self.domain = tuple(domain)
        self.target = target
        missing = [v for v in self.domain if v not in images]
        if missing:
            raise InputError(f"no image for generators {missing}")
        extra = [v for v in images if v not in self.domain]
        if extra:
            raise InputError(f"images given for non-generators {extra}")
        self.images = {}
        for v in self.domain:
            img = images[v]
            if not isinstance(img, TraceWord):
                img = normalize(target, img)
            elif img.graph != target:
                raise InputError(f"image of {v!r} lives over a different graph")
            self.images[v] = img
        self._fwd = {v: self.images[v].codes for v in self.domain}
        self._inv = {v: (~self.images[v]).codes for v in self.domain}

    def __call__(self, w) -> TraceWord:
        return apply_hom(self, w)

    def __repr__(self):
        body = ", ".join(f"{v} -> {self.images[v]}" for v in self.domain)
        return f"Homomorphism({body})"

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """``self`` after ``other``."""
        return Homomorphism(other.domain, {v: self(other.images[v]) for v in other.domain}, self.target)


def apply_hom(h: Homomorphism, w) -> TraceWord:
    """Substitute generator images into ``w`` and normalize in the target.

    ``w`` may be a TraceWord over a graph whose vertices are the domain
    generators, a token string, or a sequence of (name, sign) pairs.
    """
    if isinstance(w, TraceWord):
        letters = w.letters
    elif isinstance(w, str):
        letters = parse_tokens(w)
    else:
        letters = [Letter(*item) if not isinstance(item, str) else Letter(item) for item in w]
    codes: list[int] = []
    for vertex, sign in letters:
        try:
            codes.extend(h._fwd[vertex] if sign > 0 else h._inv[vertex])
        except KeyError:
            raise InputError(f"unknown generator {vertex!r}") from None
    return TraceWord(h.target, codes)


def identity_hom(g: SimplicialGraph) -> Homomorphism:
    return Homomorphism(g.vertices, {v: TraceWord.generator(g, v) for v in g.vertices}, g)
