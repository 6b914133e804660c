"""The 3-generated subdirect products H_d of F_2^d and their diagnostics.

F = F(x, y, z).  For free words w_1..w_d in <x, y> forming a free basis,
phi_i : F -> <x, y> fixes x, y and sends z to w_i; its kernel L_i is the
normal closure of z^-1 w_i.  H_d is the image of phi = (phi_1, ..., phi_d)
inside F_2^d, realized as the RAAG on ``f2_power(d)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

from .errors import PreconditionError, VerificationError
from .free_tools import (
    Presentation,
    abelianization_snf,
    free_group,
    hermite_rows,
    infinite_quotient_certificate,
    is_free_basis,
    stallings_build,
)
from .graph_core import SimplicialGraph, f2_power
from .trace_words import Homomorphism, TraceWord, format_word, normalize

F3 = free_group(["x", "y", "z"])
F2 = free_group(["x", "y"])


def commutator(a: TraceWord, b: TraceWord) -> TraceWord:
    """[a, b] = a^-1 b^-1 a b."""
    return (~a) * (~b) * a * b


def long_commutator(elems: Sequence[TraceWord]) -> TraceWord:
    """Left-nested [[[e1, e2], e3], ...]; a single element is returned as is."""
    out = elems[0]
    for e in elems[1:]:
        out = commutator(out, e)
    return out


@dataclass(frozen=True)
class TupleElement:
    """Element of a direct product of free groups, one word per coordinate."""

    coords: tuple[TraceWord, ...]

    def __mul__(self, other: "TupleElement") -> "TupleElement":
        return TupleElement(tuple(a * b for a, b in zip(self.coords, other.coords)))

    def __invert__(self) -> "TupleElement":
        return TupleElement(tuple(~a for a in self.coords))

    def __pow__(self, k: int) -> "TupleElement":
        return TupleElement(tuple(a ** k for a in self.coords))

    def __bool__(self):
        return any(self.coords)

    def __len__(self):
        return len(self.coords)

    def __str__(self):
        return "(" + ", ".join(format_word(c) for c in self.coords) + ")"

    def nontrivial_coords(self) -> tuple[int, ...]:
        """1-based indices of non-trivial coordinates."""
        return tuple(i for i, c in enumerate(self.coords, 1) if c)

    @classmethod
    def identity(cls, graphs: Sequence[SimplicialGraph]) -> "TupleElement":
        return cls(tuple(TraceWord.identity(g) for g in graphs))

    def to_trace(self) -> TraceWord:
        """The same element as a trace word over the join of the coordinate graphs.

        Coordinate i's vertex v becomes ``v{i}``; for <x, y> coordinates this
        is exactly ``f2_power(d)``.
        """
        target = product_graph([c.graph for c in self.coords])
        letters = [(f"{v}{i}", s) for i, c in enumerate(self.coords, 1) for v, s in c.letters]
        return normalize(target, letters)

    @classmethod
    def from_trace(cls, x: TraceWord, graphs: Sequence[SimplicialGraph]) -> "TupleElement":
        coords = []
        for i, g in enumerate(graphs, 1):
            names = {f"{v}{i}": v for v in g.vertices}
            coords.append(normalize(g, [(names[v], s) for v, s in x.letters if v in names]))
        return cls(tuple(coords))


def product_graph(graphs: Sequence[SimplicialGraph]) -> SimplicialGraph:
    if all(g == F2 for g in graphs):
        return f2_power(len(graphs))
    verts = [f"{v}{i}" for i, g in enumerate(graphs, 1) for v in g.vertices]
    edges = [(f"{u}{i}", f"{v}{i}") for i, g in enumerate(graphs, 1) for u, v in g.edge_list()]
    for i, gi in enumerate(graphs, 1):
        for j, gj in enumerate(graphs, 1):
            if i < j:
                edges += [(f"{u}{i}", f"{v}{j}") for u in gi.vertices for v in gj.vertices]
    return SimplicialGraph(verts, edges)


@dataclass
class HdPackage:
    d: int
    witnesses: tuple[TraceWord, ...]
    phis: tuple[Homomorphism, ...]
    phi: Homomorphism
    generators: dict = field(default_factory=dict)   # name -> TupleElement

    @property
    def target(self) -> SimplicialGraph:
        return self.phi.target

    def coordinate_map(self, i: int) -> Homomorphism:
        _check_index(self, i)
        return self.phis[i - 1]

    def tuple_of(self, f) -> TupleElement:
        return TupleElement(tuple(p(f) for p in self.phis))


def _check_index(pkg: HdPackage, i: int) -> None:
    if not 1 <= i <= pkg.d:
        raise PreconditionError(f"coordinate index {i} outside 1..{pkg.d}")


def default_witnesses(d: int) -> list[TraceWord]:
    """w_i = x^-i y x^i for i = 1..d."""
    if d < 1:
        raise PreconditionError("d must be positive")
    ws = [normalize(F2, f"x^-{i} y x^{i}") for i in range(1, d + 1)]
    if not is_free_basis(F2, ws):
        raise VerificationError("default witnesses failed the free basis check")
    return ws


def build_hd(d: int, witnesses: Sequence | None = None) -> HdPackage:
    if d < 1:
        raise PreconditionError("d must be positive")
    if witnesses is None:
        ws = default_witnesses(d)
    else:
        ws = [w if isinstance(w, TraceWord) else normalize(F2, w) for w in witnesses]
        if len(ws) != d:
            raise PreconditionError(f"expected {d} witnesses, got {len(ws)}")
        if any(w.graph != F2 for w in ws):
            raise PreconditionError("witnesses must be words in x, y")
        if not is_free_basis(F2, ws):
            rank = stallings_build(F2, ws).rank()
            raise PreconditionError(f"witnesses do not form a free basis: folded rank {rank} < {d}")
    phis = tuple(
        Homomorphism(F3.vertices, {"x": "x", "y": "y", "z": w.letters}, F2) for w in ws
    )
    gens = {
        v: TupleElement(tuple(p.images[v] for p in phis)) for v in F3.vertices
    }
    target = f2_power(d)
    phi = Homomorphism(F3.vertices, {v: gens[v].to_trace() for v in F3.vertices}, target)
    return HdPackage(d, tuple(ws), phis, phi, gens)


def membership_Li(pkg: HdPackage, f, i: int) -> bool:
    """Whether ``f`` lies in L_i, the normal closure of z^-1 w_i."""
    return not pkg.coordinate_map(i)(f)


def k_witness(pkg: HdPackage, i: int) -> TraceWord:
    """An element of K_i minus L_i, where K_i is the intersection of the L_j, j != i."""
    _check_index(pkg, i)
    d = pkg.d
    if d == 1:
        c = normalize(F3, "x")
    else:
        z = normalize(F3, "z")
        rels = [(~z) * normalize(F3, pkg.witnesses[j - 1].letters) for j in range(1, d + 1) if j != i]
        c = long_commutator(rels)
    for j in range(1, d + 1):
        image = pkg.phis[j - 1](c)
        if (j == i) == (not image):
            raise VerificationError(f"k_witness({i}) has wrong image under phi_{j}: {image}")
    return c


def zd_witness(pkg: HdPackage) -> list[TupleElement]:
    """phi(c_1), ..., phi(c_d): pairwise commuting, each supported on one coordinate."""
    out = []
    for i in range(1, pkg.d + 1):
        t = pkg.tuple_of(k_witness(pkg, i))
        if t.nontrivial_coords() != (i,):
            raise VerificationError(f"phi(c_{i}) has support {t.nontrivial_coords()}")
        out.append(t)
    return out


def zd_product(elems: Sequence[TupleElement], exponents: Sequence[int]) -> TupleElement:
    out = TupleElement.identity([c.graph for c in elems[0].coords])
    for e, m in zip(elems, exponents):
        if m:
            out = out * (e ** m)
    return out


def evaluate_on_generators(pkg: HdPackage, w) -> TupleElement:
    """Evaluate an F-word as a product of the tuples phi(x), phi(y), phi(z)."""
    w = w if isinstance(w, TraceWord) else normalize(F3, w)
    out = TupleElement.identity([F2] * pkg.d)
    for v, s in w.letters:
        g = pkg.generators[v]
        out = out * (g if s > 0 else ~g)
    return out


@dataclass(frozen=True)
class NotVspCertificate:
    i: int
    j: int
    presentation: Presentation
    certificate: tuple[int, ...]
    free_rank: int
    cited: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "presentation": self.presentation.to_text(),
            "certificate": list(self.certificate),
            "free_rank": self.free_rank,
            "cited": list(self.cited),
        }


def not_vsp_certificate(pkg: HdPackage, i: int, j: int) -> NotVspCertificate:
    """Certificate that H_d/(N_i N_j), presented as <x,y,z | z^-1 w_i, z^-1 w_j>, maps onto Z."""
    _check_index(pkg, i)
    _check_index(pkg, j)
    if not i < j:
        raise PreconditionError(f"need i < j, got ({i}, {j})")
    z = normalize(F3, "z")
    rels = [(~z) * normalize(F3, pkg.witnesses[k - 1].letters) for k in (i, j)]
    pres = Presentation(F3.vertices, tuple(rels))
    cert = infinite_quotient_certificate(pres)
    if cert is None:
        raise VerificationError(f"no surjection onto Z found for the pair ({i}, {j})")
    inv = abelianization_snf(pres)
    cited = (
        "F/(L_i L_j) is infinite, so H_d is not virtually surjective on pairs",
        "finitely presented subdirect products of free groups meeting every factor are VSP "
        "(Bridson-Miller), hence H_d is not finitely presented",
    )
    return NotVspCertificate(i, j, pres, cert, inv.free_rank, cited)


# -- pushing kernels forward -------------------------------------------------------

def _exponent_vector(x: TraceWord) -> list[int]:
    v = [0] * len(x.graph.vertices)
    for c in x.codes:
        v[c >> 1] += -1 if c & 1 else 1
    return v


def in_row_lattice(rows: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Whether ``v`` is an integer combination of ``rows``."""
    basis = hermite_rows(rows)
    v = list(v)
    for row in basis:
        col = next(k for k, a in enumerate(row) if a)
        if v[col] % row[col]:
            return False
        q = v[col] // row[col]
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


@dataclass
class PushforwardResult:
    m_generators: list[TraceWord]
    presentation: Presentation
    checks: list[dict]

    @property
    def passed(self) -> bool:
        return all(c["abelian_ok"] and c.get("quotient_ok", True) for c in self.checks)


def lemma33_pushforward(psi1: Homomorphism, psi2: Homomorphism, gens: Sequence[str] | None = None,
                        kernel_elements: Iterable = (),
                        quotient_solver: Callable[[TraceWord], bool] | None = None) -> PushforwardResult:
    """Normal generators psi1(x)^-1 psi2(x) of M and the check psi1(ker psi2) in M.

    ``kernel_elements`` are words over the domain generators (their letters
    are the factorization h = x_1 ... x_k).  Each must be killed by psi2; its
    psi1-image is tested in the abelianization of F/M and, if a
    ``quotient_solver`` deciding triviality in F/M is given, in F/M itself.
    """
    if psi1.domain != psi2.domain or psi1.target != psi2.target:
        raise PreconditionError("psi1 and psi2 must share domain and target")
    target = psi1.target
    if target.edges:
        raise PreconditionError("target must be a free group")
    for name, psi in (("psi1", psi1), ("psi2", psi2)):
        if not stallings_build(target, psi.images.values()).is_whole_group():
            raise PreconditionError(f"{name} is not surjective")
    gens = list(gens) if gens is not None else list(psi1.domain)
    m_gens = [(~psi1.images[x]) * psi2.images[x] for x in gens]
    pres = Presentation(target.vertices, tuple(m for m in m_gens if m))
    rows = [_exponent_vector(m) for m in m_gens]
    checks = []
    for h in kernel_elements:
        if psi2(h):
            raise PreconditionError(f"{h} is not in the kernel of psi2")
        image = psi1(h)
        entry = {
            "element": str(h),
            "image": format_word(image),
            "abelian_ok": in_row_lattice(rows, _exponent_vector(image)) if rows else not any(_exponent_vector(image)),
        }
        if quotient_solver is not None:
            entry["quotient_ok"] = bool(quotient_solver(image))
        checks.append(entry)
    return PushforwardResult(m_gens, pres, checks)


# -- dropping factors ------------------------------------------------------------

@dataclass
class DropResult:
    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    reduced_gens: list[TupleElement]
    witnesses: dict   # kept index -> generator word (str) or None for unknown


def _intersects_only(t: TupleElement, i: int) -> bool:
    return t.nontrivial_coords() == (i,)


def drop_trivial_factors(gens: Sequence[TupleElement], bound: int = 4, m: int | None = None,
                         names: Sequence[str] | None = None, candidates: Iterable = ()) -> DropResult:
    """Project away coordinates on which every generator is trivial.

    For each kept coordinate i, look for a word over the generators whose
    value is non-trivial only in coordinate i (a witness that H meets F_i):
    first among ``candidates`` (words over ``names``), then among all reduced
    words of length at most ``bound``.
    """
    gens = list(gens)
    if m is None:
        if not gens:
            raise PreconditionError("number of coordinates unknown for empty generator list")
        m = len(gens[0])
    if not gens:
        return DropResult((), tuple(range(1, m + 1)), [], {})
    names = list(names) if names is not None else [f"g{k}" for k in range(1, len(gens) + 1)]
    alphabet = free_group(names)
    kept = tuple(i for i in range(1, m + 1) if any(g.coords[i - 1] for g in gens))
    dropped = tuple(i for i in range(1, m + 1) if i not in kept)
    reduced = [TupleElement(tuple(g.coords[i - 1] for i in kept)) for g in gens]
    lookup = dict(zip(names, gens))

    def evaluate(word: TraceWord) -> TupleElement:
        out = TupleElement.identity([c.graph for c in gens[0].coords])
        for v, s in word.letters:
            out = out * (lookup[v] if s > 0 else ~lookup[v])
        return out

    witnesses: dict = {i: None for i in kept}
    for w in candidates:
        w = w if isinstance(w, TraceWord) else normalize(alphabet, w)
        w = normalize(alphabet, w.letters)
        t = evaluate(w)
        for i in kept:
            if witnesses[i] is None and _intersects_only(t, i):
                witnesses[i] = format_word(w)
    letters = [(v, s) for v in names for s in (1, -1)]
    frontier = [()]
    for _ in range(bound):
        if all(w is not None for w in witnesses.values()):
            break
        nxt = []
        for word in frontier:
            for v, s in letters:
                if word and word[-1] == (v, -s):
                    continue
                nxt.append(word + ((v, s),))
        for word in nxt:
            w = normalize(alphabet, word)
            t = evaluate(w)
            for i in kept:
                if witnesses[i] is None and _intersects_only(t, i):
                    witnesses[i] = format_word(w)
        frontier = nxt
    return DropResult(kept, dropped, reduced, witnesses)


def hd_report(pkg: HdPackage) -> dict:
    """JSON-ready description of an H_d package."""
    zd = zd_witness(pkg)
    certs = [
        not_vsp_certificate(pkg, i, j).to_dict()
        for i, j in product(range(1, pkg.d + 1), repeat=2) if i < j
    ]
    return {
        "d": pkg.d,
        "witnesses": [format_word(w) for w in pkg.witnesses],
        "generators": {v: format_word(pkg.phi.images[v]) for v in F3.vertices},
        "zd_witnesses": [format_word(t.to_trace()) for t in zd],
        "certificates": certs,
    }


def verify_hd(pkg: HdPackage, samples: int = 100, seed: int = 0) -> dict:
    """Run the H_d invariants; every check carries pass/fail and a witness on failure."""
    rng = random.Random(seed)
    d = pkg.d
    checks = {}
    rank = stallings_build(F2, pkg.witnesses).rank()
    checks["free_basis"] = {"passed": rank == d and is_free_basis(F2, pkg.witnesses), "folded_rank": rank}

    bad = []
    cs = [k_witness(pkg, i) for i in range(1, d + 1)]
    for i, c in enumerate(cs, 1):
        for j in range(1, d + 1):
            if (j == i) == (not pkg.phis[j - 1](c)):
                bad.append(f"phi_{j}(c_{i})")
    checks["k_witness_pattern"] = {"passed": not bad, "witnesses": bad}

    zd = [pkg.tuple_of(c) for c in cs]
    bad = [f"({i},{j})" for i in range(d) for j in range(i + 1, d)
           if (zd[i] * zd[j]).coords != (zd[j] * zd[i]).coords]
    checks["zd_commuting"] = {"passed": not bad, "witnesses": bad}

    bad = []
    for _ in range(samples):
        m = [0] * d
        while not any(m):
            m = [rng.randint(-3, 3) for _ in range(d)]
        if not zd_product(zd, m):
            bad.append(m)
    checks["zd_injective"] = {"passed": not bad, "checked": samples, "witnesses": bad[:5]}

    # H_d is 3-generated: each witness re-evaluates from phi(x), phi(y), phi(z)
    bad = [i for i, c in enumerate(cs, 1) if evaluate_on_generators(pkg, c).coords != zd[i - 1].coords]
    checks["three_generated"] = {"passed": not bad, "witnesses": bad}

    certs, bad = [], []
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            try:
                cert = not_vsp_certificate(pkg, i, j)
            except VerificationError as exc:
                bad.append(str(exc))
                continue
            if cert.free_rank < 1:
                bad.append(f"({i},{j}) free rank {cert.free_rank}")
            certs.append(cert.to_dict())
    checks["not_vsp"] = {"passed": not bad, "pairs": len(certs), "witnesses": bad}
    cited = list(certs[0]["cited"]) if certs else []
    return {"d": d, "seed": seed, "checks": checks, "cited": cited}
