"""Special HNN-extensions <F, t | t h t^-1 = h, h in N> and their RAAG embedding.

N is given by a membership oracle on F-words.  For G_d, N = ker(phi) is not
finitely generated, so an oracle is the only faithful description.

Elements of C = A x (B * <t>) are pairs: an A-coordinate trace word and a
reduced free-product word over the factors ``"B"`` and ``"t"``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import central_para as cp
from .errors import InputError, PreconditionError, VerificationError, WorkbenchError
from .free_tools import FreeProductWord, free_group, free_product_reduce
from .graph_core import SimplicialGraph, clique_number, discrete, disjoint_union, join, link
from .subdirect_lab import F3, build_hd, commutator, k_witness, long_commutator
from .trace_words import (
    Homomorphism,
    Letter,
    TraceWord,
    format_word,
    normalize,
    parse_tokens,
    retract,
)


class OracleError(WorkbenchError):
    """The N-membership oracle raised on some word."""


@dataclass
class SpecialHnn:
    F: SimplicialGraph               # free group on the F generators
    in_N: Callable[[TraceWord], bool]
    t: str = "t"

    def __post_init__(self):
        if self.t in self.F.index:
            raise InputError(f"stable letter {self.t!r} clashes with a generator of F")

    def query(self, f: TraceWord) -> bool:
        if not f:
            return True
        try:
            return bool(self.in_N(f))
        except Exception as exc:
            raise OracleError(f"N-oracle failed on {format_word(f)}: {exc}") from exc

    def letters(self, w) -> list[Letter]:
        if isinstance(w, str):
            w = parse_tokens(w)
        out = []
        for item in w:
            letter = Letter(item) if isinstance(item, str) else Letter(*item)
            if letter.vertex != self.t and letter.vertex not in self.F.index:
                raise InputError(f"unknown letter {letter.vertex!r}")
            out.append(letter)
        return out


@dataclass(frozen=True)
class HnnWord:
    """f_0 t^k_1 f_1 ... t^k_n f_n."""

    fs: tuple[TraceWord, ...]
    ks: tuple[int, ...]
    t: str = "t"

    @property
    def n(self) -> int:
        return len(self.ks)

    def letters(self) -> list[Letter]:
        out = list(self.fs[0].letters)
        for k, f in zip(self.ks, self.fs[1:]):
            out += [Letter(self.t, 1 if k > 0 else -1)] * abs(k)
            out += list(f.letters)
        return out

    def __str__(self):
        parts = [format_word(self.fs[0])] if self.fs[0] else []
        for k, f in zip(self.ks, self.fs[1:]):
            parts.append(self.t if k == 1 else f"{self.t}^{k}")
            if f:
                parts.append(format_word(f))
        return " ".join(parts) or "ε"

    def is_reduced(self, h: SpecialHnn) -> bool:
        return all(not h.query(f) for f in self.fs[1:-1])


def britton_reduce(h: SpecialHnn, w) -> HnnWord:
    """Pinch t^k f t^k' to f t^(k+k') whenever f is in N, until none is left."""
    F = h.F
    stack: list = [TraceWord.identity(F)]   # alternating f, k, f, k, ..., f

    def push_t(k: int) -> None:
        top = stack[-1]
        if len(stack) >= 3 and h.query(top):
            stack.pop()
            prev_k = stack.pop()
            stack[-1] = stack[-1] * top
            total = prev_k + k
            if total:
                stack.append(total)
                stack.append(TraceWord.identity(F))
        else:
            stack.append(k)
            stack.append(TraceWord.identity(F))

    for vertex, sign in h.letters(w):
        if vertex == h.t:
            push_t(sign)
        else:
            stack[-1] = stack[-1] * TraceWord.generator(F, vertex, sign)
    # consecutive t letters arrive one at a time; merge identical-neighbour powers
    fs, ks = [stack[0]], []
    for k, f in zip(stack[1::2], stack[2::2]):
        if ks and not fs[-1]:
            fs.pop()
            ks[-1] += k
            if ks[-1] == 0:
                ks.pop()
                fs[-1] = fs[-1] * f
                continue
            fs.append(f)
        else:
            ks.append(k)
            fs.append(f)
    return HnnWord(tuple(fs), tuple(ks), h.t)


def hnn_is_trivial(h: SpecialHnn, w) -> bool:
    r = britton_reduce(h, w)
    return r.n == 0 and not r.fs[0]


# -- the embedding into C = A x (B * <t>) ---------------------------------------------

@dataclass(frozen=True)
class CElement:
    a_part: TraceWord
    bt_part: FreeProductWord

    def is_trivial(self) -> bool:
        return not self.a_part and not self.bt_part


@dataclass
class EmbeddingPackage:
    f_graph: SimplicialGraph          # free group on the generators of F
    a_graph: SimplicialGraph
    b_graph: SimplicialGraph
    inclusion: Homomorphism           # F -> A
    phi: Homomorphism                 # F -> B, kernel N
    t: str = "t"
    n_seeds: list = field(default_factory=list)   # F-words known to lie in N
    c_graph: SimplicialGraph = field(init=False)
    a_names: dict = field(init=False)
    b_names: dict = field(init=False)
    t_name: str = field(init=False)

    def __post_init__(self):
        if self.phi is None:
            raise PreconditionError("phi is required")
        if self.inclusion.domain != self.f_graph.vertices or self.phi.domain != self.f_graph.vertices:
            raise PreconditionError("inclusion and phi must be defined on the generators of F")
        if self.inclusion.target != self.a_graph or self.phi.target != self.b_graph:
            raise PreconditionError("inclusion must map into A and phi into B")
        if not any(self.phi.images.values()):
            raise PreconditionError("phi is trivial: N = F and F/N is the trivial group")
        bt, b_map, t_map = disjoint_union(self.b_graph, discrete([self.t]), return_maps=True)
        c, a_map, bt_map = join(self.a_graph, bt, return_maps=True)
        self.c_graph = c
        self.a_names = a_map
        self.b_names = {v: bt_map[b_map[v]] for v in self.b_graph.vertices}
        self.t_name = bt_map[t_map[self.t]]
        self._t_graph = discrete([self.t])
        images = {}
        for v in self.f_graph.vertices:
            letters = [(a_map[u], s) for u, s in self.inclusion.images[v].letters]
            letters += [(self.b_names[u], s) for u, s in self.phi.images[v].letters]
            images[v] = letters
        images[self.t] = [(self.t_name, 1)]
        self.psi_flat_hom = Homomorphism(list(self.f_graph.vertices) + [self.t], images, c)

    def hnn(self) -> SpecialHnn:
        return SpecialHnn(self.f_graph, self.in_N, self.t)

    def in_N(self, f: TraceWord) -> bool:
        return not self.phi(f)

    def a_vertices(self) -> frozenset:
        return frozenset(self.a_names.values())

    def bt_vertices(self) -> frozenset:
        return frozenset(self.b_names.values()) | {self.t_name}


def psi_embed(pkg: EmbeddingPackage, w) -> CElement:
    """psi(f) = (f, phi(f)), psi(t) = t, evaluated coordinate-wise."""
    h = pkg.hnn()
    a_codes: list = []
    syllables = []
    for vertex, sign in h.letters(w):
        if vertex == pkg.t:
            syllables.append(("t", TraceWord.generator(pkg._t_graph, pkg.t, sign)))
        else:
            img = pkg.inclusion.images[vertex]
            a_codes.extend(img.codes if sign > 0 else (~img).codes)
            b = pkg.phi.images[vertex]
            syllables.append(("B", b if sign > 0 else ~b))
    return CElement(TraceWord(pkg.a_graph, a_codes), free_product_reduce(syllables))


def psi_flat(pkg: EmbeddingPackage, w) -> TraceWord:
    """psi(w) as a single trace word over the graph of C."""
    return pkg.psi_flat_hom(pkg.hnn().letters(w))


def c_element_to_flat(pkg: EmbeddingPackage, x: CElement) -> TraceWord:
    letters = [(pkg.a_names[v], s) for v, s in x.a_part.letters]
    for factor, value in x.bt_part.syllables:
        names = pkg.b_names if factor == "B" else {pkg.t: pkg.t_name}
        letters += [(names[v], s) for v, s in value.letters]
    return normalize(pkg.c_graph, letters)


# -- G_d ------------------------------------------------------------------------

CITED_GD = (
    "cd(G_d) = 2: G_d is not free and acts on a tree with free vertex stabilizers",
    "any RAAG containing G_d contains H_d, so its cohomological dimension is at least d",
)


def n_seed_words(d: int) -> list[TraceWord]:
    """Words of F(x, y, z) known to lie in N = ker(phi) for H_d."""
    pkg = build_hd(d)
    z = normalize(F3, "z")
    rels = [(~z) * normalize(F3, w.letters) for w in pkg.witnesses]
    seeds = [long_commutator(rels)]
    cs = [k_witness(pkg, i) for i in range(1, d + 1)] if d > 1 else []
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            seeds.append(commutator(cs[i], cs[j]))
    return seeds


def build_gd(d: int) -> tuple[EmbeddingPackage, dict]:
    """G_d = special HNN-extension of F(x,y,z) over N = ker(phi), embedded in C."""
    if d < 1:
        raise PreconditionError("d must be positive")
    hd = build_hd(d)
    a = free_group(F3.vertices)
    inclusion = Homomorphism(F3.vertices, {v: v for v in F3.vertices}, a)
    pkg = EmbeddingPackage(F3, a, hd.target, inclusion, hd.phi, "t", n_seed_words(d))
    cn = clique_number(pkg.c_graph)
    report = {
        "d": d,
        "computed": {
            "generator_count": len(F3.vertices) + 1,
            "generators": list(F3.vertices) + [pkg.t],
            "c_vertices": len(pkg.c_graph.vertices),
            "clique_number_C": cn,
            "zd_witness_images": [format_word(psi_flat(pkg, k_witness(hd, i).letters)) for i in range(1, d + 1)],
        },
        "cited": list(CITED_GD),
    }
    return pkg, report


# -- package files ----------------------------------------------------------------

def parse_package(text: str) -> EmbeddingPackage:
    """Read sections [A], [B], [F] (optional), [phi], [t]."""
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise InputError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
        elif current is None:
            raise InputError(f"line {lineno}: content before the first section")
        else:
            sections[current].append(line)
    for name in ("A", "B", "phi"):
        if name not in sections:
            raise InputError(f"missing section [{name}]")
    a = SimplicialGraph.from_text("\n".join(sections["A"]))
    b = SimplicialGraph.from_text("\n".join(sections["B"]))
    t = sections.get("t", ["t"])
    if len(t) != 1 or len(t[0].split()) != 1:
        raise InputError("[t] must hold a single name")
    t = t[0]

    def mapping(lines):
        out = {}
        for line in lines:
            key, sep, rest = line.partition(":")
            if not sep:
                raise InputError(f"expected 'generator: word', got {line!r}")
            out[key.strip()] = rest.strip()
        return out

    phi_images = mapping(sections["phi"])
    if "F" in sections:
        f_images = mapping(sections["F"])
    else:
        f_images = {v: v for v in a.vertices}
    gens = list(f_images)
    if sorted(gens) != sorted(phi_images):
        raise InputError("[F] and [phi] must name the same generators")
    f_graph = free_group(gens)
    inclusion = Homomorphism(gens, f_images, a)
    phi = Homomorphism(gens, phi_images, b)
    return EmbeddingPackage(f_graph, a, b, inclusion, phi, t)


def load_package(path) -> EmbeddingPackage:
    return parse_package(Path(path).read_text())


def package_to_text(pkg: EmbeddingPackage) -> str:
    lines = ["[A]", pkg.a_graph.to_text().rstrip(), "[B]", pkg.b_graph.to_text().rstrip(), "[F]"]
    lines += [f"{v}: {format_word(pkg.inclusion.images[v])}" for v in pkg.f_graph.vertices]
    lines += ["[phi]"]
    lines += [f"{v}: {format_word(pkg.phi.images[v])}" for v in pkg.f_graph.vertices]
    lines += ["[t]", pkg.t]
    return "\n".join(lines) + "\n"


# -- sampling ---------------------------------------------------------------------

def random_f_word(pkg: EmbeddingPackage, rng: random.Random, max_len: int) -> TraceWord:
    letters = [(v, s) for v in pkg.f_graph.vertices for s in (1, -1)]
    n = rng.randint(0, max_len)
    return normalize(pkg.f_graph, [rng.choice(letters) for _ in range(n)])


def n_samples(pkg: EmbeddingPackage, rng: random.Random, count: int, conj_len: int = 3) -> list[TraceWord]:
    """Seeds of N and random conjugates of them (or of their inverses)."""
    seeds = [s for s in pkg.n_seeds if s]
    if not seeds:
        return []
    out = list(seeds)
    while len(out) < count:
        s = rng.choice(seeds)
        if rng.random() < 0.5:
            s = ~s
        out.append(s.conjugate(random_f_word(pkg, rng, conj_len)))
    return out


def random_g_word(pkg: EmbeddingPackage, rng: random.Random, max_len: int = 8,
                  seeds: Sequence[TraceWord] = ()) -> list[Letter]:
    """Random word in F-letters and t, often built around N-elements so pinches occur."""
    t_letters = [Letter(pkg.t, 1), Letter(pkg.t, -1)]
    f_letters = [Letter(v, s) for v in pkg.f_graph.vertices for s in (1, -1)]
    out: list[Letter] = []
    pieces = rng.randint(1, 4)
    for _ in range(pieces):
        kind = rng.random()
        if seeds and kind < 0.4:
            n = rng.choice(seeds)
            u = random_f_word(pkg, rng, 2)
            k = rng.choice([1, -1, 2])
            tk = [t_letters[0] if k > 0 else t_letters[1]] * abs(k)
            inv = [Letter(l.vertex, -l.sign) for l in tk]
            body = list(n.letters)
            if rng.random() < 0.5:
                # t^k n t^-k n^-1 is a relator: trivial
                body = tk + body + inv + [Letter(v, -s) for v, s in reversed(n.letters)]
            else:
                body = tk + body + inv
            out += list(u.letters) + body + [Letter(v, -s) for v, s in reversed(u.letters)]
        elif kind < 0.55 and out:
            out += [Letter(v, -s) for v, s in reversed(out)][: rng.randint(1, len(out))]
        else:
            n = rng.randint(1, max_len)
            out += [rng.choice(f_letters + t_letters) for _ in range(n)]
    return out


# -- verification ------------------------------------------------------------------

def _clause(passed: bool, **info) -> dict:
    return {"passed": bool(passed), **info}


def verify_prop52(pkg: EmbeddingPackage, samples: int = 200, max_len: int = 8, seed: int = 0,
                  n_count: int = 24) -> dict:
    """Machine-check the direct-factor and quotient-embedding clauses on samples."""
    if samples < 1 or max_len < 1 or n_count < 1:
        raise PreconditionError("sampling parameters must be positive")
    rng = random.Random(seed)
    c = pkg.c_graph
    report: dict = {"seed": seed, "samples": samples, "clauses": {}, "sample_limited": False}
    clauses = report["clauses"]

    gen_images = [psi_flat(pkg, [(v, 1)]) for v in pkg.f_graph.vertices] + [psi_flat(pkg, [(pkg.t, 1)])]
    p_g = cp.pc_set(gen_images, c)
    whole = p_g.base == frozenset(c.vertices) and not p_g.conj

    def image(letters) -> TraceWord:
        img = psi_flat(pkg, letters)
        if whole:
            return img
        # psi(G) lies in conj A_base conj^-1: pull it back onto the full subgraph
        return retract(p_g.base, img.conjugate(~p_g.conj), to_subgraph=True)

    if not whole:
        report["restricted_to"] = str(p_g)
        c = c.full_subgraph(p_g.base)
    clauses["a"] = _clause(True, pc_G=str(p_g), restricted=not whole)

    ns = n_samples(pkg, rng, n_count)
    if not ns:
        report["sample_limited"] = True
        clauses["b"] = _clause(False, reason="no elements of N available to sample")
        return report
    bad = [format_word(n) for n in ns if not pkg.in_N(n)]
    if bad:
        raise VerificationError(f"N samples rejected by the oracle: {bad[:3]}")
    n_images = [image(n.letters) for n in ns]
    p_n = cp.pc_set(n_images, c)
    if p_n.conj:
        clauses["b"] = _clause(False, pc_N=str(p_n), reason="pc(N) is not a full subgroup")
        return report
    x_set = p_n.base
    ok, y_set = cp.is_direct_factor(p_n)
    report["sample_basis"] = [format_word(n) for n in ns[: len(pkg.n_seeds)]]
    report["sample_limited"] = True  # minimality of pc(N) rests on the sample
    clauses["b"] = _clause(
        ok,
        X=c.sorted_vertices(x_set),
        Y=c.sorted_vertices(y_set) if ok else None,
        link_X=c.sorted_vertices(link(c, x_set)),
    )
    if not ok:
        return report

    fs = [random_f_word(pkg, rng, max_len) for _ in range(samples)] + ns
    a_x = cp.Parabolic(c, None, x_set)
    fiber_bad, kernel_bad = [], []
    for f in fs:
        img = image(f.letters)
        in_n = pkg.in_N(f)
        if cp.member(img, a_x) != in_n:
            fiber_bad.append(format_word(f))
        if (not retract(y_set, img)) != in_n:
            kernel_bad.append(format_word(f))
    in_count = sum(1 for f in fs if pkg.in_N(f))
    clauses["c"] = _clause(not fiber_bad, checked=len(fs), in_N=in_count, witnesses=fiber_bad[:5])
    clauses["d"] = _clause(not kernel_bad, checked=len(fs), in_N=in_count, witnesses=kernel_bad[:5])
    return report


def prop52_passed(report: dict) -> bool:
    return all(c["passed"] for c in report["clauses"].values()) and len(report["clauses"]) == 4


def cor53_check(pkg: EmbeddingPackage, samples: int = 200, seed: int = 0) -> dict:
    """Both directions of the equivalence F, F/N in A  <=>  G in A, on samples."""
    rng = random.Random(seed)
    h = pkg.hnn()
    seeds = n_samples(pkg, rng, 8)
    agree_bad = []
    trivial_count = 0
    for _ in range(samples):
        w = random_g_word(pkg, rng, seeds=seeds)
        lhs = hnn_is_trivial(h, w)
        rhs = psi_embed(pkg, w).is_trivial()
        trivial_count += lhs
        if lhs != rhs:
            agree_bad.append(" ".join(str(l) for l in w))
    f_bad = []
    for _ in range(samples):
        f = random_f_word(pkg, rng, 8)
        if bool(f) != (not psi_embed(pkg, f.letters).is_trivial()):
            f_bad.append(format_word(f))
    prop = verify_prop52(pkg, samples=samples, seed=seed)
    return {
        "seed": seed,
        "a_implies_b": {
            "container_graph": pkg.c_graph.to_text(),
            "clique_number": clique_number(pkg.c_graph),
            "psi_generators": {v: format_word(psi_flat(pkg, [(v, 1)])) for v in list(pkg.f_graph.vertices) + [pkg.t]},
            "injectivity_spot_check": _clause(not agree_bad, checked=samples, trivial=trivial_count,
                                              witnesses=agree_bad[:5]),
        },
        "b_implies_a": {
            "F_embeds": _clause(not f_bad, checked=samples, witnesses=f_bad[:5]),
            "F_mod_N_embeds": prop["clauses"].get("d", _clause(False, reason="clause (d) not reached")),
        },
        "prop52": prop,
    }
