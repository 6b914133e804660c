"""Acceptance gate: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import (  # noqa: E402
    elements_up_to,
    key_of,
    random_word,
    shortlex_table,
    single_letter_shortens,
    small_graphs,
)
from raag_workbench import central_para as cp  # noqa: E402
from raag_workbench import gs_bounds as gs  # noqa: E402
from raag_workbench import hnn_embed as he  # noqa: E402
from raag_workbench import subdirect_lab as sd  # noqa: E402
from raag_workbench.free_tools import check_certificate, stallings_rank  # noqa: E402
from raag_workbench.graph_core import clique_number, link  # noqa: E402
from raag_workbench.trace_words import Letter, TraceWord, cyclic_reduce  # noqa: E402

GRAPHS = list(small_graphs(4))


def _line(n: int, passed: bool, detail: str) -> str:
    return f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}"


# -- 1: normal forms against the rewrite-closure oracle ----------------------------------

def criterion_1():
    mismatches, words = [], 0
    for g in GRAPHS:
        k = 2 * len(g.vertices)
        best, scale = shortlex_table(g, 6)
        for length in range(7):
            table = best[length]
            for idx, w in enumerate(itertools.product(range(k), repeat=length)):
                words += 1
                if key_of(TraceWord(g, w).codes, k, scale) != table[idx]:
                    mismatches.append((g.to_text(), w))
    return not mismatches, f"{len(GRAPHS)} graphs, {words} raw words, {len(mismatches)} mismatches"


# -- 2: cyclic reduction -----------------------------------------------------------------

def criterion_2():
    rng = random.Random(2)
    bad_identity = 0
    for _ in range(10_000):
        g = rng.choice(GRAPHS)
        x = TraceWord(g, random_word(rng, g, 16))
        u, t = cyclic_reduce(x)
        if len(x) != len(t) + 2 * len(u) or u * t * ~u != x or single_letter_shortens(t):
            bad_identity += 1
    # conjugator enumeration: no conjugate by a short y is shorter than t.
    # exhaustive over elements of length <= 4 on graphs with <= 3 vertices,
    # sampled up to length 8 on every graph with <= 4 vertices
    bad_min, checked = 0, 0
    for g in GRAPHS:
        balls = {r: elements_up_to(g, r) for r in (2, 4 if len(g.vertices) < 4 else 3)}
        radius = max(balls)
        xs = [x for x in elements_up_to(g, 4) if x] if len(g.vertices) <= 3 else []
        xs += [TraceWord(g, random_word(rng, g, 8, 5)) for _ in range(30)]
        for x in xs:
            _, t = cyclic_reduce(x)
            ball = balls[2] if len(x) <= 4 else balls[radius]
            checked += 1
            bad_min += min(len(x.conjugate(y)) for y in ball) != len(t)
    ok = not bad_identity and not bad_min
    return ok, (f"10000 identity checks ({bad_identity} bad); "
                f"{checked} conjugator-enumeration minima ({bad_min} bad)")


# -- 3: centralizers -----------------------------------------------------------------------

def _generated(gens, targets, cap):
    """Which targets a length-capped breadth-first search over <gens> reaches."""
    g = gens[0].graph
    letters = list(gens) + [~s for s in gens]
    seen = {TraceWord.identity(g)}
    frontier = list(seen)
    want = set(targets) - seen
    while frontier and want:
        nxt = []
        for x in frontier:
            for s in letters:
                y = x * s
                if len(y) <= cap and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        want -= set(nxt)
        frontier = nxt
    return set(targets) - want


def criterion_3():
    rng = random.Random(3)
    unsound = incomplete = power_bad = cases = 0
    for g in GRAPHS:
        ball = elements_up_to(g, 3 if len(g.vertices) == 4 else 4)
        for _ in range(10):
            x = TraceWord(g, random_word(rng, g, 4, 1))
            if not x:
                continue
            cases += 1
            gens = cp.centralizer_generators(x)
            unsound += sum(1 for s in gens if not s.commutes(x))
            u, _ = cyclic_reduce(x)
            commuting = [y for y in ball if y.commutes(x)]
            # conjugate back so the cap acts on the cyclically reduced core
            core_gens = [s.conjugate(~u) for s in gens]
            targets = {y.conjugate(~u) for y in commuting}
            cap = max(len(y) for y in targets) + 2
            incomplete += len(targets) - len(_generated(core_gens, targets, cap))
            for m in (2, 3):
                if set(cp.centralizer_generators(x ** m)) != set(gens):
                    power_bad += 1
    ok = not (unsound or incomplete or power_bad)
    return ok, (f"{cases} elements: {unsound} non-commuting generators, "
                f"{incomplete} commuting elements outside the generated subgroup, "
                f"{power_bad} power mismatches")


# -- 4: H_d -------------------------------------------------------------------------------

def criterion_4():
    rng = random.Random(4)
    failures = []
    for d in range(1, 6):
        pkg = sd.build_hd(d)
        for i in range(1, d + 1):
            c = sd.k_witness(pkg, i)
            if any(bool(pkg.phis[j - 1](c)) != (i == j) for j in range(1, d + 1)):
                failures.append(f"d={d} k_witness {i}")
        zd = sd.zd_witness(pkg)
        if any(not a.to_trace().commutes(b.to_trace()) for a in zd for b in zd):
            failures.append(f"d={d} commuting")
        for _ in range(100):
            m = [0] * d
            while not any(m):
                m = [rng.randint(-4, 4) for _ in range(d)]
            if not sd.zd_product(zd, m):
                failures.append(f"d={d} exponents {m}")
        if stallings_rank(sd.F2, sd.default_witnesses(d)) != d:
            failures.append(f"d={d} rank")
    return not failures, f"d=1..5, {len(failures)} failures {failures[:3]}"


# -- 5: non-VSP certificates ------------------------------------------------------------

def criterion_5():
    failures, pairs = [], 0
    cited = set()
    for d in range(2, 6):
        pkg = sd.build_hd(d)
        for i, j in itertools.combinations(range(1, d + 1), 2):
            pairs += 1
            cert = sd.not_vsp_certificate(pkg, i, j)
            if cert.free_rank < 1 or not check_certificate(cert.presentation, cert.certificate):
                failures.append((d, i, j))
            cited.update(cert.cited)
    records = any("not finitely presented" in c for c in cited)
    ok = not failures and records
    return ok, f"{pairs} pairs, {len(failures)} failures, cited consequence recorded: {records}"


# -- 6: bounds ---------------------------------------------------------------------------

def criterion_6():
    failures = []
    if (gs.default_r(1), gs.default_r(2)) != (4, 6):
        failures.append("default_r")
    if gs.gamma(1).exponent != 14 or gs.gamma(1) != gs.BigCount.power_of_two(14):
        failures.append("gamma(1)")
    if gs.gamma(2) != gs.BigCount.power_of_two(124):
        failures.append("gamma(2)")
    for n in range(1, 51):
        env = 18 * n ** 3
        if not gs.delta(n) < gs.BigCount.power_of_two(env):
            failures.append(f"delta({n})")
        if not gs.gamma(n) <= gs.BigCount.power_of_two(env - n):
            failures.append(f"gamma({n})")
    for n in range(1, 10_001):
        r = gs.default_r(n)
        if not (n * Fraction(2, 3) ** r < Fraction(1, 3) and 2 ** r <= 18 * n * n):
            failures.append(f"r({n})")
    if gs.gs_value(1, Fraction(2, 3), 4) != Fraction(-11, 81):
        failures.append("gs value")
    return not failures, f"{len(failures)} failures {failures[:3]}"


# -- 7: exact Jennings dims ------------------------------------------------------------------

def criterion_7():
    dims = gs.jz_profile(3, "exact").dims
    ok = dims[:2] == (2, 3)
    worse = [n for n in range(1, 7) if not gs.gamma(n, "exact") <= gs.gamma(n, "bound")
             or not gs.delta(n, "exact") <= gs.delta(n, "bound")]
    return ok and not worse, f"b_1, b_2 = {dims[:2]}; exact above bound for n in {worse}"


# -- 8: optimizer --------------------------------------------------------------------------

def criterion_8():
    rows = []
    ok = True
    for n in (1, 10, 50):
        opt = gs.optimize_tau(n)
        good = (opt.feasible and opt.exponent <= opt.default_exponent
                and gs.gs_inequality_holds(n, opt.tau, opt.r))
        ok &= good
        rows.append(f"n={n}: tau={opt.tau} r={opt.r} log2={opt.exponent}<={opt.default_exponent}")
    return ok, "; ".join(rows)


# -- 9: HNN ------------------------------------------------------------------------------------

def criterion_9():
    failures = []
    for d in range(1, 4):
        rng = random.Random(90 + d)
        pkg, _ = he.build_gd(d)
        h = pkg.hnn()
        seeds = he.n_samples(pkg, rng, 8)
        for _ in range(500):
            w = he.random_g_word(pkg, rng, seeds=seeds)
            r = he.britton_reduce(h, w)
            if he.britton_reduce(h, r.letters()) != r or not r.is_reduced(h):
                failures.append(f"d={d} idempotence")
            if he.hnn_is_trivial(h, w) != he.psi_embed(pkg, w).is_trivial():
                failures.append(f"d={d} triviality")
        outside = 0
        t, t_inv = Letter(pkg.t, 1), Letter(pkg.t, -1)
        while outside < 100:
            f = he.random_f_word(pkg, rng, 8)
            if pkg.in_N(f):
                continue
            outside += 1
            fl, fi = list(f.letters), list((~f).letters)
            if he.hnn_is_trivial(h, [t_inv] + fi + [t] + fl):
                failures.append(f"d={d} [t, f] = 1")
    return not failures, f"d=1..3, 1500 words, 300 commutators, {len(failures)} failures {failures[:3]}"


# -- 10: direct factor and quotient embedding --------------------------------------------

def criterion_10():
    failures = []
    for d in range(1, 4):
        pkg, _ = he.build_gd(d)
        rep = he.verify_prop52(pkg, samples=200, seed=100 + d)
        cl = rep["clauses"]
        if not he.prop52_passed(rep):
            failures.append(f"d={d} clauses")
            continue
        c = pkg.c_graph
        x = frozenset(cl["b"]["X"])
        y = frozenset(cl["b"]["Y"])
        if x != pkg.a_vertices():
            failures.append(f"d={d} X")
        if x | y != frozenset(c.vertices) or x & y or y != link(c, x):
            failures.append(f"d={d} V split")
        if cl["c"]["checked"] < 200:
            failures.append(f"d={d} sample count")
    cliques = {d: clique_number(he.build_gd(d)[0].c_graph) for d in range(1, 7)}
    failures += [f"clique d={d}" for d, k in cliques.items() if k != d + 1]
    return not failures, f"d=1..3 clauses a-d, cliques {cliques}, {len(failures)} failures {failures[:3]}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    passed, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    results = []
    for n, crit in enumerate(CRITERIA, 1):
        passed, detail = crit()
        results.append(passed)
        print(_line(n, passed, detail), flush=True)
    sys.exit(0 if all(results) else 1)
