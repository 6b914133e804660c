"""
Embedding G_d into a right-angled Artin group
=============================================

G_d is the special HNN-extension of F(x, y, z) in which t commutes with
the kernel N of the map onto H_d. It embeds in C = A x (B * <t>), whose
clique number is d + 1.
"""

import random

from raag_workbench import hnn_embed as he
from raag_workbench.graph_core import clique_number
from raag_workbench.trace_words import format_word

d = 2
pkg, report = he.build_gd(d)
print("container:", pkg.c_graph.to_text().strip().replace("\n", "; "))
print("clique number:", clique_number(pkg.c_graph))

# generator images
for v in list(pkg.f_graph.vertices) + [pkg.t]:
    print(f"psi({v}) = {format_word(he.psi_flat(pkg, [(v, 1)]))}")

h = pkg.hnn()
seed = he.n_seed_words(d)[0]
print("N-seed:", format_word(seed))

# t commutes with N but not with z
w = f"t {format_word(seed)} t^-1 {format_word(~seed)}"
print(w, "->", he.britton_reduce(h, w), "| trivial:", he.hnn_is_trivial(h, w))
w = "t z t^-1 z^-1"
print(w, "->", he.britton_reduce(h, w), "| trivial:", he.hnn_is_trivial(h, w))

# Britton reduction and the embedding agree on random words
rng = random.Random(1729)
seeds = he.n_samples(pkg, rng, 8)
agree = trivial = 0
for _ in range(300):
    w = he.random_g_word(pkg, rng, seeds=seeds)
    lhs = he.hnn_is_trivial(h, w)
    agree += lhs == he.psi_embed(pkg, w).is_trivial()
    trivial += lhs
print(f"agreement {agree}/300, trivial words {trivial}")

rep = he.verify_prop52(pkg, samples=200, seed=1729)
for name, clause in rep["clauses"].items():
    print(name, "PASS" if clause["passed"] else "FAIL")
print("X =", rep["clauses"]["b"]["X"], " Y =", rep["clauses"]["b"]["Y"])
