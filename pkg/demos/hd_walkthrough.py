"""
The subdirect products H_d
==========================

H_d sits in a product of d copies of F(x, y) and is generated by three
elements. This script builds H_3 and runs through its structure: the
witnesses, the kernel witnesses, a free abelian subgroup of rank d and
the certificates that rule out finite presentability.
"""

from raag_workbench import subdirect_lab as sd
from raag_workbench.free_tools import check_certificate, stallings_build
from raag_workbench.trace_words import format_word

d = 3
pkg = sd.build_hd(d)

# the witnesses w_i = x^-i y x^i form a free basis of a rank-d subgroup
print("witnesses:", [format_word(w) for w in pkg.witnesses])
print("folded rank:", stallings_build(sd.F2, pkg.witnesses).rank())

# x, y, z map to tuples; x and y go to the diagonal
for name, t in pkg.generators.items():
    print(f"{name} -> {t}")

# c_i survives in coordinate i only
for i in range(1, d + 1):
    c = sd.k_witness(pkg, i)
    pattern = "".join("1" if pkg.phis[j](c) else "." for j in range(d))
    print(f"c_{i}: {pattern}  length {len(c)}")

# a copy of Z^d inside H_d
zd = sd.zd_witness(pkg)
print("Z^d witness commutes pairwise:",
      all(a.to_trace().commutes(b.to_trace()) for a in zd for b in zd))
print("(1, -2, 3) ->", sd.zd_product(zd, [1, -2, 3]))

# each quotient F/(L_i L_j) maps onto Z
for i in range(1, d + 1):
    for j in range(i + 1, d + 1):
        cert = sd.not_vsp_certificate(pkg, i, j)
        print(f"pair ({i},{j}): free rank {cert.free_rank}, map {cert.certificate},",
              "kills relators:", check_certificate(cert.presentation, cert.certificate))
print("cited:", cert.cited[-1])
