"""
Counting bounds from the Golod-Shafarevich inequality
=====================================================

gamma(n) bounds the order of the finite quotient that separates the
relevant elements; delta(n) = gamma(n) + n. Numbers are stored as
2^k + c so the table stays readable.
"""

from fractions import Fraction

from raag_workbench import gs_bounds as gs

print(" n   r   log2 gamma (bound)   log2 gamma (exact)   envelope 18n^3")
for n in range(1, 9):
    r = gs.default_r(n)
    print(f"{n:2d}  {r:2d}   {gs.gamma(n).exponent:18d}   "
          f"{gs.gamma(n, 'exact').log2():18.1f}   {18 * n ** 3:14d}")

# the inequality at the default point
print("value at (1, 2/3, 4):", gs.gs_value(1, Fraction(2, 3), 4))

# exact layer dimensions of the restricted Lie algebra
print("Jennings dims:", gs.jz_profile(8, "exact").dims)

# a finer tau can shrink the exponent a lot
for n in (1, 10, 50):
    opt = gs.optimize_tau(n)
    print(f"n={n}: tau={opt.tau}, r={opt.r}, 2^{opt.exponent} vs 2^{opt.default_exponent}")
