"""
Three one-variable terms
========================

``binom(n, k)`` sums to ``2^n``; ``1/binom(n, k)`` has a sequence that grows
subexponentially; ``(2n)!/n!^2`` has no summation at all and uses the closed
vertex formula.
"""

# %%
from fractions import Fraction

import mpmath

from multisum import SolverConfig, ansatz_set, compute_sequence, estimate_growth
from multisum.corpus import load_builtin_term

cfg = SolverConfig()

for name in ("closed_form", "inverse_binomial", "central_binomial"):
    term = load_builtin_term(name)
    rep = ansatz_set(term, cfg)
    exact = sorted(rep.rational_identifications.values())
    print(f"{name:18s} S_t = {[str(q) for q in exact]}")

# %%
# The inverse-binomial sequence satisfies a third-order recursion exactly.
a = compute_sequence(load_builtin_term("inverse_binomial"), 12).values
print([str(x) for x in a[:6]])
print(all(-2 * (n + 3) * a[n + 3] + (12 + 5 * n) * a[n + 2] - 4 * (n + 2) * a[n + 1] + (n + 2) * a[n] == 0
          for n in range(len(a) - 3)))

# %%
# Ratio estimates recover 2 and 4; the central binomial exponent is -1/2.
for name, N in (("closed_form", 50), ("central_binomial", 200)):
    est = estimate_growth(compute_sequence(load_builtin_term(name), N))
    print(name, mpmath.nstr(est.lambda_, 15), mpmath.nstr(est.alpha, 6))
print(Fraction(1, 4) == ansatz_set(load_builtin_term("central_binomial"), cfg).per_face[0].exact)
