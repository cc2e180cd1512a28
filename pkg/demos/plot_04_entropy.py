"""
Entropy, the four-term relation and the regulator
=================================================

The potential of a product of binomials is a sum of entropy terms. At a
critical point it matches the regulator of the associated formal sum.
"""

# %%
import random

import mpmath

from multisum import binomial_rate, check_K_diagram, entropy, four_term_residual
from multisum.corpus import load_builtin_term
from multisum.entropy import beta, regulator

mpmath.mp.dps = 40
print("Phi(1/2) =", entropy(mpmath.mpf(1) / 2), " log 2 =", mpmath.log(2))

# %%
# Four-term relation at random admissible points.
rng = random.Random(0)
worst = 0
for _ in range(100):
    a = rng.uniform(0, 0.5)
    b = rng.uniform(0, 1 - a)
    worst = max(worst, four_term_residual(a, b))
print("worst four-term residual", mpmath.nstr(worst, 3))

# %%
# Stirling: (1/n) log binom(2n, n) approaches 2 Phi(1/2) = log 4 at rate log n / n.
for n in (10, 100, 1000):
    val, lim = binomial_rate(2, 1, n)
    print(n, mpmath.nstr(lim - val, 6))

# %%
# Regulator at the critical point w = 1/2 of binom(n, k).
term = load_builtin_term("closed_form")
w = [mpmath.mpf(1) / 2]
print("R(beta) =", regulator(beta(term, w)))
chk = check_K_diagram(term, w)
print("residual", mpmath.nstr(chk.residual, 3), "ok", chk.ok())
