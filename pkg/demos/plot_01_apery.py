"""
Apery numbers: ansatz versus growth
===================================

The Apery numbers are ``a_n = sum_k binom(n,k)^2 binom(n+k,k)^2``. Here we
compute the candidate singularity set from the term alone, then check it
against the exact sequence.
"""

# %%
# Build the term and inspect its Newton polytope, which is the interval [0, 1].
import mpmath

from multisum import SolverConfig, ansatz_set, compute_sequence, estimate_growth, faces, newton_polytope
from multisum.corpus import load_builtin_term
from multisum.sequence import confront_ansatz

term = load_builtin_term("apery")
poly = newton_polytope(term)
print("vertices:", poly.vertices)
print("faces:", [(f.dim, f.vertices) for f in faces(poly)])

# %%
# The ansatz collects one critical value per face solution. The two interior
# values are recognized as roots of z^2 - 34 z + 1.
cfg = SolverConfig(digits=64)
rep = ansatz_set(term, cfg)
for i, v in enumerate(rep.s_set):
    tag = rep.rational_identifications.get(i) or rep.quadratic_identifications.get(i) or ""
    print(mpmath.nstr(v.real, 30), tag)

# %%
# Exact sequence up to N = 100, then ratio extrapolation.
tab = compute_sequence(term, 100)
print("a_0..a_5:", [int(v) for v in tab.values[:6]])
est = estimate_growth(tab, order=4)
print("lambda =", mpmath.nstr(est.lambda_, 20), " alpha =", mpmath.nstr(est.alpha, 8))

# %%
# The estimated singularity 1/lambda is the smallest nonzero ansatz element.
conf = confront_ansatz(est, rep)
print("matched", mpmath.nstr(conf.matched.real, 20), "relative error", mpmath.nstr(conf.relative_error, 3))
print("smallest modulus:", conf.is_min_modulus)
