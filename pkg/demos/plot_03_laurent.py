"""
Constant terms of Laurent polynomial powers
===========================================

For a Laurent polynomial ``F`` the constant terms of ``F^n`` form a multisum
whose term is a multinomial coefficient. We compare both sides and pair the
torus critical values of ``F`` with the ansatz.
"""

# %%
import mpmath

from multisum import SolverConfig, compute_sequence, laurent_reduction, trace_sequence, verify_psi
from multisum.corpus import LAURENT_FREE, load_builtin_laurent

cfg = SolverConfig()

# %%
# ``x + 1/x`` has stride 2: only even powers have a constant term, and the
# reduced term is ``(2m)!/m!^2``.
F = load_builtin_laurent("x_plus_inverse")
red = laurent_reduction(F)
print("stride", red.stride)
print("trace   ", [int(v) for v in trace_sequence(F, 10)])
print("reduced ", [int(v) for v in compute_sequence(red.term, 5).values])
rep = verify_psi(F, cfg)
for p in rep.pairs:
    print("F(u) =", mpmath.nstr(p.value.real, 10), " 1/F(u) matches", mpmath.nstr(p.matched_candidate.real, 10))

# %%
# A two-variable example with six monomials. The summation is parametrized by
# three of the six exponents so the reduced term has three variables.
G = load_builtin_laurent("hexagon_f")
red = laurent_reduction(G, LAURENT_FREE["hexagon_f"])
print([int(v) for v in trace_sequence(G, 8)])
print([int(v) for v in compute_sequence(red.term, 8).values])
rep = verify_psi(G, cfg, LAURENT_FREE["hexagon_f"])
print("max residual", mpmath.nstr(rep.max_residual, 3), "ok", rep.ok)
for p in rep.pairs:
    print("critical value", mpmath.nstr(p.value, 12))
