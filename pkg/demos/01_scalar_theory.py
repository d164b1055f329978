# %% [markdown]
# # Scalar theory
#
# Everything deterministic about the TAP iteration comes from one
# Gaussian fixed point, q = E tanh^2(h + beta sqrt(q) Z), and the
# two-replica map psi on [0, q].

# %%
import math

import numpy as np

from sktap import ModelParams, at_check, psi, psi_prime, solve_q

params = ModelParams(beta=0.5, h=0.7)
theory = solve_q(params)
print(f"q     = {theory.q:.15f}   (residual {theory.residual:.1e})")
print(f"alpha = {theory.alpha:.15f}")

# %% [markdown]
# psi climbs from alpha^2 at t = 0 to q at t = q, and it is convex.
# Its slope at q is the AT quantity beta^2 E cosh^-4.

# %%
ts = np.linspace(0, theory.q, 6)
for t in ts:
    print(f"t = {t:.4f}   psi = {psi(t, theory, params):.6f}   psi' = {psi_prime(t, theory, params):.6f}")
at = at_check(params, theory)
print("\npsi'(q) =", at.at_gap, "-> AT", "satisfied" if at.satisfied else "violated")

# %% [markdown]
# Sweep the AT quantity over beta at fixed h.  The line is crossed
# where psi'(q) reaches 1.

# %%
for beta in (0.5, 1.0, 1.5, 2.0):
    p = ModelParams(beta, 0.1)
    th = solve_q(p)
    print(f"beta = {beta:.1f}   q = {th.q:.4f}   psi'(q) = {th.at_gap:.4f}")

# %% [markdown]
# At beta = 0 the field decouples and q is closed-form.

# %%
th0 = solve_q(ModelParams(0.0, 0.7))
print(th0.q, math.tanh(0.7) ** 2)
