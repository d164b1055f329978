# %% [markdown]
# # Iterates and the conditioning cascade
#
# One sample of the interaction matrix, the TAP iterates m^(k), their
# orthonormal residual directions phi^(k), and the cascade of
# conditioned matrices g^(k) with fields xi^(k) = g^(k) phi^(k).

# %%
import numpy as np

from sktap import (ModelParams, effective_iterates, inner, norm, run_cascade, sample_matrix, solve_q,
                   state_evolution, tap_iterate)

params = ModelParams(0.5, 0.7)
theory = solve_q(params)
K, N = 6, 1000
se = state_evolution(theory, params, K)
g = sample_matrix(N, seed=1)
its = tap_iterate(g, theory, params, K)

for k in range(1, K + 1):
    print(f"k={k}  ||m||^2 = {inner(its.m[k], its.m[k]):.4f}   ||M^(k)|| = {its.res_norm[k]:.4f}")
print("q =", round(theory.q, 4))

# %% [markdown]
# In the reorthogonalized mode every earlier direction is annihilated
# by the conditioned matrix, and each field is orthogonal to the
# earlier directions, to machine precision.

# %%
cascade = run_cascade(g, its, K)
G = cascade.g_current.entries
print("max ||g phi^(m)||     :", max(norm(G @ its.phi[m]) for m in range(1, K + 1)))
print("max |<xi^(k),phi^(m)>|:", max(abs(inner(cascade.xi[k], its.phi[m]))
                                     for k in range(2, K + 1) for m in range(1, k)))
print("symmetric:", np.array_equal(G, G.T), " zero diagonal:", not np.diag(G).any())

# %% [markdown]
# The effective iterates m_hat^(k) rebuild m^(k) from the fields alone,
# weighting them with the state-evolution coefficients.

# %%
eff = effective_iterates(cascade, se, its, theory, params, K)
for k in range(1, K + 1):
    print(f"k={k}  mean |m - m_hat| = {np.abs(its.m[k] - eff.m_hat[k]).mean():.2e}")
