"""TAP iterates, their Gram-Schmidt residual directions, and the conditioning cascade.

Indexing follows the iteration counter: ``its.m[k]`` is the k-th iterate
(``its.m[0]`` is the zero vector), ``its.phi[k]`` the k-th residual
direction, ``cascade.xi[k]`` the k-th effective field.  Slot 0 of the
direction/field lists is unused.

The cascade update for a unit direction ``phi`` (in the normalized inner
product) is ``g <- g - phi (x)_s xi + <phi, xi> phi (x) phi`` with
``xi = g phi``.  Writing ``e = phi / sqrt(N)`` this is exactly
``(I - e e^T) g (I - e e^T)``, the Frobenius-orthogonal projection onto
symmetric matrices annihilating ``phi``.  Re-zeroing the diagonal is the
projection onto zero-diagonal matrices; the two are alternated until both
constraints hold.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .ensemble import DimensionError, InteractionMatrix, inner, norm
from .scalar_theory import ModelParams, ScalarTheory, StateEvolution

LEADING_ORDER = "leading_order"
REORTHOGONALIZED = "reorthogonalized"
CASCADE_MODES = (LEADING_ORDER, REORTHOGONALIZED)

DEGENERATE_REL_FLOOR = 1e-8
DEFLATION_TOL = 1e-12
MAX_DEFLATION_SWEEPS = 60
DEFAULT_MAX_K = 25


class PreconditionError(ValueError):
    pass


@dataclass
class IterateSet:
    q: float
    floor: float
    m: list = field(default_factory=list)
    phi: list = field(default_factory=lambda: [None])
    m_res: list = field(default_factory=lambda: [None])
    res_norm: list = field(default_factory=lambda: [math.nan])
    degenerate: list = field(default_factory=lambda: [False])

    @property
    def K(self) -> int:
        return len(self.m) - 1

    @property
    def n(self) -> int:
        return self.m[0].size

    def basis(self, upto: int | None = None) -> list:
        """Non-degenerate directions among ``phi[1..upto]``; these are orthonormal."""
        upto = self.K if upto is None else upto
        return [self.phi[j] for j in range(1, upto + 1) if not self.degenerate[j]]


def gram_schmidt(its: IterateSet, new_m: np.ndarray) -> IterateSet:
    """Append ``new_m`` and its residual against the span of the earlier iterates.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A residual
    below ``its.floor`` is flagged degenerate and gets the all-ones
    direction.
    """
    new_m = np.asarray(new_m, dtype=float)
    its.m.append(new_m)
    k = its.K
    res = new_m.copy()
    basis = its.basis(k - 1)
    for _ in range(2):
        for p in basis:
            res -= inner(res, p) * p
    r = norm(res)
    its.m_res.append(res)
    its.res_norm.append(r)
    if r < its.floor:
        its.degenerate.append(True)
        its.phi.append(np.ones_like(res))
    else:
        its.degenerate.append(False)
        its.phi.append(res / r)
    return its


def tap_iterate(g: InteractionMatrix, theory: ScalarTheory, params: ModelParams, K: int,
                max_K: int = DEFAULT_MAX_K) -> IterateSet:
    """Iterates ``m^(0..K)`` of ``m^(k+1) = Th(g m^(k) - beta(1-q) m^(k-1))``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > max_K:
        raise ValueError(f"K={K} exceeds the horizon cap {max_K}")
    q = theory.q
    n = g.n
    its = IterateSet(q=q, floor=DEGENERATE_REL_FLOOR * math.sqrt(q))
    its.m.append(np.zeros(n))
    gram_schmidt(its, np.full(n, math.sqrt(q)))
    onsager = params.beta * (1.0 - q)
    G = g.entries
    for k in range(1, K):
        field_ = G @ its.m[k] - onsager * its.m[k - 1]
        gram_schmidt(its, params.th(field_))
    return its


@dataclass
class CascadeState:
    g_current: InteractionMatrix
    mode: str = REORTHOGONALIZED
    xi: list = field(default_factory=lambda: [None])
    constraints: list = field(default_factory=list)
    # max_m ||g phi^(m)|| over the enforced set after each step
    residuals: list = field(default_factory=lambda: [math.nan])


def _sym_subtract(G: np.ndarray, A: np.ndarray) -> None:
    """``G <- G - (A + A^T)`` with the diagonal re-zeroed; keeps ``G`` exactly symmetric."""
    A += A.T.copy()
    G -= A
    np.fill_diagonal(G, 0.0)


def _deflate(G: np.ndarray, dirs: list, tol: float) -> float:
    """Alternate ``G <- (I-QQ^T) G (I-QQ^T)`` with diagonal zeroing until ``max ||G phi|| < tol``."""
    n = G.shape[0]
    Q = np.stack(dirs, axis=1) / math.sqrt(n)
    err = math.inf
    for _ in range(MAX_DEFLATION_SWEEPS):
        U = G @ Q
        # ||G phi|| in the normalized norm equals the Euclidean norm of G e
        err = float(np.sqrt((U * U).sum(axis=0)).max())
        if err < tol:
            break
        B = Q.T @ U
        W = U - 0.5 * (Q @ B)
        _sym_subtract(G, Q @ W.T)
    return err


def conditioning_step(state: CascadeState, phi_k: np.ndarray, *, enforce: bool = True):
    """One cascade step with unit direction ``phi_k``; returns ``(xi_k, state)``.

    The state is updated in place: its matrix advances one generation.
    """
    phi_k = np.asarray(phi_k, dtype=float)
    if abs(norm(phi_k) - 1.0) > 1e-8:
        raise PreconditionError(f"direction is not unit-norm (||phi|| = {norm(phi_k):.12g})")
    if state.mode not in CASCADE_MODES:
        raise ValueError(f"unknown cascade mode {state.mode!r}")
    mat = state.g_current
    G = mat.entries
    n = mat.n
    xi = G @ phi_k
    c = inner(phi_k, xi)
    v = xi - 0.5 * c * phi_k
    _sym_subtract(G, np.outer(phi_k, v / n))

    if state.mode == REORTHOGONALIZED:
        if not any(p is phi_k or np.array_equal(p, phi_k) for p in state.constraints):
            state.constraints.append(phi_k)
        dirs = state.constraints
    else:
        dirs = [phi_k]
    err = _deflate(G, dirs, DEFLATION_TOL) if enforce else math.nan
    state.xi.append(xi)
    state.residuals.append(err)
    mat.generation += 1
    return xi, state


def run_cascade(g: InteractionMatrix, iterates: IterateSet, K: int,
                mode: str = REORTHOGONALIZED) -> CascadeState:
    """Apply the cascade along ``phi^(1..K)``, recording ``xi^(1..K)``.

    Works on a copy of ``g``.  Degenerate directions (the all-ones
    fallback) are conditioned on but not added twice to the constraint set.
    """
    if iterates.K < K:
        raise DimensionError(f"iterates reach k={iterates.K}, cascade needs {K}")
    start = InteractionMatrix(n=g.n, entries=g.entries.copy(), seed=g.seed, generation=g.generation)
    state = CascadeState(g_current=start, mode=mode)
    for k in range(1, K + 1):
        conditioning_step(state, iterates.phi[k])
    return state


@dataclass
class EffectiveIterates:
    m_hat: list
    m_hat_theory: list
    source_coeffs: list


def effective_iterates(cascade: CascadeState, se: StateEvolution, iterates: IterateSet,
                       theory: ScalarTheory, params: ModelParams, K: int | None = None) -> EffectiveIterates:
    """``m_hat^(k) = Th(||M^(k-1)|| xi^(k-1) + sum_{t<=k-2} gamma_t xi^(t))`` for ``k = 1..K``.

    ``m_hat_theory`` replaces ``||M^(k-1)||`` by ``sqrt(q - Gamma_{k-2}^2)``.
    ``source_coeffs[k]`` holds the coefficients over ``xi^(1..k-1)``.
    """
    K = iterates.K if K is None else K
    if len(cascade.xi) - 1 < K - 1 or iterates.K < K or se.K < max(K - 2, 1):
        raise DimensionError(
            f"horizon mismatch: K={K}, cascade {len(cascade.xi) - 1}, iterates {iterates.K}, se {se.K}"
        )
    n = iterates.n
    first = np.full(n, math.sqrt(theory.q))
    m_hat, m_hat_th, coeffs = [None, first], [None, first.copy()], [None, np.zeros(0)]
    for k in range(2, K + 1):
        c = np.empty(k - 1)
        c[: k - 2] = se.gamma[: k - 2]
        c[k - 2] = iterates.res_norm[k - 1]
        xis = np.stack(cascade.xi[1:k])
        m_hat.append(params.th(c @ xis))
        c_th = c.copy()
        c_th[k - 2] = math.sqrt(se.resid_before(k - 1))
        m_hat_th.append(params.th(c_th @ xis))
        coeffs.append(c)
    return EffectiveIterates(m_hat=m_hat, m_hat_theory=m_hat_th, source_coeffs=coeffs)


def x_vector(se: StateEvolution, phis, k: int, j: int) -> np.ndarray:
    """``X^(k,j) = sum_{t<=j} gamma_t phi^(t)``; for ``j = k`` the last term is ``sqrt(q - Gamma_{k-1}^2) phi^(k)``."""
    if not 0 <= j <= k:
        raise IndexError(f"need 0 <= j <= k, got j={j}, k={k}")
    top = k if j == k else j
    if top >= len(phis) or (top > 0 and phis[top] is None):
        raise IndexError(f"direction phi^({top}) not available")
    last = j if j < k else k - 1
    if last > se.K:
        raise IndexError(f"state evolution too short for X^({k},{j})")
    out = np.zeros(len(phis[1]))
    for t in range(1, last + 1):
        out += se.gamma[t - 1] * phis[t]
    if j == k:
        out += math.sqrt(se.resid_before(k)) * phis[k]
    return out


def write_trace(path, iterates: IterateSet) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "norm_m_sq", "res_norm", "degenerate_flag"])
        for k in range(1, iterates.K + 1):
            w.writerow([k, repr(inner(iterates.m[k], iterates.m[k])),
                        repr(float(iterates.res_norm[k])), int(iterates.degenerate[k])])
