"""Deterministic scalar quantities of the TAP iteration.

Everything here is a pure function of ``(beta, h)`` and the quadrature
order: the order parameter ``q``, the overlap map ``psi`` on ``[0, q]``,
the de Almeida-Thouless (AT) stability quantity, and the state-evolution
sequences ``rho_k``, ``gamma_k``, ``Gamma_k**2``.

The state evolution is carried in *gap* form, ``q - rho_k`` and
``q - Gamma_k**2``, because below the AT line ``rho_k`` reaches ``q`` to
within one ulp after a dozen steps while the gaps themselves stay
representable for hundreds of steps.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .quadrature import gauss_expect, normal_nodes

DEFAULT_ORDER = 80
DEFAULT_TOL = 1e-12
ENDPOINT_CLAMP = 1e-12
RESID_FLOOR = 1e-280
_LEGENDRE_NODES = 32


class SolverError(RuntimeError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Inverse temperature ``beta >= 0`` and external field ``h > 0``."""

    beta: float
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(
                f"h must be finite and > 0 (the h = 0 branch is not supported), got {self.h}"
            )

    def th(self, x):
        return np.tanh(self.h + self.beta * x)

    def th_prime(self, x):
        t = np.tanh(self.h + self.beta * x)
        return self.beta * (1.0 - t * t)


@dataclass(frozen=True)
class ScalarTheory:
    q: float
    alpha: float
    at_gap: float
    at_satisfied: bool
    quadrature_order: int
    residual: float


@dataclass(frozen=True)
class ATCheck:
    at_gap: float
    satisfied: bool
    strict: bool


@dataclass(frozen=True)
class StateEvolution:
    """State-evolution sequences, stored 0-based (``rho[0]`` is ``rho_1``).

    ``gap[k-1] = q - rho_k`` and ``resid[k-1] = q - Gamma_k**2`` are the
    primary quantities; ``rho`` and ``gamma_sq_cum`` are derived from them
    and may round to ``q`` once the gaps fall below machine precision.
    """

    q: float
    rho: np.ndarray
    gamma: np.ndarray
    gamma_sq_cum: np.ndarray
    gap: np.ndarray
    resid: np.ndarray
    K: int
    rate_lambda: float
    truncated: bool = False

    def resid_before(self, k: int) -> float:
        """``q - Gamma_{k-1}**2`` with ``Gamma_0**2 = 0``."""
        if k < 1 or k > self.K + 1:
            raise IndexError(f"k={k} outside 1..{self.K + 1}")
        return self.q if k == 1 else float(self.resid[k - 2])


def _fixed_point_map(q, params, order):
    return gauss_expect(lambda z: params.th(math.sqrt(q) * z) ** 2, order=order)


def solve_q(params: ModelParams, tol: float = DEFAULT_TOL, order: int = DEFAULT_ORDER,
            max_iter: int = 5000, damping: float = 0.5) -> ScalarTheory:
    """Solve ``q = E tanh^2(h + beta sqrt(q) Z)``.

    Damped fixed-point iteration from ``tanh(h)**2``; falls back to a
    bracketed root search on ``(0, 1]`` if the iteration stalls or
    oscillates.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = math.tanh(params.h) ** 2
    res = q - _fixed_point_map(q, params, order)
    best = abs(res)
    stall = 0
    # iterate past tol so the returned residual has headroom
    target = min(tol, 1e-15)
    for _ in range(max_iter):
        if abs(res) <= target:
            break
        q = q - damping * res
        new_res = q - _fixed_point_map(q, params, order)
        if abs(new_res) >= best:
            stall += 1
        else:
            best, stall = abs(new_res), 0
        res = new_res
        if stall > 20:
            break
    if not abs(res) < tol:
        f = lambda s: s - _fixed_point_map(s, params, order)
        try:
            q = brentq(f, 1e-300, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
        except ValueError as exc:
            raise SolverError(f"no bracketed root for q: {exc}", res) from exc
        res = f(q)
        if not abs(res) < tol:
            raise SolverError("q solver did not reach tolerance", res)

    alpha = gauss_expect(lambda z: params.th(math.sqrt(q) * z), order=order)
    at_gap = params.beta ** 2 * gauss_expect(
        lambda z: np.cosh(params.h + params.beta * math.sqrt(q) * z) ** -4, order=order
    )
    return ScalarTheory(q=q, alpha=alpha, at_gap=at_gap, at_satisfied=at_gap <= 1.0,
                        quadrature_order=order, residual=res)


def _clamp(t, q):
    if t < -ENDPOINT_CLAMP or t > q + ENDPOINT_CLAMP or not math.isfinite(t):
        raise DomainError(f"t={t!r} outside [0, q={q!r}]")
    return min(max(t, 0.0), q)


def _nested(fn, t, q, order):
    # E[(E_y fn(sqrt(t) x + sqrt(q-t) y))^2] over independent x, y
    x, w = normal_nodes(order)
    inner = fn(math.sqrt(t) * x[:, None] + math.sqrt(q - t) * x[None, :]) @ w
    return float(w @ (inner * inner))


def psi(t: float, theory: ScalarTheory, params: ModelParams, order: int | None = None) -> float:
    """Two-replica overlap map ``E Th(sqrt(t)Z + sqrt(q-t)Z') Th(sqrt(t)Z + sqrt(q-t)Z'')``."""
    t = _clamp(t, theory.q)
    return _nested(params.th, t, theory.q, order or theory.quadrature_order)


def psi_prime(t: float, theory: ScalarTheory, params: ModelParams, order: int | None = None) -> float:
    t = _clamp(t, theory.q)
    return _nested(params.th_prime, t, theory.q, order or theory.quadrature_order)


def psi_gap(t: float, theory: ScalarTheory, params: ModelParams, order: int | None = None) -> float:
    """``q - psi(t)`` as ``int_t^q psi'(s) ds``, accurate when ``t`` is close to ``q``.

    Treats ``psi(q) = q`` as exact, i.e. ignores the q-solver residual.
    """
    t = _clamp(t, theory.q)
    return gap_integral(theory.q - t, theory, params, order)


def gap_integral(d: float, theory: ScalarTheory, params: ModelParams, order: int | None = None) -> float:
    """``q - psi(q - d)`` for a gap ``0 <= d <= q`` given directly."""
    if d <= 0.0:
        return 0.0
    q = theory.q
    u, w = np.polynomial.legendre.leggauss(_LEGENDRE_NODES)
    vals = [psi_prime(q - 0.5 * d * (1.0 - ui), theory, params, order) for ui in u]
    return 0.5 * d * float(np.dot(w, vals))


def at_check(params: ModelParams, theory: ScalarTheory) -> ATCheck:
    gap = psi_prime(theory.q, theory, params)
    return ATCheck(at_gap=gap, satisfied=gap <= 1.0, strict=gap < 1.0)


def state_evolution(theory: ScalarTheory, params: ModelParams, K: int,
                    order: int | None = None) -> StateEvolution:
    """Run the ``rho``/``gamma``/``Gamma**2`` recursion up to horizon ``K``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    q, alpha = theory.q, theory.alpha
    gaps, resids, gammas = [], [], []
    truncated = False
    resid_prev = q
    gap = q - alpha * math.sqrt(q)
    for k in range(1, K + 1):
        if k > 1:
            gap = gap_integral(gaps[-1], theory, params, order)
        if resid_prev < RESID_FLOOR:
            truncated = True
            break
        gamma = alpha if k == 1 else (resid_prev - gap) / math.sqrt(resid_prev)
        # q - Gamma_k^2 = gap (2 resid - gap) / resid, free of cancellation
        resid = gap * (2.0 * resid_prev - gap) / resid_prev
        gaps.append(gap)
        resids.append(resid)
        gammas.append(gamma)
        resid_prev = resid
    gap_arr = np.array(gaps)
    resid_arr = np.array(resids)
    return StateEvolution(
        q=q,
        rho=q - gap_arr,
        gamma=np.array(gammas),
        gamma_sq_cum=q - resid_arr,
        gap=gap_arr,
        resid=resid_arr,
        K=len(gaps),
        rate_lambda=psi_prime(q, theory, params, order),
        truncated=truncated,
    )


def psi_interior_fixed_point(theory: ScalarTheory, params: ModelParams,
                             order: int | None = None) -> float | None:
    """The fixed point of ``psi`` inside ``(0, q)``, or ``None`` below the AT line."""
    if psi_prime(theory.q, theory, params, order) <= 1.0:
        return None
    q = theory.q
    f = lambda t: psi(t, theory, params, order) - t
    right = None
    for j in range(1, 60):
        t = q * (1.0 - 2.0 ** -j)
        if f(t) < 0:
            right = t
            break
    if right is None:
        raise SolverError("could not bracket the interior fixed point of psi", f(q * (1 - 2.0 ** -59)))
    try:
        return brentq(f, 0.0, right, xtol=1e-15, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise SolverError(f"interior fixed point search failed: {exc}") from exc
