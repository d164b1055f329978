"""Regenerate tests/golden/scalar_golden.txt from independent oracles.

None of these code paths touch ``sktap``:

* q: hand-written bisection on ``q - E tanh^2`` with a 200-node Hermite rule;
* psi, psi', AT gap: adaptive ``scipy.integrate.quad`` (nested for psi);
* interior fixed point: bisection to a 1e-12 bracket on the quad-based psi;
* state evolution at K=30: the plain recursion ``rho_k = psi(rho_{k-1})``
  run at 50 significant digits with mpmath (Hermite nodes from an mpmath
  symmetric eigensolve).

Run from the repository root:  python3 tests/oracles/make_golden.py
"""

from pathlib import Path
import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad

OUT = Path(__file__).resolve().parent.parent / "golden" / "scalar_golden.txt"
LIM = 12.0


def npdf(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)


def E(f):
    return quad(lambda z: f(z) * npdf(z), -LIM, LIM, epsabs=1e-15, epsrel=1e-14, limit=400)[0]


def solve_q_bisect(beta, h, order=200):
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / w.sum()
    F = lambda q: q - float(w @ np.tanh(h + beta * math.sqrt(q) * x) ** 2)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if F(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    return 0.5 * (lo + hi)


def psi_quad(t, q, beta, h):
    a, b = math.sqrt(t), math.sqrt(q - t)
    inner = lambda x: E(lambda y: math.tanh(h + beta * (a * x + b * y)))
    return E(lambda x: inner(x) ** 2)


def psi_prime_at_zero(q, beta, h):
    th1 = E(lambda y: beta / math.cosh(h + beta * math.sqrt(q) * y) ** 2)
    return th1 * th1


def at_gap(q, beta, h):
    return beta ** 2 * E(lambda z: math.cosh(h + beta * math.sqrt(q) * z) ** -4)


def interior_fixed_point(q, beta, h):
    f = lambda t: psi_quad(t, q, beta, h) - t
    lo, hi = 0.0, None
    for j in range(1, 60):
        t = q * (1 - 2.0 ** -j)
        if f(t) < 0:
            hi = t
            break
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mp_hermite_rule(n):
    # Golub-Welsch for the probabilists' Hermite weight, normalized to a probability
    T = mp.zeros(n, n)
    for i in range(1, n):
        T[i, i - 1] = T[i - 1, i] = mp.sqrt(i)
    evals, evecs = mp.eigsy(T)
    nodes = [evals[i] for i in range(n)]
    weights = [evecs[0, i] ** 2 for i in range(n)]
    return nodes, weights


def mp_state_evolution(beta, h, K, n=100):
    mp.mp.dps = 50
    beta, h = mp.mpf(beta), mp.mpf(h)
    x, w = mp_hermite_rule(n)
    Th = lambda u: mp.tanh(h + beta * u)
    lo, hi = mp.mpf(0), mp.mpf(1)
    for _ in range(400):
        mid = (lo + hi) / 2
        val = mid - mp.fsum(wi * Th(mp.sqrt(mid) * xi) ** 2 for xi, wi in zip(x, w))
        if val < 0:
            lo = mid
        else:
            hi = mid
    q = (lo + hi) / 2
    alpha = mp.fsum(wi * Th(mp.sqrt(q) * xi) for xi, wi in zip(x, w))

    def psi(t):
        a, b = mp.sqrt(t), mp.sqrt(q - t)
        tot = mp.mpf(0)
        for xi, wi in zip(x, w):
            g = mp.fsum(wj * Th(a * xi + b * xj) for xj, wj in zip(x, w))
            tot += wi * g * g
        return tot

    rho = [alpha * mp.sqrt(q)]
    for _ in range(2, K + 1):
        rho.append(psi(rho[-1]))
    gamma, Gsq = [alpha], alpha ** 2
    for k in range(2, K + 1):
        g = (rho[k - 1] - Gsq) / mp.sqrt(q - Gsq)
        gamma.append(g)
        Gsq += g * g
    return q, [q - r for r in rho], q - Gsq


def main():
    rows = []
    b, h = 0.5, 0.7
    q = solve_q_bisect(b, h)
    rows.append(("q", b, h, 0, q))
    rows.append(("psi_half_q", b, h, 0, psi_quad(q / 2, q, b, h)))
    rows.append(("psi_prime_zero", b, h, 0, psi_prime_at_zero(q, b, h)))
    rows.append(("at_gap", b, h, 0, at_gap(q, b, h)))

    b2, h2 = 2.0, 0.1
    q2 = solve_q_bisect(b2, h2)
    rows.append(("q", b2, h2, 0, q2))
    rows.append(("at_gap", b2, h2, 0, at_gap(q2, b2, h2)))
    rows.append(("psi_fixed_point", b2, h2, 0, interior_fixed_point(q2, b2, h2)))

    qm, gaps, resid = mp_state_evolution(b, h, 30)
    for k in (1, 2, 5, 10, 20, 30):
        rows.append(("gap", b, h, k, float(gaps[k - 1])))
    rows.append(("resid", b, h, 30, float(resid)))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w") as fh:
        fh.write("# scalar golden values, table version 1\n")
        fh.write("# name beta h k value  (k = 0 when not indexed; 17 significant digits)\n")
        for name, beta, hh, k, v in rows:
            fh.write(f"{name} {beta!r} {hh!r} {k} {v:.17g}\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()
