"""Multi-replica Monte Carlo checks of the overlap, convergence and effective-field predictions.

A replica samples one interaction matrix, runs the TAP iteration, the
conditioning cascade and the effective iterates, and records a fixed list
of scalar statistics ("cells").  Replicas are aggregated per dimension
``N`` into means and standard errors, and every cell is compared against
its state-evolution prediction.

Cell keys are ``(statistic, j, k)``:

============  ======================================  ==========================
statistic     value                                   prediction
============  ======================================  ==========================
norm_sq       ``||m^(k)||^2`` (j = k)                 ``q``
overlap_mm    ``<m^(j), m^(k)>``, j < k               ``rho_j``
overlap_phim  ``<phi^(j), m^(k)>``, j < k             ``gamma_j``
step_sq       ``||m^(k+1) - m^(k)||^2`` (j = k)       ``2 (q - rho_k)``
mhat_l1       ``(1/N) sum |m^(k) - m_hat^(k)|``       ``0``
xi_mhat       ``<xi^(j), m_hat^(k)>``, j < k          ``beta (1-q) gamma_j`` or
                                                      ``beta (1-q) sqrt(q - Gamma_{k-2}^2)`` at j = k-1
xi_sq         ``(1/N) sum xi_i^(k)^2`` (j = k)        ``1``
============  ======================================  ==========================
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import csv
import hashlib
import json
import math

import numpy as np

from . import ensemble
from .ensemble import derive_seed, inner, rng_for, sample_matrix
from .quadrature import gauss_expect
from .scalar_theory import (ModelParams, ScalarTheory, StateEvolution, at_check,
                            psi_interior_fixed_point, solve_q, state_evolution)
from .tap_core import (CASCADE_MODES, REORTHOGONALIZED, effective_iterates,
                       run_cascade, tap_iterate)

STATISTICS = ("norm_sq", "overlap_mm", "overlap_phim", "step_sq", "mhat_l1", "xi_mhat", "xi_sq")
OVERLAP_STATS = ("norm_sq", "overlap_mm", "overlap_phim")
CSV_COLUMNS = ("N", "statistic", "j", "k", "mean", "stderr", "theory", "z", "pass")
NA = "NA"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TolerancePolicy:
    stderr_mult: float = 5.0
    abs_floor: float = 0.02
    floor_ref_n: int = 2000
    mhat_l1_max: float = 0.05
    mhat_k_max: int = 6
    # the L1 bound applies from this N upward; monotonicity is checked over the whole grid
    mhat_ref_n: int = 2000
    monotone_mult: float = 2.0
    # differences below this are rounding (m_hat^(2) = m^(2) exactly)
    rounding_floor: float = 1e-12
    rate_rel_tol: float = 0.25
    xi_J: int | None = None

    def band(self, n: int, stderr: float) -> float:
        floor = self.abs_floor * math.sqrt(self.floor_ref_n / n)
        if not math.isfinite(stderr):
            return floor
        return max(self.stderr_mult * stderr, floor)


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    n_grid: tuple = (500, 1000, 2000, 4000)
    K: int = 8
    replicas: int = 20
    master_seed: int = 0
    cascade_mode: str = REORTHOGONALIZED
    tolerance: TolerancePolicy = field(default_factory=TolerancePolicy)
    quadrature_order: int = 80
    jobs: int = 1
    rate_n: int | None = None
    enabled_checks: tuple = ("overlaps", "effective", "convergence", "xi_mhat")

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")
        if not self.n_grid:
            raise ConfigError("n_grid must not be empty")
        if any(int(n) < 100 for n in self.n_grid):
            raise ConfigError(f"every n_grid entry must be >= 100, got {list(self.n_grid)}")
        if not 2 <= self.K <= 25:
            raise ConfigError(f"K must be in [2, 25], got {self.K}")
        if self.cascade_mode not in CASCADE_MODES:
            raise ConfigError(f"cascade_mode must be one of {CASCADE_MODES}, got {self.cascade_mode!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        unknown = set(self.enabled_checks) - {"overlaps", "effective", "convergence", "xi_mhat"}
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = [int(n) for n in self.n_grid]
        d["enabled_checks"] = list(self.enabled_checks)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        """Inverse of :meth:`to_dict`."""
        d = dict(d)
        try:
            d["params"] = ModelParams(**d["params"])
            d["tolerance"] = TolerancePolicy(**d.get("tolerance", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config record: {exc}") from exc
        d["n_grid"] = tuple(d.get("n_grid", cls.n_grid))
        if "enabled_checks" in d:
            d["enabled_checks"] = tuple(d["enabled_checks"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad config record: {exc}") from exc

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def cell_keys(K: int) -> list:
    keys = [("norm_sq", k, k) for k in range(1, K + 1)]
    keys += [("overlap_mm", j, k) for k in range(2, K + 1) for j in range(1, k)]
    keys += [("overlap_phim", j, k) for k in range(2, K + 1) for j in range(1, k)]
    keys += [("step_sq", k, k) for k in range(1, K)]
    keys += [("mhat_l1", k, k) for k in range(1, K + 1)]
    keys += [("xi_mhat", s, J) for J in range(2, K + 1) for s in range(1, J)]
    keys += [("xi_sq", k, k) for k in range(1, K)]
    return keys


def theory_value(stat: str, j: int, k: int, se: StateEvolution, theory: ScalarTheory,
                 params: ModelParams) -> float:
    q = theory.q
    if stat == "norm_sq":
        return q
    if stat == "overlap_mm":
        return float(se.rho[j - 1])
    if stat == "overlap_phim":
        return float(se.gamma[j - 1])
    if stat == "step_sq":
        return 2.0 * float(se.gap[k - 1])
    if stat == "mhat_l1":
        return 0.0
    if stat == "xi_mhat":
        scale = params.beta * (1.0 - q)
        if scale == 0.0:
            # the state evolution may stop early at beta = 0 (alpha^2 = q)
            return 0.0
        if j < k - 1:
            return scale * float(se.gamma[j - 1])
        return scale * math.sqrt(se.resid_before(k - 1))
    if stat == "xi_sq":
        return 1.0
    raise KeyError(stat)


@dataclass
class ReplicaResult:
    N: int
    replica: int
    seed: int
    K: int
    values: np.ndarray
    max_cascade_residual: float
    degenerate_count: int


def run_replica(config: ExperimentConfig, N: int, replica_index: int,
                theory: ScalarTheory | None = None, se: StateEvolution | None = None) -> ReplicaResult:
    params, K = config.params, config.K
    if theory is None:
        theory = solve_q(params, order=config.quadrature_order)
    if se is None:
        se = state_evolution(theory, params, K)
    seed = derive_seed(config.master_seed, ensemble.TAG_MATRIX, N, replica_index)
    g = sample_matrix(N, seed)
    its = tap_iterate(g, theory, params, K)
    cascade = run_cascade(g, its, K - 1, mode=config.cascade_mode)
    eff = effective_iterates(cascade, se, its, theory, params, K)
    del g

    m, phi, xi, mh = its.m, its.phi, cascade.xi, eff.m_hat
    vals = []
    for stat, j, k in cell_keys(K):
        if stat == "norm_sq":
            v = inner(m[k], m[k])
        elif stat == "overlap_mm":
            v = inner(m[j], m[k])
        elif stat == "overlap_phim":
            v = inner(phi[j], m[k])
        elif stat == "step_sq":
            d = m[k + 1] - m[k]
            v = inner(d, d)
        elif stat == "mhat_l1":
            v = float(np.mean(np.abs(m[k] - mh[k])))
        elif stat == "xi_mhat":
            v = inner(xi[j], mh[k])
        else:
            v = inner(xi[k], xi[k])
        vals.append(v)
    return ReplicaResult(
        N=N, replica=replica_index, seed=seed, K=K, values=np.array(vals),
        max_cascade_residual=float(np.nanmax(cascade.residuals[1:])) if K > 1 else 0.0,
        degenerate_count=int(sum(its.degenerate[1:])),
    )


@dataclass
class Cell:
    N: int
    statistic: str
    j: int
    k: int
    mean: float
    stderr: float
    theory: float
    z: float = math.nan
    passed: bool | None = None


@dataclass
class OverlapReport:
    K: int
    cells: list

    def select(self, stat: str, N: int | None = None) -> list:
        return [c for c in self.cells if c.statistic == stat and (N is None or c.N == N)]

    @property
    def n_grid(self) -> list:
        return sorted({c.N for c in self.cells})

    def get(self, stat: str, N: int, j: int, k: int) -> Cell:
        for c in self.cells:
            if c.statistic == stat and c.N == N and c.j == j and c.k == k:
                return c
        raise KeyError((stat, N, j, k))


def aggregate(results: list, se: StateEvolution | None = None, theory: ScalarTheory | None = None,
              params: ModelParams | None = None) -> OverlapReport:
    """Per-cell mean and standard error (sample sd / sqrt(R)) for each ``N``.

    Results are reduced in ``(N, replica)`` order so the floating-point
    summation order does not depend on how replicas were scheduled.
    Theory columns are filled when ``se``, ``theory`` and ``params`` are given.
    """
    if not results:
        raise ValueError("aggregate needs at least one replica result")
    K = results[0].K
    if any(r.K != K or r.values.shape != results[0].values.shape for r in results):
        raise ValueError("replica results have inconsistent shapes")
    keys = cell_keys(K)
    cells = []
    for N in sorted({r.N for r in results}):
        group = sorted((r for r in results if r.N == N), key=lambda r: r.replica)
        data = np.stack([r.values for r in group])
        R = data.shape[0]
        mean = data.mean(axis=0)
        if R > 1:
            stderr = data.std(axis=0, ddof=1) / math.sqrt(R)
        else:
            stderr = np.full(mean.shape, math.nan)
        for idx, (stat, j, k) in enumerate(keys):
            th = math.nan
            if se is not None and theory is not None and params is not None:
                th = theory_value(stat, j, k, se, theory, params)
            c = Cell(N, stat, j, k, float(mean[idx]), float(stderr[idx]), th)
            c.z = zscore(c)
            cells.append(c)
    return OverlapReport(K=K, cells=cells)


@dataclass
class PassFailTable:
    name: str
    rows: list
    passed: bool
    notes: list = field(default_factory=list)

    def failures(self) -> list:
        return [r for r in self.rows if r.passed is False]


# mhat_l1 is an error magnitude with target 0, not a fluctuation about a prediction
BOUND_STATS = ("mhat_l1",)
DETERMINISTIC_REL_SE = 1e-12


def zscore(c) -> float:
    """Standardized deviation, or NaN for bound statistics and cells whose spread is rounding."""
    if c.statistic in BOUND_STATS or not math.isfinite(c.stderr):
        return math.nan
    if c.stderr <= DETERMINISTIC_REL_SE * max(1.0, abs(c.theory)):
        return math.nan
    return (c.mean - c.theory) / c.stderr


def _band_check(cells, policy):
    for c in cells:
        band = policy.band(c.N, c.stderr)
        c.passed = bool(abs(c.mean - c.theory) <= band)
    return cells


def check_overlaps(report: OverlapReport, se: StateEvolution, theory: ScalarTheory,
                   policy: TolerancePolicy = TolerancePolicy()) -> PassFailTable:
    """``||m^(k)||^2 ~ q``, ``<m^(j), m^(k)> ~ rho_j``, ``<phi^(j), m^(k)> ~ gamma_j``."""
    rows = [c for c in report.cells if c.statistic in OVERLAP_STATS]
    _band_check(rows, policy)
    return PassFailTable("overlaps", rows, all(c.passed for c in rows))


def check_xi_variance(report: OverlapReport, policy: TolerancePolicy = TolerancePolicy()) -> PassFailTable:
    rows = report.select("xi_sq")
    _band_check(rows, policy)
    return PassFailTable("xi_variance", rows, all(c.passed for c in rows))


def check_xi_mhat(report: OverlapReport, se: StateEvolution, theory: ScalarTheory, params: ModelParams,
                  policy: TolerancePolicy = TolerancePolicy(), J: int | None = None) -> PassFailTable:
    """``<xi^(s), m_hat^(J)>`` against its two-branch prediction, at one ``J`` or all."""
    J = J if J is not None else policy.xi_J
    rows = [c for c in report.select("xi_mhat") if J is None or c.k == J]
    for c in rows:
        c.theory = theory_value("xi_mhat", c.j, c.k, se, theory, params)
        c.z = zscore(c)
    _band_check(rows, policy)
    return PassFailTable("xi_mhat", rows, all(c.passed for c in rows))


def check_effective(report: OverlapReport, policy: TolerancePolicy = TolerancePolicy()) -> PassFailTable:
    """``m^(k)`` close to ``m_hat^(k)`` for ``k <= mhat_k_max`` at ``N >= mhat_ref_n``, shrinking as ``N`` grows."""
    rows = [c for c in report.select("mhat_l1") if c.k <= policy.mhat_k_max]
    for c in rows:
        c.passed = bool(c.N < policy.mhat_ref_n or c.mean <= policy.mhat_l1_max)
    notes = []
    ok = all(c.passed for c in rows)
    grid = report.n_grid
    for k in sorted({c.k for c in rows}):
        for n0, n1 in zip(grid, grid[1:]):
            a, b = report.get("mhat_l1", n0, k, k), report.get("mhat_l1", n1, k, k)
            se0 = a.stderr if math.isfinite(a.stderr) else 0.0
            se1 = b.stderr if math.isfinite(b.stderr) else 0.0
            slack = max(policy.monotone_mult * math.hypot(se0, se1), policy.rounding_floor)
            if b.mean > a.mean + slack:
                ok = False
                b.passed = False
                notes.append(f"mhat_l1 k={k}: N={n1} mean {b.mean:.4g} > N={n0} mean {a.mean:.4g} + {slack:.2g}")
    return PassFailTable("effective", rows, ok, notes)


@dataclass
class RateEstimate:
    status: str
    reason: str = ""
    N: int | None = None
    lambda_hat: float = math.nan
    lambda_theory_fit: float = math.nan
    psi_prime_q: float = math.nan
    rel_error: float = math.nan
    window: tuple = ()
    band_table: PassFailTable | None = None
    passed: bool | None = None


def _fit_ratio(ks, vals):
    ks = np.asarray(ks, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if len(ks) < 2 or np.any(vals <= 0):
        return math.nan
    return float(np.exp(np.polyfit(ks, np.log(vals), 1)[0]))


def check_convergence(report: OverlapReport, se: StateEvolution, theory: ScalarTheory,
                      policy: TolerancePolicy = TolerancePolicy(), N: int | None = None) -> RateEstimate:
    """Compare ``E||m^(k+1)-m^(k)||^2`` with ``2(q - rho_k)`` and fit the geometric rate.

    Only meaningful strictly below the AT line; elsewhere the result is
    ``skipped`` with a reason.
    """
    lam = se.rate_lambda
    if not lam < 1.0:
        return RateEstimate(status="skipped", psi_prime_q=lam,
                            reason=f"AT condition not strict (psi'(q) = {lam:.6g} >= 1); rate theorem does not apply")
    N = N if N is not None else max(report.n_grid)
    rows = report.select("step_sq", N)
    if not rows:
        return RateEstimate(status="skipped", psi_prime_q=lam, reason=f"no step_sq cells at N={N}")
    _band_check(rows, policy)
    band = PassFailTable("convergence_band", rows, all(c.passed for c in rows))
    lo, hi = 3, report.K - 2
    win = [c for c in rows if lo <= c.k <= hi]
    if len(win) < 2:
        return RateEstimate(status="skipped", psi_prime_q=lam, N=N, band_table=band,
                            reason=f"fit window k in [{lo}, {hi}] has fewer than two points")
    ks = [c.k for c in win]
    lam_hat = _fit_ratio(ks, [c.mean for c in win])
    lam_th = _fit_ratio(ks, [2.0 * se.gap[c.k - 1] for c in win])
    rel = abs(lam_hat - lam) / lam if lam > 0 else math.nan
    ok = band.passed and rel <= policy.rate_rel_tol
    return RateEstimate(status="ok", N=N, lambda_hat=lam_hat, lambda_theory_fit=lam_th,
                        psi_prime_q=lam, rel_error=rel, window=(lo, hi), band_table=band,
                        passed=bool(ok))


@dataclass
class LLNResult:
    passed: bool
    empirical: float
    expected: float
    tolerance: float


def lln_selftest(n: int, seed: int, params: ModelParams = ModelParams(0.5, 0.7),
                 x=None, F=None) -> LLNResult:
    """Law of large numbers for ``(1/n) sum F(eta_i)`` with weakly correlated Gaussians.

    ``eta_i = Z_i + x_i Z / sqrt(n)`` with a shared ``Z``; the mean is
    compared with ``E F(sqrt(mu) Z')``, ``mu = 1 + mean(x^2)/n``, at
    tolerance ``5/sqrt(n)``.  ``F`` defaults to ``tanh(h + beta .)``.
    """
    if n < 1000:
        raise ValueError("lln_selftest needs n >= 1000")
    F = params.th if F is None else F
    x = np.zeros(n) if x is None else np.asarray(x, dtype=float)
    rng = rng_for(derive_seed(seed, ensemble.TAG_LLN, n))
    z_i = rng.standard_normal(n)
    z = rng.standard_normal()
    eta = z_i + x * z / math.sqrt(n)
    emp = float(np.mean(np.broadcast_to(F(eta), eta.shape)))
    mu = 1.0 + float(np.mean(x * x)) / n
    exp_ = gauss_expect(lambda t: np.broadcast_to(F(math.sqrt(mu) * t), t.shape), order=80)
    tol = 5.0 / math.sqrt(n)
    return LLNResult(passed=abs(emp - exp_) <= tol, empirical=emp, expected=exp_, tolerance=tol)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    theory: ScalarTheory
    se: StateEvolution
    report: OverlapReport
    tables: dict
    rate: RateEstimate | None
    flags: dict
    replica_diagnostics: list

    @property
    def passed(self) -> bool:
        ok = all(t.passed for t in self.tables.values())
        if self.rate is not None and self.rate.status == "ok":
            ok = ok and bool(self.rate.passed)
        return ok


def _replica_task(args):
    config, N, idx, theory, se = args
    return run_replica(config, N, idx, theory, se)


def scalar_flags(theory: ScalarTheory, se: StateEvolution, params: ModelParams) -> dict:
    """AT verdict and whether ``q - Gamma_K^2`` is predicted to vanish."""
    at = at_check(params, theory)
    flags = {
        "q": theory.q,
        "alpha": theory.alpha,
        "at_gap": at.at_gap,
        "at_satisfied": at.satisfied,
        "at_strict": at.strict,
        "q_minus_Gamma_sq_K": float(se.resid[-1]),
        "scalar_recursion_converges": at.satisfied,
    }
    if not at.satisfied:
        t_star = psi_interior_fixed_point(theory, params)
        flags["psi_interior_fixed_point"] = t_star
        # q - Gamma_k^2 tends to q - t* > 0 above the AT line
        flags["q_minus_Gamma_sq_limit"] = theory.q - t_star
    return flags


def evaluate(report: OverlapReport, config: ExperimentConfig, theory: ScalarTheory,
             se: StateEvolution) -> tuple:
    """Run every enabled check on ``report``; returns ``(tables, rate)``.

    Cells not covered by an enabled check keep ``passed = None``.
    """
    pol = config.tolerance
    params = config.params
    for c in report.cells:
        c.passed = None
        c.theory = theory_value(c.statistic, c.j, c.k, se, theory, params)
        c.z = zscore(c)
    tables = {}
    rate = None
    if "overlaps" in config.enabled_checks:
        tables["overlaps"] = check_overlaps(report, se, theory, pol)
        tables["xi_variance"] = check_xi_variance(report, pol)
    if "effective" in config.enabled_checks:
        tables["effective"] = check_effective(report, pol)
    if "xi_mhat" in config.enabled_checks:
        tables["xi_mhat"] = check_xi_mhat(report, se, theory, params, pol)
    if "convergence" in config.enabled_checks:
        rate = check_convergence(report, se, theory, pol, config.rate_n)
    return tables, rate


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    params = config.params
    theory = solve_q(params, order=config.quadrature_order)
    se = state_evolution(theory, params, config.K)
    tasks = [(config, int(N), r, theory, se) for N in config.n_grid for r in range(config.replicas)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_replica_task, tasks))
    else:
        results = [_replica_task(t) for t in tasks]
    report = aggregate(results, se, theory, params)
    tables, rate = evaluate(report, config, theory, se)
    diags = [{"N": r.N, "replica": r.replica, "seed": r.seed,
              "max_cascade_residual": r.max_cascade_residual,
              "degenerate_count": r.degenerate_count} for r in sorted(results, key=lambda r: (r.N, r.replica))]
    return ExperimentResult(config, theory, se, report, tables, rate,
                            scalar_flags(theory, se, params), diags)


def _fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return NA if math.isnan(x) else format(x, ".17g")


def write_report_csv(report: OverlapReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in report.cells:
            w.writerow([c.N, c.statistic, c.j, c.k, _fmt(c.mean), _fmt(c.stderr), _fmt(c.theory),
                        _fmt(c.z), _fmt(c.passed)])


def _parse(s: str) -> float:
    return math.nan if s == NA else float(s)


def read_report_csv(path) -> OverlapReport:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        cells = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
            N, stat, j, k, mean, stderr, th, z, passed = row
            if stat not in STATISTICS:
                raise ValueError(f"{path}:{lineno}: unknown statistic {stat!r}")
            cells.append(Cell(int(N), stat, int(j), int(k), _parse(mean), _parse(stderr), _parse(th),
                              _parse(z), None if passed == NA else passed == "1"))
    if not cells:
        raise ValueError(f"{path}: no data rows")
    K = max(c.k for c in cells)
    return OverlapReport(K=K, cells=cells)


def summary_dict(result: ExperimentResult) -> dict:
    rate = result.rate
    rate_d = None
    if rate is not None:
        rate_d = {k: v for k, v in asdict(rate).items() if k != "band_table"}
        rate_d["window"] = list(rate.window)
    zs = [abs(c.z) for c in result.report.cells if c.passed is not None and math.isfinite(c.z)]
    return {
        "config": result.config.to_dict(),
        "config_hash": result.config.config_hash(),
        "master_seed": result.config.master_seed,
        "passed": result.passed,
        "checks": {name: {"passed": t.passed, "cells": len(t.rows), "failures": len(t.failures()),
                          "notes": t.notes} for name, t in result.tables.items()},
        "rate": rate_d,
        "scalar": result.flags,
        "z_exceed_4_fraction": (sum(z > 4 for z in zs) / len(zs)) if zs else None,
        "max_cascade_residual": max(d["max_cascade_residual"] for d in result.replica_diagnostics),
        "degenerate_directions": sum(d["degenerate_count"] for d in result.replica_diagnostics),
    }


def output_stem(config: ExperimentConfig) -> str:
    return f"report_{config.config_hash()}_seed{config.master_seed}"
