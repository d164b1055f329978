"""Command-line front end: ``sktap theory | simulate | verify``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
3 internal error.
"""

import argparse
from dataclasses import replace
from datetime import datetime, timezone
import csv
import io
import json
import math
import os
from pathlib import Path
import platform
import sys
import traceback

import numpy as np

from . import __version__
from .config import load_config
from .harness import (ConfigError, ExperimentConfig, evaluate, output_stem, read_report_csv,
                      run_experiment, summary_dict, write_report_csv)
from .scalar_theory import (DomainError, ModelParams, SolverError, at_check, psi_interior_fixed_point,
                            solve_q, state_evolution)
from .tap_core import CASCADE_MODES

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
OUT_ENV = "SKTAP_OUT_DIR"
# recorded vs recomputed theory columns; quadrature noise is ~1e-15
THEORY_RTOL = 1e-10


class UsageError(Exception):
    pass


def _num(x) -> str:
    if x is None:
        return "NA"
    x = float(x)
    return "NA" if math.isnan(x) else format(x, ".17g")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


def _dump_json(obj, fh):
    # NaN is not valid JSON; write null instead
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v
    json.dump(clean(json.loads(json.dumps(obj, default=_json_default))), fh, indent=2, sort_keys=True)
    fh.write("\n")


# ---------------------------------------------------------------- theory

def theory_payload(beta: float, h: float, K: int, order: int) -> dict:
    params = ModelParams(beta, h)
    th = solve_q(params, order=order)
    se = state_evolution(th, params, K, order=order)
    at = at_check(params, th)
    out = {
        "beta": beta, "h": h, "K": K, "order": order,
        "q": th.q, "alpha": th.alpha, "at_gap": at.at_gap,
        "at_verdict": "satisfied" if at.satisfied else "violated",
        "at_strict": at.strict,
        "rows": [{"k": k + 1, "rho": float(se.rho[k]), "gamma": float(se.gamma[k]),
                  "Gamma_sq": float(se.gamma_sq_cum[k]), "q_minus_rho": float(se.gap[k]),
                  "q_minus_Gamma_sq": float(se.resid[k])} for k in range(se.K)],
    }
    if not at.satisfied:
        out["psi_interior_fixed_point"] = psi_interior_fixed_point(th, params, order=order)
    return out


ROW_FIELDS = ("k", "rho", "gamma", "Gamma_sq", "q_minus_rho", "q_minus_Gamma_sq")


def format_theory(payload: dict, fmt: str) -> str:
    if fmt == "json":
        buf = io.StringIO()
        _dump_json(payload, buf)
        return buf.getvalue()
    head = [("q", payload["q"]), ("alpha", payload["alpha"]), ("at_gap", payload["at_gap"])]
    if "psi_interior_fixed_point" in payload:
        head.append(("psi_interior_fixed_point", payload["psi_interior_fixed_point"]))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for name, v in head:
            w.writerow(["#", name, _num(v)])
        w.writerow(["#", "at_verdict", payload["at_verdict"]])
        w.writerow(ROW_FIELDS)
        for r in payload["rows"]:
            w.writerow([r["k"]] + [_num(r[f]) for f in ROW_FIELDS[1:]])
        return buf.getvalue()
    lines = [f"beta = {payload['beta']!r}   h = {payload['h']!r}   order = {payload['order']}"]
    lines += [f"{name:<26}{_num(v)}" for name, v in head]
    lines.append(f"{'AT condition':<26}{payload['at_verdict']}" + (" (strict)" if payload["at_strict"] else ""))
    lines.append("")
    lines.append(f"{'k':>3}  " + "  ".join(f"{f:>24}" for f in ROW_FIELDS[1:]))
    for r in payload["rows"]:
        lines.append(f"{r['k']:>3}  " + "  ".join(f"{_num(r[f]):>24}" for f in ROW_FIELDS[1:]))
    return "\n".join(lines) + "\n"


def cmd_theory(args) -> int:
    if not args.h > 0:
        raise UsageError(f"--h must be > 0 (the field is restricted to h > 0), got {args.h}")
    if args.beta is None:
        raise UsageError("--beta is required")
    try:
        payload = theory_payload(args.beta, args.h, args.K, args.order)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    text = format_theory(payload, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "sktap_results"))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def build_config(args) -> tuple:
    if not args.config:
        raise UsageError("simulate needs --config")
    config, out_dir = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.mode is not None:
        overrides["cascade_mode"] = args.mode
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.K is not None:
        overrides["K"] = args.K
    if args.order is not None:
        overrides["quadrature_order"] = args.order
    if args.beta is not None or args.h is not None:
        p = config.params
        overrides["params"] = ModelParams(p.beta if args.beta is None else args.beta,
                                          p.h if args.h is None else args.h)
    if overrides:
        config = replace(config, **overrides)
    out = Path(args.out) if args.out else Path(out_dir) if out_dir else default_out_dir()
    return config, out


def report_paths(out_dir: Path, config: ExperimentConfig) -> dict:
    stem = output_stem(config)
    return {"csv": out_dir / f"{stem}.csv", "summary": out_dir / f"{stem}.json",
            "manifest": out_dir / f"{stem}.manifest.json"}


def cmd_simulate(args) -> int:
    config, out_dir = build_config(args)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out_dir}: {exc}") from exc
    paths = report_paths(out_dir, config)
    started = _now()
    result = run_experiment(config)
    finished = _now()

    write_report_csv(result.report, paths["csv"])
    summary = summary_dict(result)
    with open(paths["summary"], "w") as fh:
        _dump_json(summary, fh)
    manifest = {
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "master_seed": config.master_seed,
        "artifact_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "started": started,
        "finished": finished,
        "outputs": {k: str(v) for k, v in paths.items()},
        "passed": result.passed,
    }
    with open(paths["manifest"], "w") as fh:
        _dump_json(manifest, fh)

    for name, table in result.tables.items():
        print(f"{name:<12} {'PASS' if table.passed else 'FAIL'}  ({len(table.rows)} cells, "
              f"{len(table.failures())} failing)")
        for note in table.notes:
            print(f"    {note}")
    if result.rate is not None:
        r = result.rate
        if r.status == "ok":
            print(f"{'convergence':<12} {'PASS' if r.passed else 'FAIL'}  (lambda_hat {r.lambda_hat:.4g}, "
                  f"psi'(q) {r.psi_prime_q:.4g})")
        else:
            print(f"{'convergence':<12} SKIPPED  ({r.reason})")
    print(f"report: {paths['csv']}")
    return EXIT_OK if result.passed else EXIT_FAIL


# ---------------------------------------------------------------- verify

def _manifest_for(report_path: Path) -> Path:
    name = report_path.name
    for suffix in (".manifest.json", ".json", ".csv"):
        if name.endswith(suffix):
            return report_path.with_name(name[: -len(suffix)] + ".manifest.json")
    return report_path.with_name(name + ".manifest.json")


def verify_report(report_path, order: int | None = None) -> tuple:
    """Recompute theory columns and re-run the checks on a saved report.

    Returns ``(exit_code, messages)``.  Raises ``UsageError`` if the report
    or its manifest is missing or unreadable.
    """
    report_path = Path(report_path)
    manifest_path = _manifest_for(report_path)
    csv_path = manifest_path.with_name(manifest_path.name.replace(".manifest.json", ".csv"))
    try:
        manifest = json.loads(manifest_path.read_text())
        config = ExperimentConfig.from_dict(manifest["config"])
        report = read_report_csv(csv_path)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot load report {report_path}: {exc}") from exc

    if order is not None:
        config = replace(config, quadrature_order=order)
    params = config.params
    theory = solve_q(params, order=config.quadrature_order)
    se = state_evolution(theory, params, config.K, order=config.quadrature_order)

    recorded = [(c.theory, c.passed) for c in report.cells]
    tables, rate = evaluate(report, config, theory, se)
    msgs = []
    ok = True
    for c, (th_rec, pass_rec) in zip(report.cells, recorded):
        if abs(c.theory - th_rec) > THEORY_RTOL * max(1.0, abs(c.theory)):
            ok = False
            msgs.append(f"theory mismatch N={c.N} {c.statistic}({c.j},{c.k}): recorded {th_rec!r}, "
                        f"recomputed {c.theory!r}")
        elif c.passed != pass_rec:
            ok = False
            msgs.append(f"verdict mismatch N={c.N} {c.statistic}({c.j},{c.k}): recorded {pass_rec}, "
                        f"re-evaluated {c.passed}")
    passed = all(t.passed for t in tables.values())
    if rate is not None and rate.status == "ok":
        passed = passed and bool(rate.passed)
    if ok:
        msgs.append(f"theory columns reproduced; checks {'PASS' if passed else 'FAIL'}")
    else:
        msgs.append("verification FAILED")
    return (EXIT_OK if ok and passed else EXIT_FAIL), msgs


def cmd_verify(args) -> int:
    code, msgs = verify_report(args.report, order=args.order)
    for m in msgs:
        print(m)
    return code


# ---------------------------------------------------------------- entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sktap", description="TAP iteration state evolution: theory, simulation, verification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("theory", help="scalar theory and state-evolution table")
    t.add_argument("--beta", type=float, required=True)
    t.add_argument("--h", type=float, required=True)
    t.add_argument("--K", type=int, default=10)
    t.add_argument("--order", type=int, default=80, help="Gauss-Hermite order")
    t.add_argument("--format", choices=("table", "csv", "json"), default="table")
    t.add_argument("--out", help="write to this file instead of stdout")
    t.set_defaults(func=cmd_theory)

    s = sub.add_parser("simulate", help="run the Monte Carlo experiment described by a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help=f"output directory (default: config, then ${OUT_ENV}, then ./sktap_results)")
    s.add_argument("--seed", type=int, help="override simulation.master_seed")
    s.add_argument("--mode", choices=CASCADE_MODES, help="override simulation.cascade_mode")
    s.add_argument("--jobs", type=int, help="override simulation.jobs")
    s.add_argument("--K", type=int, help="override simulation.K")
    s.add_argument("--order", type=int, help="override simulation.quadrature_order")
    s.add_argument("--beta", type=float, help="override model.beta")
    s.add_argument("--h", type=float, help="override model.h")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="recompute theory columns of a saved report and re-check it")
    v.add_argument("report", help="report CSV, JSON summary or manifest")
    v.add_argument("--order", type=int, help="quadrature order for the recomputation")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"sktap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except SolverError as exc:
        print(f"sktap: solver failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
