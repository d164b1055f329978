"""Experiment config files.

Plain INI with four sections, all keys optional except ``model.beta`` and
``model.h``::

    [model]
    beta = 0.5
    h = 0.7

    [simulation]
    n_grid = 500, 1000, 2000, 4000
    K = 8
    replicas = 20
    master_seed = 2024
    cascade_mode = reorthogonalized
    jobs = 1
    quadrature_order = 80
    rate_n = 4000

    [checks]
    enabled = overlaps, effective, convergence, xi_mhat
    stderr_mult = 5
    abs_floor = 0.02
    xi_J = 6

    [output]
    directory = results

Unknown sections or keys are rejected with their line number.
"""

import configparser
import os
import re

from .harness import ConfigError, ExperimentConfig, TolerancePolicy
from .scalar_theory import ModelParams

_INT = int
_FLOAT = float


def _int_list(s):
    return tuple(int(x) for x in s.replace(",", " ").split())


def _str_list(s):
    return tuple(x for x in s.replace(",", " ").split())


SCHEMA = {
    "model": {"beta": _FLOAT, "h": _FLOAT},
    "simulation": {
        "n_grid": _int_list, "K": _INT, "replicas": _INT, "master_seed": _INT,
        "cascade_mode": str, "jobs": _INT, "quadrature_order": _INT, "rate_n": _INT,
    },
    "checks": {
        "enabled": _str_list, "stderr_mult": _FLOAT, "abs_floor": _FLOAT, "floor_ref_n": _INT,
        "mhat_l1_max": _FLOAT, "mhat_k_max": _INT, "mhat_ref_n": _INT, "monotone_mult": _FLOAT,
        "rate_rel_tol": _FLOAT, "xi_J": _INT,
    },
    "output": {"directory": str},
}


def _line_of(text, section, key=None):
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return lineno
    return "?"


def parse_config_text(text: str, source: str = "<config>") -> tuple:
    """Parse config text into ``(ExperimentConfig, output_directory or None)``."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}:{_line_of(text, section)}: unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{source}:{_line_of(text, section, key)}: unknown key '{key}' in [{section}]")
            try:
                values[(section, key)] = SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{source}:{_line_of(text, section, key)}: bad value for {section}.{key}: {raw!r} ({exc})"
                ) from exc

    for key in ("beta", "h"):
        if ("model", key) not in values:
            raise ConfigError(f"{source}: missing required key model.{key}")
    try:
        params = ModelParams(values[("model", "beta")], values[("model", "h")])
    except ValueError as exc:
        raise ConfigError(f"{source}:{_line_of(text, 'model', 'h')}: {exc}") from exc

    tol_kwargs = {k: values[("checks", k)] for k in
                  ("stderr_mult", "abs_floor", "floor_ref_n", "mhat_l1_max", "mhat_k_max", "mhat_ref_n",
                   "monotone_mult", "rate_rel_tol", "xi_J") if ("checks", k) in values}
    sim = {k: v for (s, k), v in values.items() if s == "simulation"}
    kwargs = dict(params=params, tolerance=TolerancePolicy(**tol_kwargs))
    kwargs.update(sim)
    if "jobs" not in kwargs:
        kwargs["jobs"] = os.cpu_count() or 1
    if ("checks", "enabled") in values:
        kwargs["enabled_checks"] = values[("checks", "enabled")]
    config = ExperimentConfig(**kwargs)
    return config, values.get(("output", "directory"))


def load_config(path) -> tuple:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))
