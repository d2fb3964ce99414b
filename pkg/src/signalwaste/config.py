"""Run configuration: a YAML (or JSON) document mapped onto an Environment.

Schema::

    benefit:
      stakes: 1.0
      shape: isoelastic        # isoelastic | power_of_cdf | tabulated
      beta: 1.0                # isoelastic
      n: 3                     # power_of_cdf
      k: 1.0                   # power_of_cdf
      theta: [...]             # tabulated
      values: [...]            # tabulated
    cost:
      variant: multiplicative  # multiplicative | quadcubic | ratio | mixed
      difficulty: power        # power | tabulated        (multiplicative)
      gamma: 1.0               # number, or list for mixed
      difficulty_table: {a: [...], values: [...]}
      strain: power            # power | exponential | tabulated
      sigma: 1.0               # number, or list for mixed
      strain_table: {theta: [...], values: [...]}
      weights: [1.0, 1.0]      # mixed
    domain:
      theta_bar: 1.0
      grid_points: 1024
    solver:
      method: auto             # auto | closed_form | integral | ode
      tol: 1.0e-12
    output:
      path: null
      precision: 12
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import environment as E


class ConfigError(ValueError):
    """The configuration document is malformed."""


def _num(block, key, default=None, kind=float):
    value = block.get(key, default)
    if value is None:
        raise ConfigError(f"missing key {key!r}")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} must be a {kind.__name__}, got {value!r}") from None


def _list(block, key):
    value = block.get(key)
    if value is None:
        raise ConfigError(f"missing key {key!r}")
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} must be a list of numbers") from None


def _table(block, key, xname):
    t = block.get(key)
    if not isinstance(t, dict):
        raise ConfigError(f"missing table {key!r} with keys {xname!r} and 'values'")
    return _list(t, xname), _list(t, "values")


def parse_benefit(block) -> E.BenefitSpec:
    shape = str(block.get("shape", "isoelastic")).lower()
    stakes = _num(block, "stakes", 1.0)
    if shape == "isoelastic":
        b = E.Isoelastic(_num(block, "beta"))
    elif shape == "power_of_cdf":
        b = E.PowerOfCdf(_num(block, "n", kind=int), _num(block, "k", 1.0))
    elif shape == "tabulated":
        b = E.TabulatedBenefit(_list(block, "theta"), _list(block, "values"))
    else:
        raise ConfigError(f"unknown benefit.shape {shape!r}")
    return E.BenefitSpec(stakes, b)


def parse_cost(block):
    variant = str(block.get("variant", "multiplicative")).lower()
    if variant == "quadcubic":
        return E.QuadCubic()
    if variant == "ratio":
        return E.RatioCost()
    if variant == "mixed":
        return E.MixedIsoelastic(_list(block, "weights"), _list(block, "gamma"), _list(block, "sigma"))
    if variant != "multiplicative":
        raise ConfigError(f"unknown cost.variant {variant!r}")

    dkind = str(block.get("difficulty", "power")).lower()
    if dkind == "power":
        difficulty = E.PowerDifficulty(_num(block, "gamma", 1.0))
    elif dkind == "tabulated":
        difficulty = E.TabulatedDifficulty(*_table(block, "difficulty_table", "a"))
    else:
        raise ConfigError(f"unknown cost.difficulty {dkind!r}")

    skind = str(block.get("strain", "power")).lower()
    if skind == "power":
        strain = E.PowerStrain(_num(block, "sigma", 1.0))
    elif skind == "exponential":
        strain = E.ExponentialStrain()
    elif skind == "tabulated":
        strain = E.TabulatedStrain(*_table(block, "strain_table", "theta"))
    else:
        raise ConfigError(f"unknown cost.strain {skind!r}")
    return E.Multiplicative(difficulty, strain)


@dataclass
class RunConfig:
    environment: E.Environment
    domain: E.TypeDomain
    method: str = "auto"
    tol: float = 1e-12
    output_path: str | None = None
    precision: int = 12
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigError("solver.tol must be positive")
        if self.domain.points is None and self.domain.grid_points < 64:
            raise ConfigError("domain.grid_points must be >= 64")
        if self.precision < 1:
            raise ConfigError("output.precision must be positive")


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    try:
        benefit = parse_benefit(doc.get("benefit") or {})
        cost = parse_cost(doc.get("cost") or {})
        dom = doc.get("domain") or {}
        theta_bar = _num(dom, "theta_bar", E.DEFAULT_THETA_BAR)
        domain = E.TypeDomain(theta_bar, _num(dom, "grid_points", E.DEFAULT_GRID_POINTS, int))
        solver = doc.get("solver") or {}
        out = doc.get("output") or {}
        method = str(solver.get("method", "auto"))
        if method not in ("auto", "closed_form", "integral", "ode"):
            raise ConfigError(f"unknown solver.method {method!r}")
        return RunConfig(
            environment=E.Environment(benefit, cost, theta_bar),
            domain=domain,
            method=method,
            tol=_num(solver, "tol", 1e-12),
            output_path=out.get("path"),
            precision=_num(out, "precision", 12, int),
            raw=doc,
        )
    except E.DomainError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or type(exc).__name__
        raise ConfigError(f"cannot parse {path}{where}: {problem}") from None
    return parse_config(doc)
