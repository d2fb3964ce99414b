"""Signaling environments: benefit V = s * B(theta) and cost C(a, theta).

Every family evaluates on numpy arrays (broadcasting ``a`` against ``theta``)
and exposes analytic first derivatives where it has them.  Tabulated pieces
are interpolated with monotone piecewise cubics and differentiated by
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

DEFAULT_THETA_BAR = 1.0
DEFAULT_GRID_POINTS = 1024
GRID_LOWER_RATIO = 1e-6


def _fd_step(x):
    return np.maximum(1e-6, 1e-6 * np.abs(x))


def finite_difference(f, x):
    """Central difference of ``f`` at ``x``; one-sided where x - h < 0."""
    x = np.asarray(x, dtype=float)
    h = _fd_step(x)
    lo = np.where(x - h < 0.0, x, x - h)
    hi = x + h
    return (f(hi) - f(lo)) / (hi - lo)


def _table(x, y, name):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 2:
        raise ValueError(f"{name}: need two 1-d arrays of equal length >= 2")
    if np.any(np.diff(x) <= 0):
        raise ValueError(f"{name}: abscissae must be strictly increasing")
    return x, y


# --------------------------------------------------------------------------
# Benefit shapes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Isoelastic:
    """B(theta) = theta**beta."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be positive")

    def value(self, theta):
        return np.power(theta, self.beta)

    def derivative(self, theta):
        return self.beta * np.power(theta, self.beta - 1.0)

    @property
    def elasticity(self) -> float:
        return self.beta


@dataclass(frozen=True)
class PowerOfCdf:
    """B(theta) = F(theta)**(n - 1) with F(theta) = theta**k on [0, 1].

    This is a winner-take-all prize probability; it is isoelastic with
    elasticity k * (n - 1).
    """

    n: int
    k: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if not self.k > 0:
            raise DomainError("k must be positive")

    @property
    def elasticity(self) -> float:
        return self.k * (self.n - 1)

    def value(self, theta):
        return np.power(theta, self.elasticity)

    def derivative(self, theta):
        e = self.elasticity
        return e * np.power(theta, e - 1.0)


@dataclass(frozen=True)
class TabulatedBenefit:
    """B given on a grid of (theta, B(theta)) pairs."""

    theta: tuple
    values: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, y = _table(self.theta, self.values, "TabulatedBenefit")
        object.__setattr__(self, "theta", tuple(x))
        object.__setattr__(self, "values", tuple(y))
        object.__setattr__(self, "_interp", PchipInterpolator(x, y, extrapolate=True))

    def value(self, theta):
        return self._interp(theta)

    def derivative(self, theta):
        return finite_difference(self._interp, theta)

    elasticity = None


BenefitShape = Union[Isoelastic, PowerOfCdf, TabulatedBenefit]


@dataclass(frozen=True)
class BenefitSpec:
    """V(theta) = stakes * B(theta)."""

    stakes: float
    shape: BenefitShape

    def __post_init__(self):
        if not self.stakes > 0:
            raise DomainError("stakes must be positive")

    def value(self, theta):
        return self.stakes * self.shape.value(theta)

    def derivative(self, theta):
        return self.stakes * self.shape.derivative(theta)


# --------------------------------------------------------------------------
# Multiplicative cost pieces: difficulty D(a) and strain S(theta)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerDifficulty:
    """D(a) = a**gamma."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")

    def value(self, a):
        return np.power(a, self.gamma)

    def derivative(self, a):
        return self.gamma * np.power(a, self.gamma - 1.0)

    def inverse(self, y):
        return np.power(y, 1.0 / self.gamma)


@dataclass(frozen=True)
class TabulatedDifficulty:
    """Monotone D given on a grid of (a, D(a)) pairs; inverted by bracketed root finding."""

    a: tuple
    values: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, y = _table(self.a, self.values, "TabulatedDifficulty")
        if np.any(np.diff(y) <= 0):
            raise ValueError("TabulatedDifficulty: values must be strictly increasing")
        object.__setattr__(self, "a", tuple(x))
        object.__setattr__(self, "values", tuple(y))
        object.__setattr__(self, "_interp", PchipInterpolator(x, y, extrapolate=True))

    def value(self, a):
        return self._interp(a)

    def derivative(self, a):
        return finite_difference(self._interp, a)

    def inverse(self, y):
        from .rootfind import invert_increasing

        y = np.asarray(y, dtype=float)
        lo, hi = self.a[0], self.a[-1]
        out = np.array(
            [invert_increasing(self._interp, t, lo, hi, rtol=1e-10) for t in y.ravel()]
        )
        return out.reshape(y.shape) if y.ndim else float(out[0])


@dataclass(frozen=True)
class PowerStrain:
    """S(theta) = theta**(-sigma); infinite at theta = 0."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    def value(self, theta):
        with np.errstate(divide="ignore", over="ignore"):
            return np.power(np.asarray(theta, dtype=float), -self.sigma)

    def derivative(self, theta):
        with np.errstate(divide="ignore", over="ignore"):
            return -self.sigma * np.power(np.asarray(theta, dtype=float), -self.sigma - 1.0)

    def log_derivative(self, theta):
        """d ln S / d theta."""
        return -self.sigma / np.asarray(theta, dtype=float)


@dataclass(frozen=True)
class ExponentialStrain:
    """S(theta) = exp(-theta)."""

    def value(self, theta):
        return np.exp(-np.asarray(theta, dtype=float))

    def derivative(self, theta):
        return -np.exp(-np.asarray(theta, dtype=float))

    def log_derivative(self, theta):
        return -np.ones_like(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class TabulatedStrain:
    """Decreasing positive S given on a grid of (theta, S(theta)) pairs."""

    theta: tuple
    values: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, y = _table(self.theta, self.values, "TabulatedStrain")
        object.__setattr__(self, "theta", tuple(x))
        object.__setattr__(self, "values", tuple(y))
        object.__setattr__(self, "_interp", PchipInterpolator(x, y, extrapolate=True))

    def value(self, theta):
        return self._interp(theta)

    def derivative(self, theta):
        return finite_difference(self._interp, theta)

    def log_derivative(self, theta):
        return self.derivative(theta) / self.value(theta)


DifficultySpec = Union[PowerDifficulty, TabulatedDifficulty]
StrainSpec = Union[PowerStrain, ExponentialStrain, TabulatedStrain]


# --------------------------------------------------------------------------
# Cost families
# --------------------------------------------------------------------------


def _zero_action(a, value):
    # 0 * inf = 0: the zero action is free even for a type with infinite strain
    return np.where(a == 0.0, 0.0, value)


@dataclass(frozen=True)
class Multiplicative:
    """C(a, theta) = D(a) * S(theta)."""

    difficulty: DifficultySpec
    strain: StrainSpec

    multiplicative = True

    def value(self, a, theta):
        a, theta = np.broadcast_arrays(np.asarray(a, float), np.asarray(theta, float))
        with np.errstate(invalid="ignore"):
            return _zero_action(a, self.difficulty.value(a) * self.strain.value(theta))

    def partials(self, a, theta):
        c_a = self.difficulty.derivative(a) * self.strain.value(theta)
        c_t = self.difficulty.value(a) * self.strain.derivative(theta)
        return c_a, c_t


@dataclass(frozen=True)
class QuadCubic:
    """C(a, theta) = a**2 / theta + a**3 / theta**2."""

    multiplicative = False

    def value(self, a, theta):
        a, theta = np.broadcast_arrays(np.asarray(a, float), np.asarray(theta, float))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _zero_action(a, a**2 / theta + a**3 / theta**2)

    def partials(self, a, theta):
        c_a = 2.0 * a / theta + 3.0 * a**2 / theta**2
        c_t = -(a**2) / theta**2 - 2.0 * a**3 / theta**3
        return c_a, c_t


@dataclass(frozen=True)
class RatioCost:
    """C(a, theta) = a**2 / (theta + a)."""

    multiplicative = False

    def value(self, a, theta):
        a, theta = np.broadcast_arrays(np.asarray(a, float), np.asarray(theta, float))
        with np.errstate(invalid="ignore"):
            return _zero_action(a, a**2 / (theta + a))

    def partials(self, a, theta):
        c_a = a * (a + 2.0 * theta) / (theta + a) ** 2
        c_t = -(a**2) / (theta + a) ** 2
        return c_a, c_t


@dataclass(frozen=True)
class MixedIsoelastic:
    """C(a, theta) = sum_i w_i * a**gamma_i * theta**(-sigma_i)."""

    weights: tuple
    gammas: tuple
    sigmas: tuple

    multiplicative = False

    def __post_init__(self):
        w, g, s = (tuple(float(x) for x in v) for v in (self.weights, self.gammas, self.sigmas))
        if not (len(w) == len(g) == len(s)) or not w:
            raise ValueError("weights, gammas and sigmas must have equal nonzero length")
        if min(w + g + s) <= 0:
            raise DomainError("weights, gammas and sigmas must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "sigmas", s)

    def _terms(self):
        return zip(self.weights, self.gammas, self.sigmas)

    def value(self, a, theta):
        a, theta = np.broadcast_arrays(np.asarray(a, float), np.asarray(theta, float))
        total = np.zeros(a.shape)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for w, g, s in self._terms():
                total = total + w * np.power(a, g) * np.power(theta, -s)
        return _zero_action(a, total)

    def partials(self, a, theta):
        c_a = 0.0
        c_t = 0.0
        for w, g, s in self._terms():
            c_a = c_a + w * g * np.power(a, g - 1.0) * np.power(theta, -s)
            c_t = c_t - w * s * np.power(a, g) * np.power(theta, -s - 1.0)
        return c_a, c_t


CostSpec = Union[Multiplicative, QuadCubic, RatioCost, MixedIsoelastic]


# --------------------------------------------------------------------------
# Environment and type domain
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeDomain:
    """Type support [0, theta_bar] and the evaluation grid on it.

    The default grid has ``grid_points`` log-spaced types from
    ``theta_bar * 1e-6`` to ``theta_bar``.  An explicit ``points`` array
    overrides it.
    """

    theta_bar: float = DEFAULT_THETA_BAR
    grid_points: int = DEFAULT_GRID_POINTS
    points: tuple | None = None

    def __post_init__(self):
        if not self.theta_bar > 0:
            raise DomainError("theta_bar must be positive")
        if self.points is not None:
            p = np.asarray(self.points, dtype=float)
            if p.ndim != 1 or p.size < 2 or p[0] <= 0 or np.any(np.diff(p) <= 0):
                raise DomainError("grid must be strictly increasing and start above 0")
            if p[-1] > self.theta_bar * (1 + 1e-12):
                raise DomainError("grid exceeds theta_bar")
            object.__setattr__(self, "points", tuple(p))
        elif self.grid_points < 2:
            raise DomainError("grid_points must be >= 2")

    @property
    def unbounded(self) -> bool:
        return np.isinf(self.theta_bar)

    @property
    def grid(self) -> np.ndarray:
        if self.points is not None:
            return np.array(self.points)
        if self.unbounded:
            raise DomainError("grid-based solving needs a finite theta_bar")
        return np.geomspace(self.theta_bar * GRID_LOWER_RATIO, self.theta_bar, self.grid_points)


@dataclass(frozen=True)
class Environment:
    benefit: BenefitSpec
    cost: CostSpec
    theta_bar: float = DEFAULT_THETA_BAR

    @property
    def multiplicative(self) -> bool:
        return self.cost.multiplicative

    def _check_types(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0) or np.any(theta > self.theta_bar) or np.any(np.isnan(theta)):
            raise DomainError(f"type outside [0, {self.theta_bar}]")
        return theta


def isoelastic_environment(
    stakes: float = 1.0,
    beta: float = 1.0,
    sigma: float = 1.0,
    gamma: float = 1.0,
    theta_bar: float = DEFAULT_THETA_BAR,
) -> Environment:
    """V = s * theta**beta, C = a**gamma * theta**(-sigma)."""
    return Environment(
        BenefitSpec(stakes, Isoelastic(beta)),
        Multiplicative(PowerDifficulty(gamma), PowerStrain(sigma)),
        theta_bar,
    )


def eval_benefit(env: Environment, theta):
    """V(theta) = s * B(theta)."""
    theta = env._check_types(theta)
    out = env.benefit.value(theta)
    return float(out) if np.ndim(out) == 0 else out


def eval_benefit_derivative(env: Environment, theta):
    theta = env._check_types(theta)
    out = env.benefit.derivative(theta)
    return float(out) if np.ndim(out) == 0 else out


def eval_cost(env: Environment, a, theta):
    """C(a, theta), with C(0, theta) = 0 and +inf for a > 0 at a singular type."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0) or np.any(np.isnan(a)):
        raise DomainError("action must be nonnegative")
    theta = env._check_types(theta)
    out = env.cost.value(a, theta)
    out = np.where(np.isnan(out), np.inf, out)
    return float(out) if np.ndim(out) == 0 else out


def eval_cost_partials(env: Environment, a, theta):
    """Return (C_a, C_theta) on the open quadrant a > 0, theta > 0."""
    a = np.asarray(a, dtype=float)
    theta = env._check_types(theta)
    if np.any(a <= 0) or np.any(theta <= 0):
        raise DomainError("partials are defined only for a > 0 and theta > 0")
    c_a, c_t = env.cost.partials(a, theta)
    if np.ndim(c_a) == 0:
        return float(c_a), float(c_t)
    return c_a, c_t


# --------------------------------------------------------------------------
# Assumption checks
# --------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_point: tuple | None = None
    worst_value: float | None = None


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _worst(name, values, points, bad):
    """Locate the worst value; ``bad`` maps values to a violation score."""
    score = bad(values)
    i = int(np.argmax(score))
    return CheckResult(name, bool(score[i] <= 0), tuple(float(p[i]) for p in points), float(values[i]))


def validate_assumptions(
    env: Environment,
    domain: TypeDomain | None = None,
    actions=None,
    max_types: int = 128,
) -> ValidationReport:
    """Check the standing assumptions on an (a, theta) product grid.

    Checks V(0) = 0, V' > 0, C(0, theta) = 0, C_a > 0 and C_a_theta < 0, the
    last by a central difference of the analytic C_a in theta.  Each entry of
    the report carries the worst point found.
    """
    domain = domain or TypeDomain(env.theta_bar)
    theta = domain.grid
    if theta.size > max_types:
        theta = theta[np.linspace(0, theta.size - 1, max_types).round().astype(int)]
    a = np.geomspace(1e-3, 10.0, 64) if actions is None else np.asarray(actions, float)
    aa, tt = np.meshgrid(a, theta, indexing="ij")
    aa, tt = aa.ravel(), tt.ravel()

    checks = []
    v0 = float(env.benefit.value(0.0))
    checks.append(CheckResult("benefit_zero_at_zero", v0 == 0.0, (0.0,), v0))
    vp = env.benefit.derivative(theta)
    checks.append(_worst("benefit_increasing", vp, (theta,), lambda v: -v))
    c0 = env.cost.value(np.zeros_like(theta), theta)
    checks.append(_worst("cost_zero_at_zero_action", c0, (theta,), np.abs))

    c_a, _ = env.cost.partials(aa, tt)
    checks.append(_worst("marginal_cost_positive", c_a, (aa, tt), lambda v: -v))

    h = 1e-4 * tt
    up, _ = env.cost.partials(aa, tt + h)
    dn, _ = env.cost.partials(aa, tt - h)
    cross = (up - dn) / (2.0 * h)
    checks.append(_worst("marginal_cost_decreasing_in_type", cross, (aa, tt), lambda v: v))
    return ValidationReport(checks)
