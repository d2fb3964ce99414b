"""Waste ratio W(theta) = C(A(theta), theta) / V(theta) and its diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .environment import (
    Environment,
    Isoelastic,
    PowerDifficulty,
    PowerOfCdf,
    TypeDomain,
    eval_benefit,
    eval_cost,
    eval_cost_partials,
)
from .equilibrium import Strategy, equilibrium_cost, signaling_integrand, solve_multiplicative
from .errors import DomainError
from .quadrature import cumulative_integral

CONSTANCY_TOL = 1e-6


def waste_isoelastic(beta: float, sigma: float) -> float:
    """beta / (beta + sigma); the same for every type, stake and difficulty."""
    if not (beta > 0 and sigma > 0):
        raise DomainError("beta and sigma must be positive")
    return beta / (beta + sigma)


def waste_ratio(env: Environment, strategy: Strategy, theta):
    """C(A(theta), theta) / V(theta) for theta > 0."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("waste ratio is undefined at theta = 0")
    w = eval_cost(env, strategy(theta), theta) / eval_benefit(env, theta)
    return float(w) if np.ndim(w) == 0 else w


def waste_integral_multiplicative(env: Environment, theta):
    """W(theta) = S(theta)/B(theta) * int_0^theta B'/S, with no strategy or D.

    Only the benefit shape and strain of ``env`` are used.
    """
    if not env.multiplicative:
        raise DomainError("integral waste formula needs a multiplicative cost")
    scalar = np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(theta <= 0):
        raise DomainError("waste ratio is undefined at theta = 0")
    order = np.argsort(theta)
    sorted_t = theta[order]
    # de-duplicate for the strictly increasing quadrature grid
    uniq, inverse = np.unique(sorted_t, return_inverse=True)
    integral = cumulative_integral(signaling_integrand(env), uniq)[inverse]
    out = np.empty_like(theta)
    out[order] = env.cost.strain.value(sorted_t) * integral / env.benefit.value(sorted_t)
    return float(out[0]) if scalar else out


@dataclass
class WasteProfile:
    theta: np.ndarray
    values: np.ndarray
    tol: float = CONSTANCY_TOL

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def spread(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    @property
    def is_constant(self) -> bool:
        return self.spread <= self.tol


def waste_profile(env: Environment, strategy: Strategy) -> WasteProfile:
    """W on the strategy grid.

    For multiplicative costs the first grid point uses the integral formula
    instead of a ratio of two tiny solver outputs.
    """
    theta = strategy.theta
    values = equilibrium_cost(env, strategy).values / env.benefit.value(theta)
    if env.multiplicative:
        values[0] = waste_integral_multiplicative(env, theta[0])
    return WasteProfile(theta, values)


# ---------------------------------------------------------------------------
# Relative elasticity and the constant-waste characterization
# ---------------------------------------------------------------------------


def relative_elasticity(env: Environment, theta):
    """rho(theta) = -(S'/S) * (V/V'), i.e. -d ln S / d ln V."""
    if not env.multiplicative:
        raise DomainError("relative elasticity is defined for multiplicative costs")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("relative elasticity needs theta > 0")
    vprime = env.benefit.derivative(theta)
    if np.any(vprime == 0):
        raise DomainError("V' vanishes")
    shape = env.benefit.shape
    if isinstance(shape, (Isoelastic, PowerOfCdf)):
        v_over_vprime = theta / shape.elasticity
    else:
        v_over_vprime = env.benefit.value(theta) / vprime
    rho = -env.cost.strain.log_derivative(theta) * v_over_vprime
    return float(rho) if np.ndim(rho) == 0 else rho


@dataclass
class ElasticityProfile:
    theta: np.ndarray
    values: np.ndarray
    tol: float = CONSTANCY_TOL

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def spread(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    @property
    def is_constant(self) -> bool:
        return self.spread <= self.tol


@dataclass
class CharacterizationReport:
    waste: WasteProfile
    elasticity: ElasticityProfile

    @property
    def waste_constant(self) -> bool:
        return self.waste.is_constant

    @property
    def elasticity_constant(self) -> bool:
        return self.elasticity.is_constant

    @property
    def consistent(self) -> bool:
        """Both flags agree (constant waste iff constant relative elasticity)."""
        return self.waste_constant == self.elasticity_constant

    @property
    def predicted_waste(self) -> float:
        return 1.0 / (1.0 + self.elasticity.mean)

    @property
    def formula_error(self) -> float:
        """max |W(theta) - 1/(1 + mean rho)| over the grid."""
        return float(np.max(np.abs(self.waste.values - self.predicted_waste)))


def check_constant_waste(env: Environment, domain: TypeDomain | None = None) -> CharacterizationReport:
    domain = domain or TypeDomain(env.theta_bar)
    strategy = solve_multiplicative(env, domain)
    grid = strategy.theta
    return CharacterizationReport(
        waste_profile(env, strategy),
        ElasticityProfile(grid, relative_elasticity(env, grid)),
    )


# ---------------------------------------------------------------------------
# Invariance to stakes and difficulty
# ---------------------------------------------------------------------------


@dataclass
class InvarianceReport:
    stakes: list
    gammas: list
    theta: np.ndarray
    waste: np.ndarray  # (len(stakes), len(gammas), grid)
    actions: np.ndarray
    costs: np.ndarray
    deviation: np.ndarray = field(init=False)

    def __post_init__(self):
        flat = self.waste.reshape(-1, self.theta.size)
        self.deviation = flat.max(axis=0) - flat.min(axis=0)

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())

    @property
    def action_range_ratio(self) -> float:
        """Largest over smallest max|A| across the sweep."""
        peaks = self.actions.max(axis=-1)
        return float(peaks.max() / peaks.min())


def with_stakes_and_gamma(env: Environment, stakes: float, gamma: float) -> Environment:
    if not env.multiplicative:
        raise DomainError("sweep needs a multiplicative cost")
    cost = replace(env.cost, difficulty=PowerDifficulty(gamma))
    return replace(env, benefit=replace(env.benefit, stakes=stakes), cost=cost)


def invariance_sweep(env: Environment, stakes, gammas, domain: TypeDomain | None = None) -> InvarianceReport:
    """Solve for every (stakes, gamma) pair; D(a) = a**gamma replaces env's D."""
    domain = domain or TypeDomain(env.theta_bar)
    waste, actions, costs = [], [], []
    for s in stakes:
        row_w, row_a, row_c = [], [], []
        for g in gammas:
            e = with_stakes_and_gamma(env, s, g)
            strategy = solve_multiplicative(e, domain)
            row_w.append(waste_profile(e, strategy).values)
            row_a.append(strategy.actions)
            row_c.append(equilibrium_cost(e, strategy).values)
        waste.append(row_w)
        actions.append(row_a)
        costs.append(row_c)
    return InvarianceReport(list(stakes), list(gammas), domain.grid,
                            np.array(waste), np.array(actions), np.array(costs))


# ---------------------------------------------------------------------------
# Envelope condition
# ---------------------------------------------------------------------------


def log_derivative_5pt(values, theta):
    """dU/dtheta on a log-uniform grid by the fourth-order 5-point stencil in ln theta.

    Returns NaN on the two points at each end.
    """
    u = np.log(theta)
    h = np.diff(u)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("5-point stencil needs a log-uniform grid")
    h = h[0]
    d = np.full(values.shape, np.nan)
    d[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    return d / theta


@dataclass
class EnvelopeReport:
    theta: np.ndarray
    numeric: np.ndarray
    analytic: np.ndarray

    @property
    def relative_error(self) -> np.ndarray:
        return np.abs(self.numeric / self.analytic - 1.0)

    @property
    def max_relative_error(self) -> float:
        return float(np.max(self.relative_error))


def envelope_check(env: Environment, strategy: Strategy, theta_min: float = 1e-3) -> EnvelopeReport:
    """Compare numerical dU/dtheta with -C_theta(A(theta), theta).

    U = V - C(A, theta) is differentiated along the strategy grid.  Types
    below ``theta_min`` are skipped: there U is a difference of nearly equal
    numbers for some environments.
    """
    theta = strategy.theta
    utility = env.benefit.value(theta) - eval_cost(env, strategy.actions, theta)
    numeric = log_derivative_5pt(utility, theta)
    _, c_t = eval_cost_partials(env, strategy.actions, theta)
    keep = np.isfinite(numeric) & (theta >= theta_min)
    return EnvelopeReport(theta[keep], numeric[keep], -c_t[keep])
