"""Separating-equilibrium strategies A(theta).

Three routes, in order of preference:

* closed form for isoelastic environments with power difficulty;
* for any multiplicative cost, D(A(theta)) = s * int_0^theta B'(t)/S(t) dt by
  cumulative quadrature, then A = D^{-1};
* for non-multiplicative costs, the first-order condition
  A'(theta) = V'(theta) / C_a(A(theta), theta) integrated from a seed point
  just above the singular boundary.

None of them takes a type distribution: the strategy depends on the type
support only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .environment import (
    Environment,
    Isoelastic,
    PowerDifficulty,
    PowerOfCdf,
    PowerStrain,
    MixedIsoelastic,
    TypeDomain,
    eval_cost,
)
from .errors import DomainError, SingularityError, SignalingError
from .quadrature import DEFAULT_RTOL, cumulative_integral
from .rootfind import invert_increasing

ODE_RTOL = 1e-9
MIN_MARGINAL_COST = 1e-14
# dense output of long DOP853 steps drifts ~1e-6; cap steps in ln(theta)
MAX_LOG_STEP = 0.05


class Provenance(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    INTEGRAL = "integral"
    ODE = "ode"


class Strategy:
    """Tabulated separating strategy with monotone interpolation.

    Interpolation is piecewise-cubic Hermite (monotone) in (ln theta, ln A),
    which reproduces power laws exactly; outside the grid the two end knots
    are extended as a power law, and A(0) = 0.
    """

    def __init__(self, theta, actions, provenance=Provenance.INTEGRAL, integral=None):
        self.theta = np.asarray(theta, dtype=float)
        self.actions = np.asarray(actions, dtype=float)
        self.provenance = Provenance(provenance)
        self.integral = None if integral is None else np.asarray(integral, dtype=float)
        if self.theta.shape != self.actions.shape or self.theta.size < 2:
            raise ValueError("theta and actions must be equal-length arrays (>= 2)")
        if not np.all(np.isfinite(self.actions)):
            raise SignalingError("strategy has non-finite actions")
        if np.any(self.actions <= 0) or np.any(self.theta <= 0):
            raise SignalingError("tabulated strategy must be positive on a positive grid")
        self._lt = np.log(self.theta)
        self._la = np.log(self.actions)
        self._interp = PchipInterpolator(self._lt, self._la, extrapolate=False)

    def __repr__(self):
        return f"Strategy(n={self.theta.size}, provenance={self.provenance.value})"

    @property
    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.actions) > 0))

    def _edge(self, lt, i, j):
        slope = (self._la[j] - self._la[i]) / (self._lt[j] - self._lt[i])
        return self._la[i] + slope * (lt - self._lt[i])

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        pos = theta > 0
        lt = np.log(np.where(pos, theta, 1.0))
        la = self._interp(lt)
        la = np.where(lt < self._lt[0], self._edge(lt, 0, 1), la)
        la = np.where(lt > self._lt[-1], self._edge(lt, -1, -2), la)
        out = np.where(pos, np.exp(la), 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass
class EquilibriumCostCurve:
    theta: np.ndarray
    values: np.ndarray


# ---------------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------------


def closed_form_isoelastic(s, beta, sigma, gamma, theta):
    """Equilibrium (action, cost) for V = s*theta**beta, C = a**gamma * theta**-sigma.

    >>> closed_form_isoelastic(2, 1, 1, 2, 1.0)
    (1.0, 1.0)
    """
    if min(s, beta, sigma, gamma) <= 0:
        raise DomainError("parameters must be positive")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0):
        raise DomainError("type must be nonnegative")
    scale = s * beta / (beta + sigma)
    action = scale ** (1.0 / gamma) * theta ** ((beta + sigma) / gamma)
    cost = scale * theta**beta
    if theta.ndim == 0:
        return float(action), float(cost)
    return action, cost


def isoelastic_parameters(env: Environment):
    """(s, beta, sigma, gamma) if ``env`` is isoelastic with power difficulty, else None."""
    shape = env.benefit.shape
    cost = env.cost
    if not isinstance(shape, (Isoelastic, PowerOfCdf)) or not env.multiplicative:
        return None
    if not isinstance(cost.difficulty, PowerDifficulty) or not isinstance(cost.strain, PowerStrain):
        return None
    return env.benefit.stakes, shape.elasticity, cost.strain.sigma, cost.difficulty.gamma


def closed_form_strategy(env: Environment, domain: TypeDomain | None = None) -> Strategy:
    params = isoelastic_parameters(env)
    if params is None:
        raise DomainError("closed form needs an isoelastic environment with power difficulty")
    grid = (domain or TypeDomain(env.theta_bar)).grid
    action, _ = closed_form_isoelastic(*params, grid)
    s, beta, sigma, _ = params
    integral = s * beta / (beta + sigma) * grid ** (beta + sigma)
    return Strategy(grid, action, Provenance.CLOSED_FORM, integral=integral)


# ---------------------------------------------------------------------------
# Integral route (multiplicative costs)
# ---------------------------------------------------------------------------


def _require_multiplicative(env):
    if not env.multiplicative:
        raise DomainError("this route needs a multiplicative cost D(a) * S(theta)")


def signaling_integrand(env: Environment):
    """t -> s * B'(t) / S(t)."""
    _require_multiplicative(env)
    strain = env.cost.strain
    return lambda t: env.benefit.derivative(t) / strain.value(t)


def solve_multiplicative(env: Environment, domain: TypeDomain | None = None,
                         rtol: float = DEFAULT_RTOL) -> Strategy:
    """Solve D(A(theta)) = s * int_0^theta B'/S on the domain grid.

    Raises QuadratureError if the integrand is not integrable at 0 and
    InversionError if a tabulated D cannot be inverted.
    """
    _require_multiplicative(env)
    domain = domain or TypeDomain(env.theta_bar)
    grid = env._check_types(domain.grid)
    integral = cumulative_integral(signaling_integrand(env), grid, rtol)
    actions = np.asarray(env.cost.difficulty.inverse(integral), dtype=float)
    return Strategy(grid, actions, Provenance.INTEGRAL, integral=integral)


# ---------------------------------------------------------------------------
# ODE route
# ---------------------------------------------------------------------------


def fit_power_law(theta, actions):
    """Fit A = c * theta**p through two points; returns (c, p)."""
    (t0, t1), (a0, a1) = theta, actions
    p = np.log(a1 / a0) / np.log(t1 / t0)
    return a0 / t0**p, p


def ansatz_exponent(env: Environment) -> float:
    """Power p of the known A = c * theta**p solution for the built-in
    non-multiplicative families (1 for the linear-benefit examples)."""
    cost = env.cost
    shape = env.benefit.shape
    if isinstance(cost, MixedIsoelastic) and isinstance(shape, (Isoelastic, PowerOfCdf)):
        return (shape.elasticity + cost.sigmas[0]) / cost.gammas[0]
    return 1.0


def default_seed(env: Environment, grid) -> tuple[float, float]:
    """Seed (theta_0, A(theta_0)) at the first grid point.

    Multiplicative costs: power law fitted to a two-point quadrature
    bootstrap.  Otherwise: the power-law ansatz A = c * theta**p with c chosen
    so the first-order condition holds exactly at theta_0.
    """
    grid = np.asarray(grid, dtype=float)
    t0 = float(grid[0])
    if env.multiplicative:
        integral = cumulative_integral(signaling_integrand(env), grid[:2])
        actions = env.cost.difficulty.inverse(integral)
        c, p = fit_power_law(grid[:2], actions)
        return t0, float(c * t0**p)
    p = ansatz_exponent(env)
    vprime = float(env.benefit.derivative(t0))

    def foc(c):
        c_a, _ = env.cost.partials(c * t0**p, t0)
        return float(c_a) * c * p * t0 ** (p - 1.0)

    c = invert_increasing(foc, vprime, 1e-9, 10.0, rtol=1e-15, expand=True)
    return t0, float(c * t0**p)


def solve_ode(env: Environment, domain: TypeDomain | None = None,
              theta_start: float | None = None, action_start: float | None = None,
              rtol: float = ODE_RTOL) -> Strategy:
    """Integrate A' = V'(theta) / C_a(A, theta) upward from a seed point.

    The equation is integrated in logarithmic variables,
    d ln A / d ln theta = theta V'(theta) / (A C_a(A, theta)),
    with an adaptive 8th-order Runge-Kutta scheme.  The returned strategy
    covers the grid points at or above ``theta_start``.

    Raises SingularityError when seeded on the boundary (A = 0 or theta = 0)
    or when C_a falls below 1e-14 along the path.
    """
    domain = domain or TypeDomain(env.theta_bar)
    grid = env._check_types(domain.grid)
    if theta_start is None and action_start is None:
        theta_start, action_start = default_seed(env, grid)
    elif theta_start is None or action_start is None:
        raise ValueError("give both theta_start and action_start, or neither")
    if not theta_start > 0 or not action_start > 0:
        raise SingularityError(
            "marginal cost is undefined at the boundary; seed strictly inside (A > 0, theta > 0)"
        )
    c_a0, _ = env.cost.partials(action_start, theta_start)
    if not np.isfinite(c_a0) or c_a0 < MIN_MARGINAL_COST:
        raise SingularityError(f"C_a = {c_a0!r} at the seed point")

    def rhs(u, y):
        theta = np.exp(u)
        a = np.exp(y[0])
        c_a, _ = env.cost.partials(a, theta)
        if not np.isfinite(c_a) or c_a < MIN_MARGINAL_COST:
            raise SingularityError(f"C_a = {c_a!r} at theta = {theta:.6g}")
        return [theta * env.benefit.derivative(theta) / (a * c_a)]

    ahead = grid[grid > theta_start * (1 + 1e-14)]
    thetas = np.concatenate([[theta_start], ahead])
    if ahead.size == 0:
        raise DomainError("theta_start lies above the whole grid")
    u = np.log(thetas)
    sol = solve_ivp(rhs, (u[0], u[-1]), [np.log(action_start)], method="DOP853",
                    t_eval=u, rtol=rtol, atol=rtol, max_step=MAX_LOG_STEP)
    if not sol.success:
        raise SignalingError(f"ODE integration failed: {sol.message}")
    return Strategy(thetas, np.exp(sol.y[0]), Provenance.ODE)


def solve(env: Environment, domain: TypeDomain | None = None, method: str = "auto",
          tol: float = DEFAULT_RTOL) -> Strategy:
    """Dispatch to a solver: ``auto`` prefers closed form, then integral, then ODE.

    ``tol`` is the quadrature tolerance of the integral route.
    """
    if method == "auto":
        if isoelastic_parameters(env) is not None:
            method = "closed_form"
        elif env.multiplicative:
            method = "integral"
        else:
            method = "ode"
    if method == "closed_form":
        return closed_form_strategy(env, domain)
    if method == "integral":
        return solve_multiplicative(env, domain, tol)
    if method == "ode":
        return solve_ode(env, domain)
    raise ValueError(f"unknown method {method!r}")


def equilibrium_cost(env: Environment, strategy: Strategy) -> EquilibriumCostCurve:
    """Pointwise C(A(theta_i), theta_i) along the strategy grid."""
    return EquilibriumCostCurve(strategy.theta, eval_cost(env, strategy.actions, strategy.theta))
