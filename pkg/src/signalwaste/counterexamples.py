"""Non-multiplicative costs whose waste is constant in type but moves with stakes.

* ``quadcubic``: V = s*theta, C = a**2/theta + a**3/theta**2.  A = c*theta with
  2c**2 + 3c**3 = s; W = (1 + c)/(2 + 3c) falls from 1/2 to 1/3 as s grows.
* ``ratio``: V = s*theta, C = a**2/(theta + a).  A = c*theta with
  s = c**2 (2 + c)/(1 + c)**2; W = (1 + c)/(2 + c) rises from 1/2 to 1.
* ``mixed``: V = s*theta**beta, C = sum_i w_i a**gamma_i theta**-sigma_i with
  (beta + sigma_i)/gamma_i = alpha for all i.  A = c*theta**alpha.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .environment import (
    BenefitSpec,
    Environment,
    Isoelastic,
    MixedIsoelastic,
    QuadCubic,
    RatioCost,
    TypeDomain,
)
from .equilibrium import solve_ode
from .errors import DomainError, RatioConditionError
from .ic_verify import verify_ic
from .rootfind import invert_increasing
from .waste import CONSTANCY_TOL, waste_profile

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientSolve:
    stakes: float
    c: float
    residual: float  # |lhs(c) - s| / max(1, s)


def _solve_coefficient(lhs, s: float) -> CoefficientSolve:
    if not s > 0:
        raise DomainError("stakes must be positive")
    c = invert_increasing(lhs, s, 1e-9, max(10.0, s), rtol=1e-15, expand=True)
    if lhs(1e-9) > s:  # root below the default bracket
        c = invert_increasing(lhs, s, 0.0, 1e-9, rtol=1e-15)
    # polish with a Newton step on the monotone map
    h = 1e-7 * c
    slope = (lhs(c + h) - lhs(c - h)) / (2 * h)
    if slope > 0:
        polished = c - (lhs(c) - s) / slope
        if abs(lhs(polished) - s) < abs(lhs(c) - s):
            c = polished
    return CoefficientSolve(s, c, abs(lhs(c) - s) / max(1.0, s))


def _quadcubic_lhs(c):
    return 2.0 * c**2 + 3.0 * c**3


def _ratio_lhs(c):
    return c**2 * (2.0 + c) / (1.0 + c) ** 2


def cubic_coefficient(s: float) -> CoefficientSolve:
    """Unique positive root of 2c**2 + 3c**3 = s."""
    return _solve_coefficient(_quadcubic_lhs, s)


def ratio_coefficient(s: float) -> CoefficientSolve:
    """Unique positive root of c**2 (2 + c) / (1 + c)**2 = s."""
    return _solve_coefficient(_ratio_lhs, s)


def waste_decreasing(s: float) -> float:
    c = cubic_coefficient(s).c
    return (1.0 + c) / (2.0 + 3.0 * c)


def waste_increasing(s: float) -> float:
    c = ratio_coefficient(s).c
    return (1.0 + c) / (2.0 + c)


@dataclass(frozen=True)
class MixedResult:
    alpha: float
    c: float
    waste: float
    residual: float


def mixed_isoelastic(weights, gammas, sigmas, beta: float, s: float) -> MixedResult:
    """Exponent alpha, coefficient c(s) and constant waste of a mixed isoelastic cost.

    c solves alpha * sum_i w_i gamma_i c**gamma_i = s * beta and the waste is
    (beta/alpha) * sum_i w_i c**gamma_i / sum_i w_i gamma_i c**gamma_i.  With all
    gamma_i equal the cost is isoelastic; the answer is still returned, with a
    warning.
    """
    w = np.asarray(weights, dtype=float)
    g = np.asarray(gammas, dtype=float)
    sig = np.asarray(sigmas, dtype=float)
    if not (w.shape == g.shape == sig.shape) or w.size == 0:
        raise ValueError("weights, gammas and sigmas must have equal nonzero length")
    if min(w.min(), g.min(), sig.min(), beta, s) <= 0:
        raise DomainError("all parameters must be positive")
    ratios = (beta + sig) / g
    alpha = float(ratios[0])
    if np.any(np.abs(ratios - alpha) > RESIDUAL_TOL * alpha):
        raise RatioConditionError(f"(beta + sigma_i)/gamma_i not constant: {ratios.tolist()}")
    if np.all(g == g[0]):
        warnings.warn("all gamma_i equal: the cost is isoelastic, waste is beta/(beta + sigma)",
                      stacklevel=2)

    def lhs(c):
        return alpha * float(np.sum(w * g * c**g))

    sol = _solve_coefficient(lhs, s * beta)
    c = sol.c
    waste = beta / alpha * float(np.sum(w * c**g)) / float(np.sum(w * g * c**g))
    return MixedResult(alpha, c, waste, sol.residual)


# ---------------------------------------------------------------------------
# Cross-checks against the ODE solver
# ---------------------------------------------------------------------------

FAMILIES = {
    "quadcubic": (QuadCubic, cubic_coefficient, waste_decreasing),
    "ratio": (RatioCost, ratio_coefficient, waste_increasing),
}


def family_environment(family: str, s: float, theta_bar: float = 1.0) -> Environment:
    try:
        cost_cls = FAMILIES[family][0]
    except KeyError:
        raise DomainError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return Environment(BenefitSpec(s, Isoelastic(1.0)), cost_cls(), theta_bar)


def mixed_environment(weights, gammas, sigmas, beta: float, s: float, theta_bar: float = 1.0) -> Environment:
    return Environment(BenefitSpec(s, Isoelastic(beta)), MixedIsoelastic(weights, gammas, sigmas), theta_bar)


def cost_elasticity(env: Environment, a, theta):
    """-d ln C / d ln V at fixed action a."""
    a, theta = np.broadcast_arrays(np.asarray(a, float), np.asarray(theta, float))
    c = env.cost.value(a, theta)
    _, c_t = env.cost.partials(a, theta)
    v, vp = env.benefit.value(theta), env.benefit.derivative(theta)
    return -(c_t / c) * (v / vp)


@dataclass
class CrosscheckRow:
    stakes: float
    c: float
    waste_closed_form: float
    waste_min: float
    waste_max: float
    ic_passed: bool
    linear_error: float  # max |A(theta)/(c theta) - 1|
    elasticity_spread: float  # spread of -dlnC/dlnV across theta at a fixed action

    @property
    def constant_in_type(self) -> bool:
        return self.waste_max - self.waste_min <= CONSTANCY_TOL

    @property
    def matches_closed_form(self) -> bool:
        return max(abs(self.waste_max - self.waste_closed_form),
                   abs(self.waste_min - self.waste_closed_form)) <= CONSTANCY_TOL


@dataclass
class CrosscheckReport:
    family: str
    rows: list

    @property
    def direction(self) -> str:
        w = [r.waste_closed_form for r in self.rows]
        if all(b < a for a, b in zip(w, w[1:])):
            return "decreasing"
        if all(b > a for a, b in zip(w, w[1:])):
            return "increasing"
        return "mixed"

    @property
    def passed(self) -> bool:
        expected = "decreasing" if self.family == "quadcubic" else "increasing"
        ok_rows = all(r.ic_passed and r.constant_in_type and r.matches_closed_form for r in self.rows)
        return ok_rows and (len(self.rows) < 2 or self.direction == expected)


def crosscheck_nonmultiplicative(family: str, stakes, domain: TypeDomain | None = None) -> CrosscheckReport:
    """ODE-solve each stake, then check IC, constancy in type and the closed-form W."""
    _, coeff, closed = FAMILIES.get(family, (None, None, None))
    if coeff is None:
        raise DomainError(f"family must be one of {sorted(FAMILIES)}")
    domain = domain or TypeDomain(1.0)
    rows = []
    for s in stakes:
        env = family_environment(family, s, domain.theta_bar)
        strategy = solve_ode(env, domain)
        w = waste_profile(env, strategy).values
        c = coeff(s).c
        a_fixed = float(strategy.actions[strategy.actions.size // 2])
        elast = cost_elasticity(env, a_fixed, strategy.theta)
        rows.append(CrosscheckRow(
            stakes=float(s),
            c=c,
            waste_closed_form=closed(s),
            waste_min=float(w.min()),
            waste_max=float(w.max()),
            ic_passed=verify_ic(env, strategy).passed,
            linear_error=float(np.max(np.abs(strategy.actions / (c * strategy.theta) - 1.0))),
            elasticity_spread=float(elast.max() - elast.min()),
        ))
    return CrosscheckReport(family, rows)
