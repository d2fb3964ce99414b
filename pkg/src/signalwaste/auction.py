"""Isoelastic signaling as a symmetric all-pay auction.

With s = 1 and theta_bar = 1, type theta maps to value v = theta**sigma drawn
from G(v) = v**alpha, alpha = beta / (sigma (N - 1)), and the bid is the
equilibrium difficulty b(theta) = D(A(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import TypeDomain, isoelastic_environment
from .equilibrium import solve_multiplicative
from .errors import DomainError
from .rng import map_trials


@dataclass(frozen=True)
class AuctionMap:
    beta: float
    sigma: float
    n: int

    def __post_init__(self):
        if not (self.beta > 0 and self.sigma > 0):
            raise DomainError("beta and sigma must be positive")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")

    @property
    def alpha(self) -> float:
        return self.beta / (self.sigma * (self.n - 1))

    def value_of_type(self, theta):
        return np.asarray(theta, dtype=float) ** self.sigma

    def type_of_value(self, v):
        return np.asarray(v, dtype=float) ** (1.0 / self.sigma)

    def cdf(self, v):
        return np.asarray(v, dtype=float) ** self.alpha


def _check_unit(v, allow_zero=True):
    v = np.asarray(v, dtype=float)
    low_ok = v >= 0 if allow_zero else v > 0
    if not np.all(low_ok & (v <= 1)):
        raise DomainError("value must lie in [0, 1]" if allow_zero else "value must lie in (0, 1]")
    return v


def allpay_bid(m: AuctionMap, v):
    """Symmetric all-pay bid v * G(v)**(N-1) * beta / (beta + sigma)."""
    v = _check_unit(v)
    bid = v * m.cdf(v) ** (m.n - 1) * m.beta / (m.beta + m.sigma)
    return float(bid) if bid.ndim == 0 else bid


def conditional_second_highest(m: AuctionMap, v):
    """E[max of the other N-1 values | that max < v], in two algebraic forms.

    Returns (order-statistic form v*a/(a+1) with a = alpha(N-1),
    elasticity form v*beta/(beta+sigma)).
    """
    v = _check_unit(v, allow_zero=False)
    a = m.alpha * (m.n - 1)
    order_form = v * a / (a + 1.0)
    elasticity_form = v * m.beta / (m.beta + m.sigma)
    if not np.allclose(order_form, elasticity_form, rtol=8 * np.finfo(float).eps, atol=0):
        raise AssertionError("order-statistic identity failed")
    if order_form.ndim == 0:
        return float(order_form), float(elasticity_form)
    return order_form, elasticity_form


def mc_conditional_second_highest(m: AuctionMap, v: float, draws: int, seed: int, workers: int = 1):
    """Monte Carlo estimate of the conditional expectation; returns (mean, se, accepted).

    Each draw samples N-1 values from G by inverse CDF, takes their maximum
    and keeps it when below ``v``.
    """
    v = float(_check_unit(v, allow_zero=False))

    def run(u):
        top = (u ** (1.0 / m.alpha)).max(axis=1)
        return np.where(top < v, top, np.nan)

    tops = map_trials(run, seed, draws, m.n - 1, workers)
    kept = tops[~np.isnan(tops)]
    if kept.size < 2:
        return math.nan, math.nan, int(kept.size)
    return float(kept.mean()), float(kept.std(ddof=1) / math.sqrt(kept.size)), int(kept.size)


@dataclass
class EquivalenceReport:
    v: np.ndarray
    bid_closed_form: np.ndarray
    bid_from_signaling: np.ndarray
    gross_value: np.ndarray  # v * G(v)**(N-1)

    @property
    def discrepancy(self) -> np.ndarray:
        return np.abs(self.bid_closed_form - self.bid_from_signaling)

    @property
    def max_discrepancy(self) -> float:
        return float(self.discrepancy.max())

    @property
    def recovered_waste(self) -> np.ndarray:
        """Bid over expected gross value v G(v)**(N-1)."""
        return self.bid_from_signaling / self.gross_value


def verify_equivalence(beta: float, sigma: float, gamma: float, n: int, v=None) -> EquivalenceReport:
    """Compare allpay_bid(v) with D(A(v**(1/sigma))) from the signaling solver.

    The signaling game is solved with s = 1, theta_bar = 1, D(a) = a**gamma on
    the type grid theta = v**(1/sigma), so no interpolation is involved.
    """
    m = AuctionMap(beta, sigma, n)
    v = np.geomspace(1e-3, 1.0, 256) if v is None else _check_unit(v, allow_zero=False)
    theta = m.type_of_value(v)
    env = isoelastic_environment(1.0, beta, sigma, gamma, 1.0)
    strategy = solve_multiplicative(env, TypeDomain(1.0, points=tuple(theta)))
    from_signaling = env.cost.difficulty.value(strategy.actions)
    return EquivalenceReport(v, allpay_bid(m, v), from_signaling, v * m.cdf(v) ** (n - 1))
