"""Winner-take-all signaling tournament and the Tullock contest benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .environment import (
    BenefitSpec,
    DifficultySpec,
    Environment,
    Multiplicative,
    PowerDifficulty,
    PowerOfCdf,
    PowerStrain,
)
from .errors import DomainError
from .rng import map_trials


@dataclass(frozen=True)
class TournamentSpec:
    """N candidates, types i.i.d. with F(theta) = theta**k on [0, 1], one prize."""

    prize: float
    n: int
    k: float = 1.0
    sigma: float = 1.0
    difficulty: DifficultySpec = field(default_factory=lambda: PowerDifficulty(1.0))

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if not (self.prize > 0 and self.k > 0 and self.sigma > 0):
            raise DomainError("prize, k and sigma must be positive")

    @property
    def beta(self) -> float:
        return self.k * (self.n - 1)

    def environment(self) -> Environment:
        return Environment(
            BenefitSpec(self.prize, PowerOfCdf(self.n, self.k)),
            Multiplicative(self.difficulty, PowerStrain(self.sigma)),
            1.0,
        )


def tournament_benefit(spec: TournamentSpec, theta):
    """Expected prize s * F(theta)**(N-1) of a type perceived correctly."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > 1):
        raise DomainError("type must lie in [0, 1]")
    out = spec.prize * theta ** spec.beta
    return float(out) if out.ndim == 0 else out


def tournament_waste(n: int, k: float = 1.0, sigma: float = 1.0) -> float:
    """k(N-1) / (k(N-1) + sigma); equals (N-1)/N when k = sigma = 1."""
    if int(n) != n or n < 2 or not (k > 0 and sigma > 0):
        raise DomainError("need integer n >= 2 and positive k, sigma")
    beta = k * (n - 1)
    return beta / (beta + sigma)


@dataclass
class MonteCarloReport:
    trials: int
    seed: int
    mean_cost: float  # per capita
    mean_benefit: float  # realized prize per capita
    mean_expected_benefit: float  # per-capita mean of V(theta)
    ratio: float
    cost_se: float
    expected_benefit_se: float
    ratio_se: float

    @property
    def se_defined(self) -> bool:
        return self.trials > 1


def _se(x: np.ndarray) -> float:
    if x.size < 2:
        return math.nan
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def simulate_tournament(spec: TournamentSpec, trials: int, seed: int, workers: int = 1) -> MonteCarloReport:
    """Monte Carlo of the separating equilibrium of the tournament.

    Each trial draws N types by inverse CDF u**(1/k); every candidate plays the
    equilibrium action for benefit elasticity k(N-1) and pays its cost; the
    prize goes to the highest type (lowest index on ties).  Trial ``t`` uses
    its own random substream, so results do not depend on ``workers``.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    env = spec.environment()
    n, s, beta, sigma = spec.n, spec.prize, spec.beta, spec.sigma
    scale = s * beta / (beta + sigma)
    difficulty = spec.difficulty

    def run(u):
        theta = u ** (1.0 / spec.k)
        action = difficulty.inverse(scale * theta ** (beta + sigma))
        cost = env.cost.value(action, theta)
        winner = np.argmax(theta, axis=1)
        prize = np.zeros_like(theta)
        prize[np.arange(theta.shape[0]), winner] = s
        benefit = env.benefit.value(theta)
        return np.stack([cost.mean(axis=1), prize.mean(axis=1), benefit.mean(axis=1)], axis=1)

    per_trial = map_trials(run, seed, trials, n, workers)
    cost, prize, benefit = per_trial.T
    mean_prize = float(prize.mean())
    return MonteCarloReport(
        trials=trials,
        seed=seed,
        mean_cost=float(cost.mean()),
        mean_benefit=mean_prize,
        mean_expected_benefit=float(benefit.mean()),
        ratio=float(cost.mean() / mean_prize),
        cost_se=_se(cost),
        expected_benefit_se=_se(benefit),
        ratio_se=_se(cost / prize),
    )


# ---------------------------------------------------------------------------
# Tullock contest
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContestSpec:
    """Win probability x_i**r / sum_j x_j**r, effort cost x**gamma."""

    prize: float
    n: int
    r: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if not self.prize > 0:
            raise DomainError("prize must be positive")
        if not 0 < self.r <= 1:
            raise DomainError("r must lie in (0, 1]")
        if not self.gamma >= 1:
            raise DomainError("gamma must be >= 1")


def tullock_equilibrium(spec: ContestSpec) -> tuple[float, float]:
    """Symmetric equilibrium (effort per player, rent dissipation rate).

    With cost x**gamma the contest is a linear-cost contest in y = x**gamma
    with exponent r/gamma, so y* = (r/gamma) s (N-1)/N**2 and the
    dissipation N y*/s = (r/gamma)(N-1)/N.
    """
    n, s = spec.n, spec.prize
    q = spec.r / spec.gamma
    expenditure = q * s * (n - 1) / n**2
    effort = expenditure ** (1.0 / spec.gamma)
    return effort, q * (n - 1) / n


@dataclass
class ComparisonTable:
    n: list
    signaling: list
    contest: list

    def rows(self):
        return list(zip(self.n, self.signaling, self.contest))


def compare_limits(k: float, sigma: float, r: float, gamma: float, ns) -> ComparisonTable:
    """Signaling waste vs Tullock dissipation across contestant counts."""
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("n list must be increasing")
    sig = [tournament_waste(n, k, sigma) for n in ns]
    con = [tullock_equilibrium(ContestSpec(1.0, n, r, gamma))[1] for n in ns]
    return ComparisonTable(ns, sig, con)
