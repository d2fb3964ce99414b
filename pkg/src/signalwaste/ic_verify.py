"""Brute-force incentive-compatibility check of a tabulated strategy.

The agent's only on-path choice is which type to mimic, so a type theta
facing strategy A earns Pi(theta, theta_hat) = V(theta_hat) - C(A(theta_hat), theta).
Off-path actions are met with belief 0 and are weakly dominated by the
zero action, so the candidate set is the on-path grid plus theta_hat = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import Environment
from .equilibrium import Strategy
from .errors import ICViolation

CANDIDATE_REFINEMENT = 4
ROW_CHUNK = 256


def refine_grid(grid, factor: int = CANDIDATE_REFINEMENT) -> np.ndarray:
    """Insert ``factor - 1`` log-spaced points between neighbours; endpoints kept."""
    grid = np.asarray(grid, dtype=float)
    lg = np.log(grid)
    steps = np.arange(factor) / factor
    inner = (lg[:-1, None] + np.diff(lg)[:, None] * steps[None, :]).ravel()
    out = np.exp(np.concatenate([inner, lg[-1:]]))
    out[::factor] = grid  # exact knots
    return out


def _payoff(env: Environment, theta, theta_hat, actions_hat):
    """Pi on the outer product types x candidates; infinite costs give -inf."""
    value = env.benefit.value(theta_hat)[None, :]
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        cost = env.cost.value(actions_hat[None, :], theta[:, None])
    cost = np.where(np.isnan(cost), np.inf, cost)
    return value - cost


@dataclass
class MimicPayoffSurface:
    theta: np.ndarray
    theta_hat: np.ndarray
    values: np.ndarray


def mimic_payoff_surface(env: Environment, strategy: Strategy, theta, theta_hat) -> MimicPayoffSurface:
    theta = np.asarray(theta, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    return MimicPayoffSurface(theta, theta_hat, _payoff(env, theta, theta_hat, strategy(theta_hat)))


def default_candidates(strategy: Strategy) -> np.ndarray:
    return np.concatenate([[0.0], refine_grid(strategy.theta)])


def best_response(env: Environment, strategy: Strategy, theta: float, candidates=None):
    """Best type to mimic for true type ``theta``.

    Returns (theta_hat*, gain) where gain is the payoff of the best candidate
    over the payoff of truthful play.
    """
    candidates = default_candidates(strategy) if candidates is None else np.asarray(candidates, float)
    candidates = np.union1d(candidates, [theta])
    row = _payoff(env, np.array([theta]), candidates, strategy(candidates))[0]
    honest = _payoff(env, np.array([theta]), np.array([theta]), np.atleast_1d(strategy(theta)))[0, 0]
    j = int(np.argmax(row))
    return float(candidates[j]), float(row[j] - honest)


@dataclass
class ICReport:
    max_gain: float
    witness: tuple  # (theta, theta_hat, gain)
    tolerance: float
    concave_at_diagonal: bool
    worst_curvature: float

    @property
    def passed(self) -> bool:
        return self.max_gain <= self.tolerance and self.concave_at_diagonal

    def raise_for_violation(self):
        if not self.passed:
            raise ICViolation(*self.witness)


def verify_ic(env: Environment, strategy: Strategy, types=None, candidates=None,
              tolerance: float | None = None, strict: bool = False) -> ICReport:
    """Largest mimicry gain over a type grid and a finer candidate grid.

    ``tolerance`` defaults to 1e-6 times the largest benefit on the candidate
    grid.  The check also requires a nonpositive discrete second difference of
    Pi(theta, .) at theta_hat = theta for every type that lies on the
    candidate grid.  With ``strict`` a failure raises ICViolation.
    """
    types = strategy.theta if types is None else np.asarray(types, dtype=float)
    candidates = default_candidates(strategy) if candidates is None else np.asarray(candidates, float)
    candidates = np.unique(candidates)
    actions_hat = strategy(candidates)
    vmax = float(np.max(env.benefit.value(candidates)))
    tolerance = 1e-6 * vmax if tolerance is None else tolerance

    best_gain, witness = -np.inf, (np.nan, np.nan, np.nan)
    worst_curv = -np.inf
    for start in range(0, types.size, ROW_CHUNK):
        t = types[start:start + ROW_CHUNK]
        surface = _payoff(env, t, candidates, actions_hat)
        honest = _payoff(env, t, t, strategy(t)).diagonal()
        gain = surface.max(axis=1) - honest
        gain = np.where(np.isnan(gain), 0.0, gain)  # -inf - -inf at a type with infinite honest cost
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            j = int(np.argmax(surface[i]))
            best_gain, witness = float(gain[i]), (float(t[i]), float(candidates[j]), float(gain[i]))

        # curvature at the diagonal, for types that are candidate knots
        pos = np.searchsorted(candidates, t)
        on = (pos > 0) & (pos < candidates.size - 1)
        on[on] &= candidates[pos[on]] == t[on]
        rows = np.nonzero(on)[0]
        if rows.size:
            p = pos[rows]
            lo, mid, hi = candidates[p - 1], candidates[p], candidates[p + 1]
            f0 = surface[rows, p - 1]
            f1 = surface[rows, p]
            f2 = surface[rows, p + 1]
            curv = 2.0 * ((f2 - f1) / (hi - mid) - (f1 - f0) / (mid - lo)) / (hi - lo)
            # rounding allowance relative to the payoff scale
            slack = 64 * np.finfo(float).eps * np.maximum.reduce([abs(f0), abs(f1), abs(f2)])
            slack = slack / ((hi - mid) * (mid - lo))
            excess = curv - slack
            finite = np.isfinite(excess)
            if finite.any():
                worst_curv = max(worst_curv, float(np.max(excess[finite])))

    report = ICReport(best_gain, witness, tolerance, worst_curv <= 0.0, worst_curv)
    if strict:
        report.raise_for_violation()
    return report
