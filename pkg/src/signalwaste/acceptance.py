"""End-to-end acceptance checks, shared by the test suite and ``reproduce``.

Each check returns a :class:`Criterion` with the measured quantity next to
its tolerance.  Monte Carlo checks take an explicit seed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .auction import AuctionMap, conditional_second_highest, mc_conditional_second_highest, verify_equivalence
from .counterexamples import (
    crosscheck_nonmultiplicative,
    cubic_coefficient,
    family_environment,
    mixed_environment,
    ratio_coefficient,
    waste_decreasing,
    waste_increasing,
)
from .environment import (
    BenefitSpec,
    Environment,
    ExponentialStrain,
    Isoelastic,
    Multiplicative,
    PowerDifficulty,
    PowerStrain,
    TypeDomain,
    isoelastic_environment,
)
from .equilibrium import Strategy, solve_multiplicative, solve_ode
from .ic_verify import verify_ic
from .tournament import (
    ContestSpec,
    TournamentSpec,
    compare_limits,
    simulate_tournament,
    tournament_waste,
    tullock_equilibrium,
)
from .waste import check_constant_waste, envelope_check, invariance_sweep, waste_profile

DEFAULT_SEED = 20240917
GRID = TypeDomain(1.0, 1024)


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.number:>2}  {status}  {self.title:<34} {self.detail}"


def exponential_strain_environment(stakes=1.0, gamma=1.0) -> Environment:
    """B = theta, S = exp(-theta): multiplicative but not constant-waste."""
    return Environment(
        BenefitSpec(stakes, Isoelastic(1.0)),
        Multiplicative(PowerDifficulty(gamma), ExponentialStrain()),
    )


@functools.lru_cache(maxsize=None)
def solved_equilibria():
    """(label, env, strategy) for every equilibrium the checks solve."""
    out = []
    for beta in (0.5, 1.0, 2.0, 3.0):
        for sigma in (0.5, 1.0, 2.0, 3.0):
            env = isoelastic_environment(1.0, beta, sigma, 1.0)
            out.append((f"iso b={beta} s={sigma}", env, solve_multiplicative(env, GRID)))
    env = isoelastic_environment(2.0, 1.0, 1.0, 2.0)
    out.append(("iso ode s=2 g=2", env, solve_ode(env, GRID)))
    env = exponential_strain_environment()
    out.append(("exp strain", env, solve_multiplicative(env, GRID)))
    for family, stakes in (("quadcubic", (1.0, 5.0, 20.0)), ("ratio", (0.2, 0.75, 5.0))):
        for s in stakes:
            env = family_environment(family, s)
            out.append((f"{family} s={s}", env, solve_ode(env, GRID)))
    env = mixed_environment((1, 1), (2, 3), (1, 2), 1.0, 5.0)
    out.append(("mixed example", env, solve_ode(env, GRID)))
    env = mixed_environment((1, 2), (1, 2), (0.5, 1.5), 0.5, 3.0)
    out.append(("mixed alpha=1", env, solve_ode(env, GRID)))
    return tuple(out)


def criterion_1() -> Criterion:
    worst = 0.0
    for beta in (0.5, 1.0, 2.0, 3.0):
        for sigma in (0.5, 1.0, 2.0, 3.0):
            env = isoelastic_environment(1.0, beta, sigma, 1.0)
            w = waste_profile(env, solve_multiplicative(env, GRID)).values
            worst = max(worst, float(np.max(np.abs(w - beta / (beta + sigma)))))
    return Criterion(1, "constant-waste formula", worst <= 1e-6,
                     f"max|W - b/(b+s)| = {worst:.3e} (tol 1e-6)")


def criterion_2() -> Criterion:
    rep = invariance_sweep(isoelastic_environment(), (0.5, 1, 2, 10), (0.5, 1, 2, 4), GRID)
    ok = rep.max_deviation <= 1e-6 and rep.action_range_ratio > 2
    return Criterion(2, "invariance to stakes and difficulty", ok,
                     f"max dW = {rep.max_deviation:.3e} (tol 1e-6), max|A| ratio = "
                     f"{rep.action_range_ratio:.3g} (> 2)")


def criterion_3() -> Criterion:
    stakes = (0.5, 1, 2, 10)
    gammas = (0.5, 1, 2, 4)
    gamma_err = scale_err = 0.0
    for env in (isoelastic_environment(), exponential_strain_environment()):
        c = invariance_sweep(env, stakes, gammas, GRID).costs
        gamma_err = max(gamma_err, float(np.max(np.abs(c / c[:, :1, :] - 1))))
        per_stake = c / np.asarray(stakes, float)[:, None, None]
        scale_err = max(scale_err, float(np.max(np.abs(per_stake / per_stake[:1] - 1))))
    ok = gamma_err <= 1e-6 and scale_err <= 1e-6
    return Criterion(3, "equilibrium cost ignores difficulty", ok,
                     f"rel dC over gamma = {gamma_err:.3e}, linearity in s = {scale_err:.3e} (tol 1e-6)")


def criterion_4() -> Criterion:
    worst_formula = 0.0
    flags_ok = True
    for beta, sigma in ((2.0, 3.0), (1.0, 1.0), (2.0, 4.0), (0.5, 0.25)):
        env = Environment(BenefitSpec(1.0, Isoelastic(beta)),
                          Multiplicative(PowerDifficulty(1.0), PowerStrain(sigma)))
        rep = check_constant_waste(env, GRID)
        flags_ok &= rep.waste_constant and rep.elasticity_constant
        worst_formula = max(worst_formula, rep.formula_error)
    rep = check_constant_waste(exponential_strain_environment(), GRID)
    flags_ok &= not rep.waste_constant and not rep.elasticity_constant
    theta = rep.waste.theta
    oracle_err = float(np.max(np.abs(rep.waste.values + np.expm1(-theta) / theta)))
    ok = flags_ok and worst_formula <= 1e-8 and oracle_err <= 1e-6
    return Criterion(4, "constant waste iff constant rho", ok,
                     f"flags consistent = {flags_ok}, |W - 1/(1+rho)| = {worst_formula:.3e} (1e-8), "
                     f"exp-strain oracle err = {oracle_err:.3e} (1e-6)")


def criterion_5() -> Criterion:
    worst_ratio = 0.0
    all_pass = True
    for _, env, strategy in solved_equilibria():
        rep = verify_ic(env, strategy)
        all_pass &= rep.passed
        worst_ratio = max(worst_ratio, rep.max_gain / rep.tolerance)
    env = isoelastic_environment()
    base = solve_multiplicative(env, GRID)
    bad = verify_ic(env, Strategy(base.theta, 1.5 * base.actions))
    ok = all_pass and not bad.passed and bad.max_gain >= 1e-3
    return Criterion(5, "incentive compatibility", ok,
                     f"{len(solved_equilibria())} equilibria pass, worst gain/tol = {worst_ratio:.3g}; "
                     f"1.5x strategy gain = {bad.max_gain:.4g} (>= 1e-3)")


def criterion_6(seed: int = DEFAULT_SEED, trials: int = 100_000) -> Criterion:
    closed_ok = all(abs(tournament_waste(n) - (n - 1) / n) <= 1e-15 for n in range(2, 11))
    worst_z = 0.0
    for n in (2, 3, 5):
        for k in (1.0, 2.0):
            for sigma in (1.0, 2.0):
                rep = simulate_tournament(TournamentSpec(1.0, n, k, sigma), trials, seed)
                z = abs(rep.ratio - tournament_waste(n, k, sigma)) / rep.ratio_se
                worst_z = max(worst_z, z)
    rep = simulate_tournament(TournamentSpec(1.0, 2, 1.0, 1.0, PowerDifficulty(1.0)), trials, seed)
    z_cost = abs(rep.mean_cost - 0.25) / rep.cost_se
    z_v = abs(rep.mean_expected_benefit - 0.5) / rep.expected_benefit_se
    # per-type waste of the tournament equilibrium equals the closed form
    spec = TournamentSpec(1.0, 4, 1.5, 2.0)
    env = spec.environment()
    pointwise = float(np.max(np.abs(
        waste_profile(env, solve_multiplicative(env, GRID)).values - tournament_waste(4, 1.5, 2.0))))
    ok = closed_ok and worst_z <= 4 and z_cost <= 4 and z_v <= 4 and pointwise <= 1e-6
    return Criterion(6, "signaling tournament", ok,
                     f"(N-1)/N exact = {closed_ok}, worst MC |z| = {worst_z:.2f} (<= 4), "
                     f"E[cost] z = {z_cost:.2f}, E[V] z = {z_v:.2f}, pointwise dW = {pointwise:.1e}")


def _tullock_best_response_gap(spec: ContestSpec) -> float:
    """Payoff gain of the best unilateral deviation from the symmetric effort."""
    x_star, _ = tullock_equilibrium(spec)
    others = (spec.n - 1) * x_star**spec.r

    def payoff(x):
        win = x**spec.r / (x**spec.r + others) if x > 0 else 0.0
        return spec.prize * win - x**spec.gamma

    res = minimize_scalar(lambda x: -payoff(x), bounds=(0.0, 4.0 * x_star + 1e-12), method="bounded",
                          options={"xatol": 1e-12})
    return max(0.0, -res.fun - payoff(x_star))


def criterion_7() -> Criterion:
    effort_err = diss_err = 0.0
    br_gap = 0.0
    for n in range(2, 11):
        for s in (0.5, 1.0, 3.0):
            effort, _ = tullock_equilibrium(ContestSpec(s, n))
            effort_err = max(effort_err, abs(effort - s * (n - 1) / n**2))
        for r in (0.25, 0.5, 1.0):
            for gamma in (1.0, 2.0, 3.0):
                spec = ContestSpec(1.0, n, r, gamma)
                _, diss = tullock_equilibrium(spec)
                diss_err = max(diss_err, abs(diss - r / gamma * (n - 1) / n))
                br_gap = max(br_gap, _tullock_best_response_gap(spec))
    table = compare_limits(1.0, 1.0, 0.5, 1.0, [2, 10, 100, 1000])
    _, sig_big, con_big = table.rows()[-1]
    ok = (effort_err <= 1e-15 and diss_err <= 1e-15 and br_gap <= 1e-9
          and sig_big >= 0.999 and abs(con_big - 0.5) <= 1e-3)
    return Criterion(7, "Tullock contest comparison", ok,
                     f"effort err = {effort_err:.1e}, dissipation err = {diss_err:.1e}, "
                     f"best-response gap = {br_gap:.1e}; N=1000 signaling = {sig_big:.4f}, "
                     f"contest = {con_big:.4f}")


def criterion_8(seed: int = DEFAULT_SEED, draws: int = 1_000_000) -> Criterion:
    worst_bid = 0.0
    worst_identity = 0.0
    for beta in (0.5, 1.0, 2.0):
        for sigma in (0.5, 1.0, 2.0):
            for n in (2, 3, 5):
                m = AuctionMap(beta, sigma, n)
                a, b = conditional_second_highest(m, np.linspace(0.01, 1, 100))
                worst_identity = max(worst_identity, float(np.max(np.abs(a - b) / b)))
                for gamma in (0.5, 1.0, 2.0):
                    worst_bid = max(worst_bid, verify_equivalence(beta, sigma, gamma, n).max_discrepancy)
    worst_z = 0.0
    for (beta, sigma, n, v) in ((2.0, 1.0, 3, 0.9), (1.0, 1.0, 2, 1.0), (1.0, 2.0, 4, 0.5)):
        m = AuctionMap(beta, sigma, n)
        mean, se, _ = mc_conditional_second_highest(m, v, draws, seed)
        worst_z = max(worst_z, abs(mean - conditional_second_highest(m, v)[0]) / se)
    eps = np.finfo(float).eps
    ok = worst_bid <= 1e-6 and worst_identity <= 4 * eps and worst_z <= 3
    return Criterion(8, "all-pay auction equivalence", ok,
                     f"max bid gap = {worst_bid:.2e} (1e-6), identity rel err = {worst_identity:.1e}, "
                     f"MC |z| = {worst_z:.2f} (<= 3)")


def criterion_9() -> Criterion:
    c5, c75 = cubic_coefficient(5.0), ratio_coefficient(0.75)
    anchors = (abs(c5.c - 1) <= 1e-12 and abs(waste_decreasing(5.0) - 0.4) <= 1e-12
               and abs(c75.c - 1) <= 1e-12 and abs(waste_increasing(0.75) - 2 / 3) <= 1e-12)
    stakes = np.geomspace(1e-3, 1e3, 100)
    dec = np.array([waste_decreasing(s) for s in stakes])
    inc = np.array([waste_increasing(s) for s in stakes])
    residual = max(max(cubic_coefficient(s).residual, ratio_coefficient(s).residual) for s in stakes)
    shape_ok = (np.all(np.diff(dec) < 0) and np.all(np.diff(inc) > 0)
                and np.all((dec > 1 / 3) & (dec < 1 / 2)) and np.all((inc > 1 / 2) & (inc < 1)))
    rq = crosscheck_nonmultiplicative("quadcubic", (1.0, 5.0, 20.0), GRID)
    rr = crosscheck_nonmultiplicative("ratio", (0.2, 0.75, 5.0), GRID)
    spread = max(r.waste_max - r.waste_min for r in rq.rows + rr.rows)
    ok = anchors and shape_ok and residual <= 1e-12 and rq.passed and rr.passed and spread <= 1e-6
    return Criterion(9, "non-multiplicative counterexamples", ok,
                     f"anchors = {anchors}, monotone/ranges = {bool(shape_ok)}, residual = {residual:.1e}, "
                     f"ODE W spread = {spread:.1e} (1e-6), directions = {rq.direction}/{rr.direction}")


def criterion_10() -> Criterion:
    worst = 0.0
    for _, env, strategy in solved_equilibria():
        worst = max(worst, envelope_check(env, strategy).max_relative_error)
    return Criterion(10, "envelope condition", worst <= 1e-4,
                     f"max rel err dU/dtheta vs -C_theta = {worst:.2e} (tol 1e-4)")


CHECKS = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}
SEEDED = {6, 8}


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> Criterion:
    check = CHECKS[number]
    return check(seed=seed) if number in SEEDED else check()


def run_all(seed: int = DEFAULT_SEED):
    return [run_criterion(n, seed) for n in CHECKS]


def format_table(results) -> str:
    lines = [f"{'#':>2}  {'':4}  {'criterion':<34} measured"]
    lines += [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)


__all__ = ["Criterion", "CHECKS", "run_all", "run_criterion", "format_table"]
