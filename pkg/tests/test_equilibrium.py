import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from signalwaste import (
    BenefitSpec,
    DomainError,
    Environment,
    ExponentialStrain,
    Isoelastic,
    Multiplicative,
    PowerDifficulty,
    PowerStrain,
    QuadCubic,
    SingularityError,
    TabulatedDifficulty,
    TypeDomain,
    closed_form_isoelastic,
    equilibrium_cost,
    isoelastic_environment,
    solve,
    solve_multiplicative,
    solve_ode,
)
from signalwaste.equilibrium import Provenance, Strategy


def exp_env(gamma=1.0, s=1.0):
    return Environment(BenefitSpec(s, Isoelastic(1.0)),
                       Multiplicative(PowerDifficulty(gamma), ExponentialStrain()))


def at(strategy, theta):
    i = int(np.argmin(np.abs(strategy.theta - theta)))
    assert strategy.theta[i] == pytest.approx(theta, rel=1e-12)
    return strategy.actions[i]


GRID = TypeDomain(1.0, 1024)
HALF = TypeDomain(1.0, points=tuple(np.linspace(0.01, 1.0, 100)))


# -- closed form -------------------------------------------------------------


def test_closed_form_examples():
    assert closed_form_isoelastic(1, 1, 1, 1, 1.0) == (0.5, 0.5)
    assert closed_form_isoelastic(1, 1, 1, 1, 0.0) == (0.0, 0.0)
    a, c = closed_form_isoelastic(2, 1, 1, 2, 1.0)
    assert a == pytest.approx(1.0, rel=1e-15) and c == pytest.approx(1.0, rel=1e-15)


def test_closed_form_rejects_negative_type():
    with pytest.raises(DomainError):
        closed_form_isoelastic(1, 1, 1, 1, -0.1)


# -- integral route ----------------------------------------------------------


def test_integral_examples():
    assert at(solve_multiplicative(isoelastic_environment(1, 1, 1, 2), GRID), 1.0) == pytest.approx(
        1 / math.sqrt(2), rel=1e-12)
    assert at(solve_multiplicative(isoelastic_environment(1, 1, 1, 1), HALF), 0.5) == pytest.approx(
        0.125, rel=1e-12)
    assert at(solve_multiplicative(exp_env(), GRID), 1.0) == pytest.approx(math.e - 1, rel=1e-12)


def test_exponential_strain_against_scipy_quad():
    s = solve_multiplicative(exp_env(gamma=2.0, s=3.0), HALF)
    oracle = [math.sqrt(3.0 * quad(math.exp, 0, t, epsabs=0, epsrel=1e-13)[0]) for t in s.theta]
    assert np.allclose(s.actions, oracle, rtol=1e-11, atol=0)


def test_tabulated_difficulty_numeric_inverse():
    a = np.linspace(0.0, 2.0, 2001)
    env = Environment(BenefitSpec(1.0, Isoelastic(1.0)),
                      Multiplicative(TabulatedDifficulty(a, a**2), PowerStrain(1.0)))
    s = solve_multiplicative(env, HALF)
    # exact against the interpolated table; close to the smooth a**2 it samples
    d = env.cost.difficulty.value(s.actions)
    assert np.allclose(d, s.theta**2 / 2, rtol=1e-9, atol=0)
    assert np.allclose(s.actions, s.theta / math.sqrt(2), rtol=1e-4)


# -- ODE route ---------------------------------------------------------------


def test_ode_quadcubic_linear_strategy():
    env = Environment(BenefitSpec(5.0, Isoelastic(1.0)), QuadCubic())
    s = solve_ode(env, GRID)
    assert s.provenance is Provenance.ODE
    assert np.max(np.abs(s.actions / s.theta - 1)) <= 1e-6


def test_ode_multiplicative_example():
    s = solve_ode(isoelastic_environment(1, 1, 1, 1), GRID)
    assert s.actions[-1] == pytest.approx(0.5, rel=1e-6)


def test_ode_seeded_on_boundary_is_singular():
    with pytest.raises(SingularityError):
        solve_ode(isoelastic_environment(), GRID, theta_start=1e-6, action_start=0.0)


def test_ode_agrees_with_integral_route_on_exponential_strain():
    env = exp_env(gamma=1.5)
    a = solve_ode(env, GRID).actions
    b = solve_multiplicative(env, GRID).actions
    assert np.max(np.abs(a / b - 1)) <= 1e-6


# -- properties --------------------------------------------------------------

PARAMS = (0.5, 1.0, 2.0)


@pytest.mark.parametrize("beta", PARAMS)
@pytest.mark.parametrize("sigma", PARAMS)
@pytest.mark.parametrize("gamma", PARAMS)
def test_solvers_match_closed_form(beta, sigma, gamma):
    env = isoelastic_environment(1.0, beta, sigma, gamma)
    oracle = lambda t: closed_form_isoelastic(1.0, beta, sigma, gamma, t)[0]
    for strategy in (solve_multiplicative(env, GRID), solve_ode(env, GRID)):
        keep = strategy.theta >= 1e-3
        t = strategy.theta[keep]
        assert np.max(np.abs(strategy.actions[keep] / oracle(t) - 1)) <= 1e-6
        assert strategy.is_monotone


@pytest.mark.parametrize("base", [isoelastic_environment(2.0, 1.5, 0.5), exp_env(s=2.0)])
def test_cost_curve_does_not_depend_on_difficulty(base):
    curves = []
    for gamma in (0.5, 1.0, 2.0, 4.0):
        env = Environment(base.benefit, Multiplicative(PowerDifficulty(gamma), base.cost.strain))
        curves.append(equilibrium_cost(env, solve_multiplicative(env, GRID)).values)
    for c in curves[1:]:
        assert np.max(np.abs(c / curves[0] - 1)) <= 1e-6


def test_equilibrium_cost_examples():
    c = equilibrium_cost(isoelastic_environment(1, 1, 1, 2), solve(isoelastic_environment(1, 1, 1, 2), GRID))
    assert c.values[-1] == pytest.approx(0.5, rel=1e-12)
    assert c.values[0] <= 1e-6
    env = isoelastic_environment(3, 1, 1, 1)
    assert equilibrium_cost(env, solve(env, GRID)).values[-1] == pytest.approx(1.5, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.1, 20.0), beta=st.floats(0.3, 3.0), sigma=st.floats(0.3, 3.0),
       gamma=st.floats(0.5, 4.0))
def test_integral_route_property(s, beta, sigma, gamma):
    env = isoelastic_environment(s, beta, sigma, gamma)
    strategy = solve_multiplicative(env, TypeDomain(1.0, 128))
    oracle, _ = closed_form_isoelastic(s, beta, sigma, gamma, strategy.theta)
    assert strategy.is_monotone
    assert np.max(np.abs(strategy.actions / oracle - 1)) <= 1e-8


def test_auto_dispatch():
    assert solve(isoelastic_environment()).provenance is Provenance.CLOSED_FORM
    assert solve(exp_env(), HALF).provenance is Provenance.INTEGRAL
    env = Environment(BenefitSpec(5.0, Isoelastic(1.0)), QuadCubic())
    assert solve(env, HALF).provenance is Provenance.ODE
    with pytest.raises(ValueError):
        solve(env, HALF, method="shooting")


# -- strategy object -----------------------------------------------------------


def test_strategy_interpolation_reproduces_power_law():
    t = np.geomspace(1e-3, 1.0, 50)
    s = Strategy(t, 0.5 * t**2)
    x = np.array([5e-4, 2e-3, 0.37, 1.0])
    assert np.allclose(s(x), 0.5 * x**2, rtol=1e-12)
    assert s(0.0) == 0.0


def test_strategy_rejects_nonpositive_actions():
    with pytest.raises(Exception):
        Strategy([0.1, 0.2], [0.0, 1.0])


def test_unbounded_domain_is_refused_for_grids():
    env = isoelastic_environment(theta_bar=math.inf)
    with pytest.raises(DomainError):
        solve_multiplicative(env, TypeDomain(math.inf))
