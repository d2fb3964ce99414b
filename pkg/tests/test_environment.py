import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from signalwaste import (
    BenefitSpec,
    DomainError,
    Environment,
    ExponentialStrain,
    Isoelastic,
    MixedIsoelastic,
    Multiplicative,
    PowerDifficulty,
    PowerOfCdf,
    PowerStrain,
    QuadCubic,
    RatioCost,
    TabulatedBenefit,
    TabulatedDifficulty,
    TabulatedStrain,
    TypeDomain,
    eval_benefit,
    eval_cost,
    eval_cost_partials,
    isoelastic_environment,
    validate_assumptions,
)
from signalwaste.environment import eval_benefit_derivative


def unit_benefit(shape, s=1.0):
    return BenefitSpec(s, shape)


def _tabulated_env():
    t = np.linspace(0.0, 1.0, 201)
    a = np.linspace(0.0, 12.0, 241)
    return Environment(
        BenefitSpec(1.0, TabulatedBenefit(t, t**2 + t)),
        Multiplicative(TabulatedDifficulty(a, a**2 + a), TabulatedStrain(t, np.exp(-2 * t))),
    )


FAMILIES = {
    "isoelastic": isoelastic_environment(1.5, 1.0, 2.0, 1.5),
    "exponential": Environment(unit_benefit(Isoelastic(1.0)),
                               Multiplicative(PowerDifficulty(2.0), ExponentialStrain())),
    "quadcubic": Environment(unit_benefit(Isoelastic(1.0), 5.0), QuadCubic()),
    "ratio": Environment(unit_benefit(Isoelastic(1.0), 0.75), RatioCost()),
    "mixed": Environment(unit_benefit(Isoelastic(1.0)), MixedIsoelastic((1, 1), (2, 3), (1, 2))),
    "tournament": Environment(unit_benefit(PowerOfCdf(3, 2.0)),
                              Multiplicative(PowerDifficulty(1.0), PowerStrain(1.0))),
    "tabulated": _tabulated_env(),
}
ANALYTIC = [k for k in FAMILIES if k != "tabulated"]


# -- benefit ---------------------------------------------------------------


def test_benefit_examples():
    assert eval_benefit(Environment(unit_benefit(Isoelastic(1.0)), QuadCubic()), 0.0) == 0.0
    assert eval_benefit(Environment(unit_benefit(Isoelastic(3.0), 2.0), QuadCubic()), 0.5) == 0.25
    assert eval_benefit(Environment(unit_benefit(PowerOfCdf(3, 1.0)), QuadCubic()), 0.5) == 0.25


def test_benefit_rejects_types_outside_support():
    env = isoelastic_environment()
    for bad in (-0.1, 1.5, math.nan):
        with pytest.raises(DomainError):
            eval_benefit(env, bad)


def test_tabulated_benefit_derivative_is_finite_difference():
    t = np.linspace(0, 1, 401)
    env = Environment(unit_benefit(TabulatedBenefit(t, t**3)), QuadCubic())
    assert eval_benefit_derivative(env, 0.5) == pytest.approx(0.75, rel=1e-4)


# -- cost ------------------------------------------------------------------


def test_cost_examples():
    env = Environment(unit_benefit(Isoelastic(1.0)),
                      Multiplicative(PowerDifficulty(2.0), PowerStrain(1.0)))
    assert eval_cost(env, 0.0, 0.0) == 0.0
    assert eval_cost(FAMILIES["quadcubic"], 1.0, 1.0) == 2.0
    assert eval_cost(FAMILIES["ratio"], 1.0, 1.0) == 0.5


def test_positive_action_at_singular_type_is_infinite():
    env = isoelastic_environment()
    assert eval_cost(env, 0.3, 0.0) == math.inf
    assert eval_cost(FAMILIES["quadcubic"], 0.3, 0.0) == math.inf


def test_cost_domain_errors():
    env = isoelastic_environment()
    with pytest.raises(DomainError):
        eval_cost(env, -1.0, 0.5)
    with pytest.raises(DomainError):
        eval_cost(env, 1.0, 2.0)


def test_partials_examples():
    env = Environment(unit_benefit(Isoelastic(1.0), 1.0),
                      Multiplicative(PowerDifficulty(2.0), PowerStrain(1.0)), theta_bar=2.0)
    assert eval_cost_partials(env, 1.0, 2.0)[0] == 1.0
    assert eval_cost_partials(FAMILIES["quadcubic"], 1.0, 1.0)[0] == 5.0
    assert eval_cost_partials(FAMILIES["ratio"], 1.0, 1.0)[0] == 0.75


@pytest.mark.parametrize("a, theta", [(0.0, 0.5), (0.5, 0.0)])
def test_partials_need_open_quadrant(a, theta):
    with pytest.raises(DomainError):
        eval_cost_partials(isoelastic_environment(), a, theta)


@pytest.mark.parametrize("name", list(FAMILIES))
@given(theta=st.floats(0.0, 1.0))
def test_zero_action_is_free(name, theta):
    assert eval_cost(FAMILIES[name], 0.0, theta) == 0.0


@pytest.mark.parametrize("name", ANALYTIC)
def test_analytic_partials_match_finite_differences(name):
    env = FAMILIES[name]
    rng = np.random.default_rng(7)
    a = rng.uniform(0.05, 5.0, 100)
    t = rng.uniform(0.05, 0.95, 100)
    c_a, c_t = eval_cost_partials(env, a, t)
    ha, ht = 1e-6 * a, 1e-6 * t
    fd_a = (env.cost.value(a + ha, t) - env.cost.value(a - ha, t)) / (2 * ha)
    fd_t = (env.cost.value(a, t + ht) - env.cost.value(a, t - ht)) / (2 * ht)
    assert np.max(np.abs(c_a / fd_a - 1)) <= 1e-5
    assert np.max(np.abs(c_t / fd_t - 1)) <= 1e-5


# -- assumption checks -------------------------------------------------------


@pytest.mark.parametrize("name", list(FAMILIES))
def test_builtin_families_satisfy_assumptions(name):
    domain = TypeDomain(1.0, points=tuple(np.geomspace(1e-3, 1.0, 64)))
    report = validate_assumptions(FAMILIES[name], domain)
    assert report.passed, [c for c in report.checks if not c.passed]


class IncreasingStrain:
    """S(theta) = theta: violates decreasing marginal cost in type."""

    def value(self, theta):
        return np.asarray(theta, dtype=float)

    def derivative(self, theta):
        return np.ones_like(np.asarray(theta, dtype=float))

    def log_derivative(self, theta):
        return 1.0 / np.asarray(theta, dtype=float)


def test_increasing_strain_fails_cross_partial_with_witness():
    env = Environment(unit_benefit(Isoelastic(1.0)),
                      Multiplicative(PowerDifficulty(2.0), IncreasingStrain()))
    report = validate_assumptions(env)
    check = report["marginal_cost_decreasing_in_type"]
    assert not check.passed and not report.passed
    a, theta = check.worst_point
    # C_a_theta = 2a here; the witness is the largest action on the grid
    assert check.worst_value == pytest.approx(2 * a, rel=1e-6)
    assert a == pytest.approx(10.0)
    assert report["marginal_cost_positive"].passed


# -- domain ------------------------------------------------------------------


def test_default_grid():
    g = TypeDomain().grid
    assert g.size == 1024
    assert g[0] == pytest.approx(1e-6) and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)


@pytest.mark.parametrize("points", [(0.0, 0.5), (0.5, 0.2), (0.5, 2.0)])
def test_bad_explicit_grid(points):
    with pytest.raises(DomainError):
        TypeDomain(1.0, points=points)


def test_unbounded_domain_has_no_grid():
    d = TypeDomain(math.inf)
    assert d.unbounded
    with pytest.raises(DomainError):
        d.grid


@pytest.mark.parametrize("ctor", [lambda: Isoelastic(0.0), lambda: PowerOfCdf(1),
                                  lambda: PowerStrain(-1.0), lambda: PowerDifficulty(0.0),
                                  lambda: BenefitSpec(0.0, Isoelastic(1.0))])
def test_parameter_validation(ctor):
    with pytest.raises(DomainError):
        ctor()


def test_tabulated_difficulty_inverse_roundtrip():
    a = np.linspace(0.0, 4.0, 81)
    d = TabulatedDifficulty(a, a**3 + a)
    y = d.value(np.array([0.3, 1.7, 3.2]))
    assert np.allclose(d.inverse(y), [0.3, 1.7, 3.2], rtol=1e-9)
