"""Separating equilibria of costly-signaling games and their waste ratio."""

from .environment import (
    BenefitSpec,
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
from .equilibrium import (
    Strategy,
    closed_form_isoelastic,
    equilibrium_cost,
    solve,
    solve_multiplicative,
    solve_ode,
)
from .errors import (
    DomainError,
    ICViolation,
    InversionError,
    QuadratureError,
    RatioConditionError,
    SignalingError,
    SingularityError,
)
from .waste import (
    check_constant_waste,
    invariance_sweep,
    relative_elasticity,
    waste_integral_multiplicative,
    waste_isoelastic,
    waste_profile,
    waste_ratio,
)

__version__ = "0.1.0"
