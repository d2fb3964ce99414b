"""Exception types raised by the solvers and verifiers."""


class SignalingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SignalingError, ValueError):
    """An argument lies outside the domain of the requested function."""


class QuadratureError(SignalingError):
    """An integral could not be evaluated to the requested tolerance."""


class InversionError(SignalingError):
    """A monotone function could not be inverted (no bracketing interval)."""


class SingularityError(SignalingError):
    """The equilibrium ODE hit a point where the marginal cost vanishes."""


class RatioConditionError(SignalingError, ValueError):
    """Mixed isoelastic exponents violate (beta + sigma_i) / gamma_i = const."""


class ICViolation(SignalingError):
    """A strategy admits a profitable mimicry deviation.

    Attributes:
        theta: true type of the deviating agent.
        theta_hat: type it prefers to mimic.
        gain: payoff improvement from the deviation.
    """

    def __init__(self, theta: float, theta_hat: float, gain: float):
        self.theta = theta
        self.theta_hat = theta_hat
        self.gain = gain
        super().__init__(
            f"type {theta:.6g} gains {gain:.6g} by mimicking type {theta_hat:.6g}"
        )
