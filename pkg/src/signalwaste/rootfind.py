"""Bracketed inversion of increasing scalar functions."""

from __future__ import annotations

from scipy.optimize import brentq

from .errors import InversionError


def expand_bracket(f, target: float, lo: float, hi: float, max_doublings: int = 200):
    """Grow [lo, hi] upward until f(hi) >= target; f must be increasing."""
    for _ in range(max_doublings):
        if f(hi) >= target:
            return lo, hi
        lo, hi = hi, 2.0 * hi
    raise InversionError(f"no bracket found for target {target!r}")


def invert_increasing(f, target: float, lo: float, hi: float, rtol: float = 1e-10,
                      expand: bool = False) -> float:
    """Solve f(x) = target on [lo, hi] for increasing ``f``.

    Raises InversionError if the target lies outside f([lo, hi]) (after an
    optional upward expansion of the bracket).
    """
    g = lambda x: float(f(x)) - target  # noqa: E731
    if expand:
        lo, hi = expand_bracket(lambda x: float(f(x)), target, lo, hi)
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if glo > 0 or ghi < 0:
        raise InversionError(f"target {target!r} not bracketed by [{lo!r}, {hi!r}]")
    return brentq(g, lo, hi, xtol=1e-300, rtol=max(rtol, 4.5e-16), maxiter=500)
