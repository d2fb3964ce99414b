"""Cumulative adaptive Simpson quadrature from 0 over an increasing grid.

The integrand may be singular (but integrable) at 0.  The piece [0, x0]
below the first grid point is split into dyadic panels x0 * 2**-j; the
remainder below the last panel is extrapolated as a geometric series, which
is exact for a power-law integrand.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

DEFAULT_RTOL = 1e-12
MAX_DEPTH = 50
HEAD_PANELS = 64


def adaptive_simpson(f, a, b, rtol: float = DEFAULT_RTOL, max_depth: int = MAX_DEPTH):
    """Integrate vectorized ``f`` over each panel [a[i], b[i]].

    All panels are refined together, one bisection level per pass, so the
    integrand is called on whole arrays.  A subinterval is accepted when the
    two-level Simpson difference is below ``15 * rtol`` times its own value;
    accepted values get the Richardson correction.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.zeros(a.size)
    owner = np.arange(a.size)
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    for depth in range(max_depth + 1):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        total = left + right
        diff = total - whole
        if not np.all(np.isfinite(total)):
            raise QuadratureError("integrand is not finite on the integration range")
        done = np.abs(diff) <= 15.0 * rtol * np.abs(total)
        done |= np.abs(total) <= 1e-300
        if depth == max_depth:
            done[:] = True
        np.add.at(out, owner[done], (total + diff / 15.0)[done])
        keep = ~done
        if not keep.any():
            return out
        # split every unfinished subinterval into its two halves
        a = np.concatenate([a[keep], m[keep]])
        b = np.concatenate([m[keep], b[keep]])
        mid = np.concatenate([lm[keep], rm[keep]])
        fa, fb, fm = (
            np.concatenate([fa[keep], fm[keep]]),
            np.concatenate([fm[keep], fb[keep]]),
            np.concatenate([flm[keep], frm[keep]]),
        )
        whole = np.concatenate([left[keep], right[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        m = mid
    return out


def integral_from_zero(f, x0: float, rtol: float = DEFAULT_RTOL, panels: int = HEAD_PANELS) -> float:
    """Integral of ``f`` over [0, x0] for an integrand possibly singular at 0."""
    if x0 <= 0:
        raise QuadratureError("upper limit must be positive")
    edges = x0 * np.power(2.0, -np.arange(panels + 1, dtype=float))
    vals = adaptive_simpson(f, edges[1:], edges[:-1], rtol)
    ratio = vals[-1] / vals[-2] if vals[-2] != 0 else 0.0
    if not np.isfinite(ratio) or ratio >= 1.0 or ratio < 0.0:
        raise QuadratureError("integrand is not integrable at 0")
    tail = vals[-1] * ratio / (1.0 - ratio)
    # sum smallest first
    return float(np.sum(vals[::-1]) + tail)


def cumulative_integral(f, points, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Return I[i] = integral of ``f`` over [0, points[i]].

    Panel integrals between consecutive points are computed once and
    accumulated, so each sub-integral is reused by every later point.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or x.size == 0 or x[0] <= 0 or np.any(np.diff(x) <= 0):
        raise QuadratureError("points must be positive and strictly increasing")
    head = integral_from_zero(f, x[0], rtol)
    if x.size == 1:
        return np.array([head])
    panels = adaptive_simpson(f, x[:-1], x[1:], rtol)
    return head + np.concatenate([[0.0], np.cumsum(panels)])
