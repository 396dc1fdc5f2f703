"""Adaptive quadrature helpers for radial jump-density integrals.

All radial integrands here are smooth away from s = 0, possibly singular
(but integrable) at 0, and possibly oscillatory through a cos(u*s) factor.
The workhorse splits the range into log-spaced decade panels and runs
scipy's QUADPACK on each; oscillatory panels switch to the QAWO weighted
rule.  Integrals over (0, a] are extended downward a decade at a time until
the new panel stops contributing, and likewise upward for infinite tails.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

DEFAULT_REL_TOL = 1e-9

# hard stops for the decade-descent / ascent loops
_MAX_DECADES_DOWN = 60
_MAX_DECADES_UP = 60
_TINY = 1e-300


class TailDivergenceError(ArithmeticError):
    """Raised when a decade-extension loop fails to converge."""


def _quad(f, a, b, rel_tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=_TINY, epsrel=rel_tol, limit=200)
    return val


def _panel_edges(a: float, b: float) -> np.ndarray:
    """Decade boundaries covering [a, b], endpoints included."""
    lo = math.floor(math.log10(a))
    hi = math.ceil(math.log10(b))
    edges = [a]
    for k in range(lo + 1, hi):
        e = 10.0**k
        if a < e < b:
            edges.append(e)
    edges.append(b)
    return np.asarray(edges)


def integrate_panels(f, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Integrate f over (a, b) on log-spaced decade panels.

    a == 0 triggers downward extension (f must be integrable at 0);
    b == inf triggers upward extension (f must have a decaying tail).
    """
    if b <= a:
        return 0.0
    finite_hi = b if np.isfinite(b) else max(a, 1.0) * 10.0
    anchor_lo = a if a > 0 else finite_hi * 1e-1

    total = 0.0
    for lo, hi in zip(*(lambda e: (e[:-1], e[1:]))(_panel_edges(anchor_lo, finite_hi))):
        total += _quad(f, lo, hi, rel_tol)

    # successive decade contributions of an integrable power-law-ish
    # integrand decay geometrically, so stopping a fair margin below the
    # requested tolerance bounds the discarded remainder by ~rel_tol
    stop = 0.05 * rel_tol

    if a == 0.0:
        lo = anchor_lo
        scale = abs(total)
        for k in range(_MAX_DECADES_DOWN):
            piece = _quad(f, lo / 10.0, lo, rel_tol)
            total += piece
            scale = max(scale, abs(total))
            lo /= 10.0
            if abs(piece) <= stop * max(scale, _TINY):
                break
        else:
            raise TailDivergenceError("integrand does not decay toward 0")

    if not np.isfinite(b):
        hi = finite_hi
        scale = max(abs(total), _TINY)
        for k in range(_MAX_DECADES_UP):
            piece = _quad(f, hi, 10.0 * hi, rel_tol)
            total += piece
            scale = max(scale, abs(total))
            hi *= 10.0
            if abs(piece) <= stop * scale:
                break
        else:
            raise TailDivergenceError("tail not integrable")

    return total


def _cos_weighted(f, u, a, b, rel_tol):
    """integral of f(s) cos(u s) over [a, b], robust to many oscillations."""
    if u * (b - a) < 40.0:
        return _quad(lambda s: f(s) * math.cos(u * s), a, b, rel_tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            f, a, b, weight="cos", wvar=u, epsabs=_TINY, epsrel=rel_tol, limit=400
        )
    return val


def cos_transform(q, u: float, s_max: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """integral of (1 - cos(u s)) q(s) over (0, s_max).

    Near the origin (u s < 1e-4) the integrand is replaced by its series
    (u s)^2/2 - (u s)^4/24, which removes the cancellation against the
    singular factor of q; beyond that, decade panels with QAWO where the
    phase winds quickly.
    """
    if u == 0.0:
        return 0.0
    u = abs(u)
    s_series = min(1e-4 / u, s_max)

    total = 0.0
    if s_series > 0:
        m2 = integrate_panels(lambda s: s * s * q(s), 0.0, s_series, rel_tol)
        m4 = integrate_panels(lambda s: s**4 * q(s), 0.0, s_series, rel_tol)
        total += 0.5 * u * u * m2 - u**4 * m4 / 24.0

    if s_series >= s_max:
        return total

    finite_hi = s_max if np.isfinite(s_max) else None
    edges = _panel_edges(s_series, finite_hi if finite_hi else s_series * 1e6)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mass = _quad(q, lo, hi, rel_tol)
        total += mass - _cos_weighted(q, u, lo, hi, rel_tol)

    if finite_hi is None:
        hi = edges[-1]
        scale = max(abs(total), _TINY)
        for k in range(_MAX_DECADES_UP):
            mass = _quad(q, hi, 10.0 * hi, rel_tol)
            piece = mass - _cos_weighted(q, u, hi, 10.0 * hi, rel_tol)
            total += piece
            hi *= 10.0
            if abs(mass) <= 0.5 * rel_tol * scale:
                break
        else:
            raise TailDivergenceError("tail not integrable")
    return total


def cosh_transform(q, v: float, s_max: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """integral of (cosh(v s) - 1) q(s) over (0, s_max); inf on divergence."""
    if v == 0.0:
        return 0.0
    v = abs(v)

    def integrand(s):
        w = v * s
        if w < 1e-4:
            return (0.5 * w * w + w**4 / 24.0) * q(s)
        return (math.cosh(w) - 1.0) * q(s)

    try:
        return integrate_panels(integrand, 0.0, s_max, rel_tol)
    except (TailDivergenceError, OverflowError):
        return math.inf


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_min(f, a: float, b: float, rel_tol: float = 1e-8):
    """Golden-section search for the minimum of a unimodal f on [a, b].

    Returns (x_min, f(x_min)).  Tolerance is relative to the bracket size.
    """
    h = b - a
    if h <= 0:
        return a, f(a)
    n = max(1, int(math.ceil(math.log(rel_tol) / math.log(_INV_PHI))))
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
    return (c, yc) if yc < yd else (d, yd)
