"""Exponential integrals and the zero-mean Gaussian velocity law."""

from __future__ import annotations

import math

__all__ = ["exp_integral_ei", "exp_integral_e1", "velocity_pdf", "velocity_cdf", "velocity_sf"]

EULER_GAMMA = 0.57721566490153286060651209008240243
_EPS = 1e-17
_TINY = 1e-300
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Below this magnitude the alternating E1 series is used; above it the
# continued fraction converges quickly and avoids cancellation.
E1_SERIES_LIMIT = 1.0
# Ei(x) for x > 0: power series up to here, asymptotic expansion beyond.
EI_SERIES_LIMIT = 40.0


def _e1_series(x: float) -> float:
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_continued_fraction(x: float) -> float:
    # Modified Lentz evaluation of e^x E1(x).
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x)


def exp_integral_e1(x: float) -> float:
    """E1(x) = integral of e^-t / t over [x, inf), for x > 0."""
    if not x > 0:
        raise ValueError("E1 is only defined here for x > 0")
    if x <= E1_SERIES_LIMIT:
        return _e1_series(x)
    return _e1_continued_fraction(x)


def _ei_series(x: float) -> float:
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= x / k
        contrib = term / k
        total += contrib
        if contrib < _EPS * total:
            break
        k += 1
    return EULER_GAMMA + math.log(x) + total


def _ei_asymptotic(x: float) -> float:
    total = 1.0
    term = 1.0
    k = 1
    while True:
        prev = term
        term *= k / x
        if term < _EPS * total:
            break
        if term >= prev:
            # Divergent tail: the previous term bounds the error.
            break
        total += term
        k += 1
    return math.exp(x) * total / x


def exp_integral_ei(x: float) -> float:
    """Principal-value exponential integral Ei(x).

    For ``x < 0`` this is ``-E1(-x)``.  ``x = 0`` is the logarithmic
    singularity and raises ``ValueError``.
    """
    if x == 0:
        raise ValueError("Ei has a logarithmic singularity at 0")
    if x < 0:
        return -exp_integral_e1(-x)
    if x <= EI_SERIES_LIMIT:
        return _ei_series(x)
    return _ei_asymptotic(x)


def velocity_pdf(v: float, sigma: float) -> float:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return math.exp(-0.5 * (v / sigma) ** 2) / (sigma * _SQRT2PI)


def velocity_cdf(v: float, sigma: float) -> float:
    """Probability that a zero-mean Gaussian speed is at most ``v``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 0.5 * math.erfc(-v / (sigma * math.sqrt(2.0)))


def velocity_sf(v: float, sigma: float) -> float:
    """Upper tail ``1 - velocity_cdf(v, sigma)`` without cancellation."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 0.5 * math.erfc(v / (sigma * math.sqrt(2.0)))
