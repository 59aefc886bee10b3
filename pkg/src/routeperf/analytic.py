"""Delivery-ratio and delay models for sparse vehicles on a straight road.

Vehicles are spaced by a Poisson process of spatial rate ``lambda``.  A
packet is delivered at once when the gap to the next vehicle is within
radio range; otherwise the carrier waits up to ``wait_t`` seconds for
the gap to close at a zero-mean Gaussian relative speed.  Two road
layouts are covered: a single direction, and two opposing directions
whose combined gap law has exponent ``lambda^2 x^2 + 2 lambda x``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate
from .special import exp_integral_e1, velocity_sf

__all__ = [
    "ModelParams",
    "ProbabilityOverflowWarning",
    "rate_lambda",
    "beta_fn",
    "inner_wait_integral",
    "pdr_one_dir",
    "pdr_two_dir",
    "delay_one_dir_numeric",
    "delay_one_dir_beta",
    "delay_two_dir_numeric",
    "average_delay",
    "MIDNIGHT_LAMBDA",
    "MORNING_LAMBDA",
    "REFERENCE_WAIT_TIMES",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)
# Width of the first panel that is integrated analytically to step over
# the logarithmic singularity of E1 at the origin.
SINGULAR_EPS = 1e-8

MIDNIGHT_LAMBDA = 0.00025
MORNING_LAMBDA = 0.00175
REFERENCE_WAIT_TIMES = (1, 2, 3, 4, 5, 10, 15, 20, 25)


class ProbabilityOverflowWarning(RuntimeWarning):
    """A modelled probability came out above one (gamma too large)."""


@dataclass(frozen=True)
class ModelParams:
    lam: float = MIDNIGHT_LAMBDA  # vehicles per metre
    range_r: float = 250.0
    wait_t: float = 10.0
    sigma: float = 3.0
    gamma: float = 1.0
    delta: float = 0.3

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")
        if not self.range_r > 0:
            raise ValueError("range_r must be > 0")
        if not self.wait_t >= 0:
            raise ValueError("wait_t must be >= 0")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")


def rate_lambda(traffic_volume: float, speed: float) -> float:
    """Spatial vehicle density from an hourly volume and a mean speed."""
    if not speed > 0:
        raise ValueError("speed must be positive")
    if traffic_volume < 0:
        raise ValueError("traffic volume must be non-negative")
    return traffic_volume / (3600.0 * speed)


def _half_e1_mass(eps: float) -> float:
    # integral of y * E1(y^2) over [0, eps]
    u = eps * eps
    return 0.5 * (u * exp_integral_e1(u) - math.expm1(-u))


def beta_fn(z: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """beta(z) = -integral_0^inf x e^{-z x} Ei(-x^2) dx."""
    if z < 0:
        raise ValueError("beta is defined for z >= 0")

    def f(x):
        return x * math.exp(-z * x) * exp_integral_e1(x * x)

    head = _half_e1_mass(SINGULAR_EPS)
    scale = 1.0 if z <= 1.0 else 1.0 / z
    return head + integrate(f, SINGULAR_EPS, math.inf, quad, scale=scale)


def inner_wait_integral(u: float, sigma: float, wait_t: float) -> float:
    """Closed form of integral_0^T (u/t) p(u/t) dt for a gap excess ``u``."""
    if u <= 0 or wait_t <= 0:
        return 0.0
    a = u * u / (2.0 * sigma * sigma * wait_t * wait_t)
    return u * exp_integral_e1(a) / (2.0 * sigma * _SQRT2PI)


def _check_probability(value: float, what: str) -> float:
    if value > 1.0 + 1e-9:
        warnings.warn(f"{what} = {value!r} exceeds 1", ProbabilityOverflowWarning, stacklevel=3)
    return value


def _wait_scale(p: ModelParams) -> float:
    return p.sigma * p.wait_t


def pdr_one_dir(p: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    if p.lam == 0:
        return 0.0
    direct = -math.expm1(-p.lam * p.range_r)
    if p.wait_t == 0:
        return direct
    lam, sigma, wait = p.lam, p.sigma, p.wait_t

    def f(u):
        return math.exp(-lam * u) * velocity_sf(u / wait, sigma)

    tail = integrate(f, 0.0, math.inf, quad, scale=min(_wait_scale(p), 1.0 / lam))
    value = direct + lam * p.gamma * math.exp(-lam * p.range_r) * tail
    return _check_probability(value, "one-direction PDR")


def _two_dir_exponent(lam: float, x: float) -> float:
    return lam * lam * x * x + 2.0 * lam * x


def pdr_two_dir(p: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    if p.lam == 0:
        return 0.0
    lam, r = p.lam, p.range_r
    direct = integrate(lambda x: lam * math.exp(-_two_dir_exponent(lam, x)), 0.0, r, quad)
    if p.wait_t == 0:
        return direct
    sigma, wait = p.sigma, p.wait_t

    def f(u):
        return math.exp(-_two_dir_exponent(lam, u + r)) * velocity_sf(u / wait, sigma)

    tail = integrate(f, 0.0, math.inf, quad, scale=min(_wait_scale(p), 1.0 / lam))
    value = direct + lam * p.gamma * tail
    return _check_probability(value, "two-direction PDR")


def _delay_integral(weight, p: ModelParams, quad: QuadratureSpec) -> float:
    # integral of weight(u) * inner_wait_integral(u) over u in [0, inf)
    c = p.sigma * p.wait_t * math.sqrt(2.0)
    norm = 1.0 / (2.0 * p.sigma * _SQRT2PI)
    eps_u = SINGULAR_EPS * c
    head = weight(0.0) * norm * c * c * _half_e1_mass(SINGULAR_EPS)

    def f(u):
        y = u / c
        return weight(u) * norm * u * exp_integral_e1(y * y)

    return head + integrate(f, eps_u, math.inf, quad, scale=c)


def delay_one_dir_numeric(p: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    if p.lam == 0 or p.wait_t == 0:
        return 0.0
    lam = p.lam
    body = _delay_integral(lambda u: math.exp(-lam * u), p, quad)
    return lam * p.gamma * math.exp(-lam * p.range_r) * body


def delay_one_dir_beta(p: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Same quantity as :func:`delay_one_dir_numeric`, through beta(z)."""
    if p.lam == 0 or p.wait_t == 0:
        return 0.0
    z = p.lam * p.wait_t * p.sigma * math.sqrt(2.0)
    pref = p.lam * p.gamma * p.sigma * p.wait_t ** 2 * math.exp(-p.lam * p.range_r) / _SQRT2PI
    return pref * beta_fn(z, quad)


def delay_two_dir_numeric(p: ModelParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    if p.lam == 0 or p.wait_t == 0:
        return 0.0
    lam, r = p.lam, p.range_r
    body = _delay_integral(lambda u: math.exp(-_two_dir_exponent(lam, u + r)), p, quad)
    return lam * p.gamma * body


def average_delay(tau0: float, p: ModelParams) -> float:
    if tau0 < 0:
        raise ValueError("tau0 must be non-negative")
    return tau0 + p.delta
