import itertools
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci
from scipy import special as sps

from routeperf.analytic import (
    ModelParams,
    ProbabilityOverflowWarning,
    average_delay,
    beta_fn,
    delay_one_dir_beta,
    delay_one_dir_numeric,
    delay_two_dir_numeric,
    inner_wait_integral,
    pdr_one_dir,
    pdr_two_dir,
    rate_lambda,
)
from routeperf.special import velocity_pdf, velocity_sf

# Reference values from 30-digit mpmath quadrature of the defining integrals.
BETA = {0: 0.5, 1: 0.29604613472589548, 2: 0.19468247501860052, 50: 0.0025614627574326930}
PDR_ONE = {1: 0.060867883826384216, 10: 0.063384566128784504, 25: 0.067532155162223987}
PDR_TWO = {1: 0.058940272192605620, 10: 0.061281566766138419, 25: 0.065090783799858659}
PDR_ONE_MORNING_T10 = 0.36744147158991910
PDR_TWO_MORNING_T10 = 0.28418279598753748
T0_LIMIT = 0.060586937186524214
TINF_LIMIT = 0.53029346859326211
TWO_DIR_T0 = 0.058677515189658051
TAU_ONE_S5 = 0.023180404061593798
TAU_ONE_S3 = 0.013966258417931022
TAU_TWO_MORNING_S5 = 0.048823751443797112
TAU_TWO_S3 = 0.012976788511719888


def test_rate_lambda():
    assert rate_lambda(10, 11.11) == pytest.approx(0.00025, abs=1e-6)
    assert rate_lambda(70, 11.11) == pytest.approx(0.00175, abs=1e-6)
    assert rate_lambda(0, 11.11) == 0
    with pytest.raises(ValueError):
        rate_lambda(10, 0)
    with pytest.raises(ValueError):
        rate_lambda(-1, 11.11)


@pytest.mark.parametrize("kw", [dict(lam=-1e-4), dict(range_r=0), dict(wait_t=-1), dict(sigma=0),
                                dict(gamma=0), dict(delta=-0.1)])
def test_params_invariants(kw):
    with pytest.raises(ValueError):
        ModelParams(**kw)


def _inner_oracle(u, sigma, wait):
    mpmath.mp.dps = 40
    p = lambda v: mpmath.exp(-v * v / (2 * sigma * sigma)) / (sigma * mpmath.sqrt(2 * mpmath.pi))
    f = lambda t: (u / t) * p(u / t)
    # the integrand peaks sharply just below t = wait when u >> sigma * wait
    pts = sorted({0, wait} | {wait * (1 - 2.0 ** -k) for k in range(1, 40)}
                 | {x for x in (u / (sigma * k) for k in (1, 3, 10)) if 0 < x < wait})
    return float(mpmath.quad(f, pts))


INNER_GRID = list(itertools.product((1, 10, 100, 500), (1, 5, 10), (1, 10, 25)))


@pytest.mark.parametrize("u,sigma,wait", INNER_GRID)
def test_inner_identity(u, sigma, wait):
    want = _inner_oracle(u, sigma, wait)
    got = inner_wait_integral(u, sigma, wait)
    if want == 0.0:
        # true value is below the smallest double
        assert got == 0.0
    else:
        assert abs(got - want) / want <= 1e-8


def test_inner_spec_example():
    assert inner_wait_integral(100, 5, 10) == pytest.approx(_inner_oracle(100, 5, 10), rel=1e-8)


def test_beta_reference_values():
    for z, want in BETA.items():
        assert beta_fn(z) == pytest.approx(want, rel=1e-8, abs=1e-9)
    assert abs(beta_fn(0.0) - 0.5) <= 1e-6
    assert beta_fn(50) < beta_fn(1)
    with pytest.raises(ValueError):
        beta_fn(-0.1)


def test_beta_two_against_fine_grid():
    # midpoint sum on a log-spaced grid; E1 from scipy
    edges = np.concatenate([[0.0], np.logspace(-10, np.log10(40.0), 400001)])
    x = 0.5 * (edges[1:] + edges[:-1])
    oracle = float(np.sum(x * np.exp(-2 * x) * sps.exp1(x * x) * np.diff(edges)))
    assert beta_fn(2.0) == pytest.approx(oracle, abs=1e-6)


@given(st.floats(min_value=0.0, max_value=200.0), st.floats(min_value=0.0, max_value=20.0))
@settings(max_examples=40, deadline=None)
def test_beta_positive_nonincreasing(z, dz):
    a, b = beta_fn(z), beta_fn(z + dz)
    assert a > 0 and b > 0
    assert b <= a * (1 + 1e-9)


def test_pdr_reference_values():
    for wait, want in PDR_ONE.items():
        assert pdr_one_dir(ModelParams(wait_t=wait)) == pytest.approx(want, rel=1e-8)
    for wait, want in PDR_TWO.items():
        assert pdr_two_dir(ModelParams(wait_t=wait)) == pytest.approx(want, rel=1e-8)
    morning = ModelParams(lam=0.00175, wait_t=10)
    assert pdr_one_dir(morning) == pytest.approx(PDR_ONE_MORNING_T10, rel=1e-8)
    assert pdr_two_dir(morning) == pytest.approx(PDR_TWO_MORNING_T10, rel=1e-8)


def test_pdr_limits():
    assert pdr_one_dir(ModelParams(lam=0)) == 0
    assert pdr_two_dir(ModelParams(lam=0)) == 0
    assert pdr_one_dir(ModelParams(wait_t=0)) == pytest.approx(T0_LIMIT, rel=1e-12)
    assert pdr_one_dir(ModelParams(wait_t=1e-6)) == pytest.approx(T0_LIMIT, rel=1e-6)
    assert pdr_one_dir(ModelParams(wait_t=1e9)) == pytest.approx(TINF_LIMIT, rel=1e-5)
    assert pdr_two_dir(ModelParams(wait_t=0)) == pytest.approx(TWO_DIR_T0, rel=1e-10)


def test_two_dir_first_term_closed_form():
    # integral of lam*exp(-(lam x)^2 - 2 lam x) over [0, R] via erf
    lam, r = 0.00175, 250.0
    want = math.exp(1) * math.sqrt(math.pi) / 2 * (math.erf(lam * r + 1) - math.erf(1))
    assert pdr_two_dir(ModelParams(lam=lam, wait_t=0)) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("lam,wait,sigma", [(0.00025, 10, 3.0), (0.00175, 5, 5.0), (0.001, 25, 1.0)])
def test_raw_double_integral_identity(lam, wait, sigma):
    r, gamma = 250.0, 1.0
    p = ModelParams(lam=lam, range_r=r, wait_t=wait, sigma=sigma, gamma=gamma)
    # wait-time term of the one-direction ratio, from the raw double integral
    inner = lambda t, x: lam * math.exp(-lam * x) * gamma * ((x - r) / t ** 2) * velocity_pdf((x - r) / t, sigma)
    hi = r + 60 * sigma * wait
    raw, _ = sci.dblquad(inner, r, hi, 1e-12, wait, epsabs=1e-14, epsrel=1e-11)
    reduced = pdr_one_dir(p) - (1 - math.exp(-lam * r))
    assert reduced == pytest.approx(raw, rel=1e-6)


DELAY_GRID = list(itertools.product((0.00025, 0.001, 0.00175), (1.0, 5.0, 10.0), (1, 10, 25)))


@pytest.mark.parametrize("lam,sigma,wait", DELAY_GRID)
def test_beta_form_matches_numeric(lam, sigma, wait):
    p = ModelParams(lam=lam, sigma=sigma, wait_t=wait)
    a, b = delay_one_dir_beta(p), delay_one_dir_numeric(p)
    assert abs(a - b) <= 1e-5 * abs(b)


def test_delay_reference_values():
    assert delay_one_dir_numeric(ModelParams(sigma=5, wait_t=10)) == pytest.approx(TAU_ONE_S5, rel=1e-7)
    assert delay_one_dir_beta(ModelParams(sigma=5, wait_t=10)) == pytest.approx(TAU_ONE_S5, rel=1e-7)
    assert delay_one_dir_beta(ModelParams(sigma=3, wait_t=10)) == pytest.approx(TAU_ONE_S3, rel=1e-7)
    assert delay_two_dir_numeric(ModelParams(sigma=3, wait_t=10)) == pytest.approx(TAU_TWO_S3, rel=1e-7)


def test_delay_two_dir_against_riemann_sum():
    lam, r, sigma, wait = 0.00175, 250.0, 5.0, 10.0
    p = ModelParams(lam=lam, sigma=sigma, wait_t=wait)
    edges = np.concatenate([[0.0], np.logspace(-8, np.log10(20000.0), 400001)])
    u = 0.5 * (edges[1:] + edges[:-1])
    x = u + r
    inner = u * sps.exp1(u * u / (2 * sigma ** 2 * wait ** 2)) / (2 * sigma * math.sqrt(2 * math.pi))
    oracle = lam * float(np.sum(np.exp(-(lam ** 2 * x ** 2 + 2 * lam * x)) * inner * np.diff(edges)))
    got = delay_two_dir_numeric(p)
    assert got == pytest.approx(oracle, rel=1e-5)
    assert got == pytest.approx(TAU_TWO_MORNING_S5, rel=1e-7)


def test_delay_trivial_cases():
    for fn in (delay_one_dir_numeric, delay_one_dir_beta, delay_two_dir_numeric):
        assert fn(ModelParams(wait_t=0)) == 0
        assert fn(ModelParams(lam=0)) == 0


def test_delay_linear_in_gamma():
    one = delay_one_dir_beta(ModelParams(sigma=5, wait_t=10, gamma=1))
    two = delay_one_dir_beta(ModelParams(sigma=5, wait_t=10, gamma=2))
    assert two == 2 * one


def test_average_delay():
    assert average_delay(0, ModelParams(delta=0.3)) == 0.3
    assert average_delay(1.2, ModelParams(delta=0.3)) == pytest.approx(1.5, abs=1e-15)
    assert average_delay(0, ModelParams(delta=0)) == 0
    with pytest.raises(ValueError):
        average_delay(-0.1, ModelParams())


def test_overflow_is_flagged_not_clamped():
    p = ModelParams(lam=0.00175, wait_t=25, gamma=50.0)
    with pytest.warns(ProbabilityOverflowWarning):
        value = pdr_one_dir(p)
    assert value > 1.0


def _seq(fn, **vary):
    (name, values), = vary.items()
    return [fn(ModelParams(**{name: v})) for v in values]


def _nondecreasing(xs):
    return all(b >= a - 1e-15 for a, b in zip(xs, xs[1:]))


@pytest.mark.parametrize("fn", [pdr_one_dir, pdr_two_dir])
def test_pdr_monotone_grids(fn):
    assert _nondecreasing(_seq(fn, wait_t=[0, 1, 2, 3, 4, 5, 10, 15, 20, 25]))
    assert _nondecreasing(_seq(fn, lam=[0, 1e-4, 2.5e-4, 5e-4, 1e-3, 1.75e-3]))
    assert _nondecreasing(_seq(fn, range_r=[50, 100, 250, 400, 800]))
    for v in _seq(fn, wait_t=[1, 10, 25]) + _seq(fn, lam=[1e-4, 1.75e-3]):
        assert 0 <= v <= 1 + 1e-9


def test_delay_monotone_in_wait():
    taus = _seq(delay_one_dir_numeric, wait_t=[0, 1, 2, 3, 4, 5, 10, 15, 20, 25])
    assert _nondecreasing(taus)
    assert all(t >= 0 for t in taus)


@given(
    lam=st.floats(min_value=1e-5, max_value=5e-3),
    wait=st.floats(min_value=0.1, max_value=30.0),
    sigma=st.floats(min_value=0.5, max_value=10.0),
)
@settings(max_examples=25, deadline=None)
def test_model_ranges_property(lam, wait, sigma):
    p = ModelParams(lam=lam, wait_t=wait, sigma=sigma)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ProbabilityOverflowWarning)
        for fn in (pdr_one_dir, pdr_two_dir):
            assert 0.0 <= fn(p) <= 1.0 + 1e-9
    assert delay_one_dir_numeric(p) >= 0
    assert delay_two_dir_numeric(p) >= 0
    a, b = delay_one_dir_beta(p), delay_one_dir_numeric(p)
    assert abs(a - b) <= 1e-5 * abs(b) + 1e-300
