import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtr

from switchcav.dynamics import (
    EmitterParams,
    alpha_infinity,
    alpha_switch,
    evaluate,
    intensity,
    population,
    population_ratio_infinity,
)
from switchcav.rate_models import SwitchProfile, switched_rate

# mpmath, 40 digits
EXP_M014 = 0.86935823539880581
EXP_P014 = 1.1502737988572273
EXP_M015 = 0.86070797642505781
ALPHA_ONE_TAU = 0.088496878235998083  # 0.14 (1 - e^-1)

ENHANCE = SwitchProfile(1.0, 4.0, 150.0, 35.0, 0.12, "hard")
INHIBIT = SwitchProfile(5.0, -4.0, 150.0, 35.0, 0.12, "hard")
E0 = EmitterParams()


def _unswitched(p):
    return SwitchProfile(p.gamma0, 0.0, p.t0pu, p.tau_sw, p.tau_pu, p.step_mode)


def _erf_alpha(p, t):
    """Closed form of the erf-step integral: a Gaussian-smoothed exponential."""
    sigma = p.tau_pu / (2 * math.sqrt(2 * math.log(2)))
    tau = p.tau_sw
    s = t - p.t0pu
    val = (-tau * math.exp(-s / tau) * ndtr(s / sigma)
           + tau * math.exp(sigma**2 / (2 * tau**2)) * ndtr((s + sigma**2 / tau) / sigma))
    return p.dgamma * 1e-3 * val


def test_emitter_validation():
    with pytest.raises(ValueError):
        EmitterParams(n02=-1.0)
    with pytest.raises(ValueError):
        EmitterParams(gamma_nrad=-0.1)


def test_unswitched_is_plain_exponential():
    t = np.linspace(0, 1000, 11)
    np.testing.assert_allclose(population(_unswitched(ENHANCE), E0, t), np.exp(-1e-3 * t), rtol=1e-15)


def test_alpha_one_tau_after_hard_switch():
    assert alpha_switch(ENHANCE, 185.0) == pytest.approx(ALPHA_ONE_TAU, rel=1e-14)
    assert alpha_switch(ENHANCE, 149.999) == 0.0


def test_alpha_infinity_and_ratio():
    assert alpha_infinity(ENHANCE) == pytest.approx(0.14, rel=1e-15)
    assert population_ratio_infinity(ENHANCE) == pytest.approx(EXP_M014, rel=1e-15)
    assert population_ratio_infinity(INHIBIT) == pytest.approx(EXP_P014, rel=1e-15)


def test_depletion_at_long_time():
    ratio = population(ENHANCE, E0, 1000.0) / population(_unswitched(ENHANCE), E0, 1000.0)
    assert ratio == pytest.approx(EXP_M014, rel=1e-9)


def test_fast_strong_switch():
    p = SwitchProfile(1.0, 15.0, 150.0, 10.0, 0.12, "hard")
    ratio = population(p, E0, 1000.0) / math.exp(-1.0)
    assert ratio == pytest.approx(EXP_M015, rel=1e-12)


@pytest.mark.parametrize("t", [149.0, 149.9, 150.0, 150.06, 150.12, 150.3, 185.0, 1000.0])
def test_erf_alpha_matches_closed_form(t):
    p = SwitchProfile(1.0, 4.0, 150.0, 35.0, 0.12, "erf")
    assert alpha_switch(p, t, rtol=1e-12) == pytest.approx(_erf_alpha(p, t), rel=1e-9, abs=1e-15)


def test_erf_alpha_long_time_limit():
    p = SwitchProfile(1.0, 4.0, 150.0, 35.0, 0.12, "erf")
    sigma = 0.12 / (2 * math.sqrt(2 * math.log(2)))
    expected = 0.14 * math.exp(sigma**2 / (2 * 35.0**2))
    assert alpha_switch(p, 150.0 + 60 * 35.0) == pytest.approx(expected, rel=1e-9)


def test_before_excitation_rejected():
    with pytest.raises(ValueError, match="before excitation"):
        population(ENHANCE, EmitterParams(t0exc=10.0), 5.0)
    assert intensity(ENHANCE, EmitterParams(t0exc=10.0), 5.0) == 0.0


def test_excitation_after_switch_starts_at_n02():
    e = EmitterParams(n02=2.0, t0exc=200.0)
    assert population(ENHANCE, e, 200.0) == 2.0
    # only the part of the switch after excitation acts
    dalpha = 0.14 * (math.exp(-50 / 35) - math.exp(-150 / 35))
    expected = 2.0 * math.exp(-1e-3 * 100 - dalpha)
    assert population(ENHANCE, e, 300.0) == pytest.approx(expected, rel=1e-13)


def test_nonradiative_channel():
    e = EmitterParams(gamma_nrad=2.0)
    assert population(ENHANCE, e, 100.0) == pytest.approx(math.exp(-0.3), rel=1e-15)
    # the radiative intensity only carries the radiative rate
    assert intensity(ENHANCE, e, 100.0) == pytest.approx(math.exp(-0.3), rel=1e-15)


def test_burst_equals_purcell_enhancement():
    i_sw = intensity(ENHANCE, E0, 150.0)
    i_us = intensity(_unswitched(ENHANCE), E0, 150.0)
    assert i_sw / i_us == pytest.approx(5.0, rel=1e-14)


def test_evaluate_identity():
    t = np.arange(0.0, 1000.5, 0.5)
    res = evaluate(ENHANCE, E0, t)
    assert np.array_equal(res.intensity, res.rate * res.population)
    assert np.array_equal(res.rate, switched_rate(ENHANCE, t))


profiles = st.builds(
    SwitchProfile,
    gamma0=st.floats(0.5, 5.0),
    dgamma=st.floats(0.0, 45.0),
    t0pu=st.floats(10.0, 300.0),
    tau_sw=st.floats(5.0, 100.0),
    tau_pu=st.floats(0.0, 0.5),
    step_mode=st.sampled_from(["hard", "erf"]),
)


@settings(max_examples=40, deadline=None)
@given(profiles, st.floats(0.0, 1500.0))
def test_switched_never_exceeds_unswitched_population(p, t):
    assert population(p, E0, t) <= population(_unswitched(p), E0, t) * (1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(profiles, st.floats(0.01, 1500.0), st.floats(0.0, 3.0))
def test_log_derivative_is_minus_total_rate(p, t, gnr):
    # stay clear of the step where the derivative jumps
    if abs(t - p.t0pu) < 1.0 + 20 * p.tau_pu:
        t = p.t0pu + 1.0 + 20 * p.tau_pu + abs(t - p.t0pu)
    e = EmitterParams(gamma_nrad=gnr)
    h = 1e-3
    d = (math.log(population(p, e, t + h, rtol=1e-13))
         - math.log(population(p, e, t - h, rtol=1e-13))) / (2 * h)
    expected = -(switched_rate(p, t) + gnr) * 1e-3
    assert d == pytest.approx(expected, rel=1e-6, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(profiles, st.lists(st.floats(0.0, 1500.0), min_size=1, max_size=20))
def test_intensity_is_rate_times_population(p, ts):
    t = np.array(ts)
    assert np.array_equal(intensity(p, E0, t), switched_rate(p, t) * population(p, E0, t))
