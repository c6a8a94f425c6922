import json
import math

import numpy as np
import pytest

from wolfflab.errors import DomainError, NotApplicable, WindowTooNarrow
from wolfflab.params import derive_exponents, validate_params
from wolfflab.profiles import BubbleProfile, PowerLawProfile, RadialProfile
from wolfflab.shoot import (Classification, classify_rate, fit_decay_rate, pde_residual,
                            shoot_radial, singular_profile)


def P(*raw):
    return validate_params(raw)


def test_singular_profile_constants():
    u = singular_profile(P(3, 2, 4, 0, 1))
    assert u.exponent == pytest.approx(2 / 3)
    assert u.coeff == pytest.approx(0.605707, abs=1e-6)
    w = singular_profile(P(5, 2, 3, -1, 1))
    assert (w.exponent, w.coeff) == (pytest.approx(0.5), pytest.approx(math.sqrt(5 / 4)))


def test_singular_profile_needs_liouville():
    with pytest.raises(NotApplicable):
        singular_profile(P(3, 2, 3, 0, 1))


def test_singular_profile_needs_pde_order():
    with pytest.raises(NotApplicable):
        singular_profile(P(5, 2, 3, -1, 1.2))


def test_singular_residual_vanishes():
    res = pde_residual(singular_profile(P(3, 2, 4, 0, 1)), P(3, 2, 4, 0, 1), np.array([0.1, 1.0, 10.0]))
    assert np.max(np.abs(res)) <= 1e-12


@pytest.mark.parametrize("n, p, a", [(3, 2, 0), (4, 1.5, -0.5), (7, 1.2, -1.0), (5, 1.9, -1.5)])
def test_bubble_family_solves_equation(n, p, a):
    b = BubbleProfile(n, p, a, scale=1.7)
    params = P(n, p, b.q, a, 1)
    res = pde_residual(b, params, np.geomspace(1e-3, 1e3, 25))
    assert np.max(np.abs(res)) <= 1e-9


def test_bubble_at_unit_radius():
    assert abs(pde_residual(BubbleProfile(3, 2), P(3, 2, 5, 0, 1), 1.0)) <= 1e-10


def test_mismatched_exponent_detected():
    res = pde_residual(BubbleProfile(3, 2), P(3, 2, 5.5, 0, 1), np.geomspace(0.1, 10, 9))
    assert np.max(np.abs(res)) > 1e-2


def test_residual_domain():
    with pytest.raises(DomainError):
        pde_residual(BubbleProfile(3, 2), P(3, 2, 5, 0, 1), 0.0)


def test_fit_exact_power_law():
    rate, resid = fit_decay_rate(PowerLawProfile(2.0, 0.37), (3.0, 3000.0))
    assert rate == pytest.approx(0.37, abs=1e-12)
    assert resid <= 1e-12


def test_fit_bubble_tail():
    rate, _ = fit_decay_rate(BubbleProfile(3, 2), (1e2, 1e3))
    assert rate == pytest.approx(1.0, abs=1e-3)


def test_fit_constant_profile():
    grid = np.geomspace(1, 1e3, 100)
    rate, _ = fit_decay_rate(RadialProfile(grid, np.full(100, 3.0)), (1.0, 1e3))
    assert rate == pytest.approx(0.0, abs=1e-12)


def test_fit_window_checks():
    with pytest.raises(WindowTooNarrow):
        fit_decay_rate(PowerLawProfile(1.0, 1.0), (1.0, 5.0))
    grid = np.geomspace(1, 1e3, 100)
    with pytest.raises(WindowTooNarrow):
        fit_decay_rate(RadialProfile(grid, grid ** -1.0), (10.0, 1e4))


def test_classify_rate_bands():
    params = P(3, 2, 6, 0, 1)
    assert classify_rate(0.41, 1e-4, (1, 100), params) is Classification.SLOW_DECAY
    assert classify_rate(0.99, 1e-4, (1, 100), params) is Classification.FAST_DECAY
    assert classify_rate(0.7, 1e-4, (1, 100), params) is Classification.UNDETERMINED
    assert classify_rate(0.41, 1e-1, (1, 100), params) is Classification.UNDETERMINED


def test_subcritical_shot_crosses():
    res = shoot_radial(1.0, P(3, 2, 4, 0, 1))
    assert res.classification is Classification.CROSSING
    assert 1 < res.crossing_radius < 100
    assert json.loads(res.to_json())["r0"] == res.crossing_radius


def test_critical_shot_is_the_bubble():
    res = shoot_radial(3 ** 0.25, P(3, 2, 5, 0, 1))
    assert res.classification is Classification.FAST_DECAY
    assert res.fitted_rate == pytest.approx(1.0, abs=0.02)
    r = np.linspace(0, 50, 501)
    r[0] = 1e-9
    exact = 3 ** 0.25 / np.sqrt(1 + r ** 2)
    assert np.max(np.abs(res.profile(r) / exact - 1)) <= 1e-4


@pytest.mark.parametrize("n, p, a", [(4, 2.0, 0.0), (3, 1.8, -0.3), (4, 1.5, -0.5), (5, 1.8, 0.0)])
def test_critical_shot_tracks_general_family(n, p, a):
    b = BubbleProfile(n, p, a)
    params = P(n, p, b.q, a, 1)
    res = shoot_radial(b.amplitude, params)
    r = np.geomspace(1e-3, res.r[-1] / 2, 60)
    assert np.max(np.abs(res.profile(r) / b(r) - 1)) <= 1e-4
    assert res.classification in (Classification.FAST_DECAY, Classification.UNDETERMINED)


@pytest.mark.parametrize("n, p, a", [(4, 2.0, 0.0), (3, 1.8, -0.3)])
def test_critical_shot_classified_when_tail_resolved(n, p, a):
    b = BubbleProfile(n, p, a)
    res = shoot_radial(b.amplitude, P(n, p, b.q, a, 1))
    assert res.classification is Classification.FAST_DECAY


def test_steep_fast_decay_is_left_undetermined():
    # decay r^-5 hits the round-off floor before the tail is asymptotic
    b = BubbleProfile(4, 1.5, -0.5)
    res = shoot_radial(b.amplitude, P(4, 1.5, b.q, -0.5, 1))
    assert res.classification is Classification.UNDETERMINED
    assert res.fitted_rate > derive_exponents(P(4, 1.5, b.q, -0.5, 1)).slow_rate


def test_supercritical_shot_decays_slowly():
    res = shoot_radial(1.0, P(3, 2, 6, 0, 1))
    assert res.classification is Classification.SLOW_DECAY
    assert res.fitted_rate == pytest.approx(0.4, abs=0.02)
    assert res.profile.tail_exponent == pytest.approx(derive_exponents(P(3, 2, 6, 0, 1)).slow_rate)


def test_flux_and_profile_decrease():
    res = shoot_radial(2.0, P(4, 1.5, 4, -0.5, 1))
    assert np.all(np.diff(res.w) <= 0)
    assert np.all(np.diff(res.U) <= 0)
    s = res.state(10)
    assert s.r == res.r[10] and s.U == res.U[10]


def test_shoot_input_checks():
    with pytest.raises(DomainError):
        shoot_radial(-1.0, P(3, 2, 5, 0, 1))
    with pytest.raises(NotApplicable):
        shoot_radial(1.0, P(3, 2, 5, 0, 0.9))
