import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wolfflab.errors import AssumptionViolation
from wolfflab.params import (Regime, classify_regime, derive_exponents, params_from_mapping,
                             validate_params)


def test_valid_tuple():
    p = validate_params((3, 2, 5, 0, 1))
    assert p.as_tuple() == (3, 2.0, 5.0, 0.0, 1.0)
    assert isinstance(p.n, int)


def test_positive_weight_rejected():
    with pytest.raises(AssumptionViolation) as exc:
        validate_params((3, 2, 5, 0.5, 1))
    assert any("-a >= 0" in v for v in exc.value.violations)


def test_p_above_two_rejected():
    with pytest.raises(AssumptionViolation) as exc:
        validate_params((3, 2.5, 5, 0, 1))
    assert any("p <= 2" in v for v in exc.value.violations)


def test_all_violations_reported():
    with pytest.raises(AssumptionViolation) as exc:
        validate_params((2, 2.5, 0.1, 1.0, 1))
    assert len(exc.value.violations) >= 4


def test_mapping_defaults_and_missing_key():
    p = params_from_mapping({"n": 3, "p": 2, "q": 4})
    assert (p.a, p.beta) == (0.0, 1.0)
    with pytest.raises(AssumptionViolation):
        validate_params({"n": 3, "p": 2})


def test_low_q_only_when_allowed():
    with pytest.raises(AssumptionViolation):
        validate_params((3, 2, 0.5, 0, 1))
    assert validate_params((3, 2, 0.5, 0, 1), allow_low_q=True).q == 0.5


@pytest.mark.parametrize("raw", [(3, 2, math.nan, 0, 1), (3.5, 2, 4, 0, 1), (3, 2, 4, 0, 0)])
def test_rejects_nonsense(raw):
    with pytest.raises(AssumptionViolation):
        validate_params(raw)


def test_exponents_critical_case():
    ex = derive_exponents(validate_params((3, 2, 5, 0, 1)))
    assert ex.to_dict() == {"s0": 6.0, "pStar": 6.0, "qCritical": 5.0, "qLiouville": 3.0,
                            "fastRate": 1.0, "slowRate": 0.5, "integrabilityFloor": 3.0}


def test_exponents_subcritical_case():
    ex = derive_exponents(validate_params((3, 2, 4, 0, 1)))
    assert ex.s0 == pytest.approx(4.5)
    assert ex.slow_rate == pytest.approx(2 / 3)
    assert ex.q_critical == pytest.approx(5.0)


def test_exponents_with_weight():
    ex = derive_exponents(validate_params((5, 2, 3, -1, 1)))
    assert ex.s0 == pytest.approx(10.0)
    assert ex.q_critical == pytest.approx(5 / 3)
    assert ex.q_liouville == pytest.approx(4 / 3)
    assert ex.fast_rate == pytest.approx(3.0)
    assert ex.slow_rate == pytest.approx(0.5)


@pytest.mark.parametrize("raw, regime, lp", [
    ((3, 2, 2, 0, 1), Regime.NONEXISTENCE, True),
    ((3, 2, 3, 0, 1), Regime.NONEXISTENCE, True),
    ((3, 2, 4, 0, 1), Regime.SUBCRITICAL, True),
    ((3, 2, 5, 0, 1), Regime.CRITICAL, True),
    ((3, 2, 6, 0, 1), Regime.SUPERCRITICAL, True),
    ((5, 2, 3, -1, 1), Regime.SUPERCRITICAL, False),
])
def test_regimes(raw, regime, lp):
    rep = classify_regime(validate_params(raw))
    assert rep.regime is regime
    assert rep.lp_impossible is lp


def test_critical_band_width():
    near = validate_params((3, 2, 5 + 1e-6, 0, 1))
    assert classify_regime(near).regime is Regime.SUPERCRITICAL
    assert classify_regime(near, tol=1e-5).regime is Regime.CRITICAL


def test_report_json_round_trip():
    rep = classify_regime(validate_params((3, 2, 5, 0, 1)))
    back = json.loads(rep.to_json())
    assert back["regime"] == "Critical"
    assert back["exponents"]["s0"] == 6.0


valid = st.integers(3, 10).flatmap(lambda n: st.tuples(
    st.just(n),
    st.floats(1.01, 2.0),
    st.floats(0.05, 0.95),
    st.floats(0.0, 0.95),
    st.floats(0.05, 8.0),
))


def _build(t):
    n, p, beta_frac, a_frac, dq = t
    beta = beta_frac * n / p
    a = -a_frac * p * beta
    return validate_params((n, p, p - 1 + dq, a, beta))


@settings(max_examples=300, deadline=None)
@given(valid)
def test_s0_times_slow_rate_is_n(t):
    ex = derive_exponents(_build(t))
    assert math.isclose(ex.s0 * ex.slow_rate, t[0], rel_tol=1e-12)


def test_s0_times_slow_rate_symbolic():
    import sympy as sp

    n, p, q, a, beta = sp.symbols("n p q a beta", positive=True)
    s0 = n * (q - p + 1) / (p * beta + a)
    slow = (p * beta + a) / (q - p + 1)
    assert sp.simplify(s0 * slow - n) == 0


def test_s0_times_slow_rate_bulk():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        n = int(rng.integers(3, 12))
        p = rng.uniform(1.01, 2.0)
        beta = rng.uniform(0.05, 0.95) * n / p
        a = -rng.uniform(0, 0.95) * p * beta
        q = p - 1 + rng.uniform(0.01, 10)
        ex = derive_exponents(validate_params((n, p, q, a, beta)))
        assert abs(ex.s0 * ex.slow_rate - n) <= 1e-12 * n


@settings(max_examples=300, deadline=None)
@given(valid)
def test_fast_beats_slow_iff_above_liouville(t):
    params = _build(t)
    ex = derive_exponents(params)
    if abs(params.q - ex.q_liouville) > 1e-9:
        assert (ex.fast_rate > ex.slow_rate) == (params.q > ex.q_liouville)


@settings(max_examples=200, deadline=None)
@given(valid)
def test_floor_below_critical_norm(t):
    ex = derive_exponents(_build(t))
    # p* is the Sobolev-type exponent, always above the integrability floor
    assert ex.p_star > ex.integrability_floor
    assert ex.q_critical > ex.q_liouville
