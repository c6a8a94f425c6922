import csv
import io
import math

import numpy as np
import pytest

from wolfflab import kernels
from wolfflab.errors import DivergentPotential, DomainError
from wolfflab.params import derive_exponents, validate_params
from wolfflab.profiles import BubbleProfile, PowerLawProfile, RadialProfile, log_grid, sample
from wolfflab.radgeom import QuadratureConfig
from wolfflab.shoot import singular_profile
from wolfflab.wolff import ratio_R, wolff_exponent, wolff_potential, wolff_split

from _oracles import SINGULAR_C_343, newtonian_potential, wolff_nested_quad

P343 = validate_params((3, 2, 4, 0, 1))
P353 = validate_params((3, 2, 5, 0, 1))


def _bump(radius=1.0, n_nodes=400):
    grid = np.geomspace(1e-6 * radius, radius, n_nodes)
    return RadialProfile(grid, np.exp(-(grid / radius) ** 2 * 3.0), 0.0, math.inf)


def test_singular_solution_value():
    ev = wolff_potential(singular_profile(P343), P343, 1.0)
    assert ev.value == pytest.approx(18 * math.pi * SINGULAR_C_343 ** 4, rel=1e-10)
    assert ev.w1 + ev.w2 == pytest.approx(ev.value, rel=1e-15)
    assert ev.error_estimate <= 1e-8 * ev.value


@pytest.mark.parametrize("d", [0.05, 1.0, 30.0])
def test_matches_newtonian_oracle_on_bubble(d):
    b = BubbleProfile(3, 2)
    ref = newtonian_potential(lambda r: b(r) ** 5, d)
    # the exact bubble satisfies u = W(u^5) / (4 pi)
    assert ref == pytest.approx(4 * math.pi * float(b(d)), rel=1e-9)
    assert wolff_potential(b, P353, d).value == pytest.approx(ref, rel=2e-5)


def test_general_bubble_near_centre_matches_nested_quadrature():
    # |x| well inside the bubble's length scale, so the t-integrand only
    # settles into its tail far beyond 2|x|
    b = BubbleProfile(5, 1.5, -0.5)
    params = validate_params((5, 1.5, b.q, -0.5, 1.0))
    ref = wolff_nested_quad(lambda r: r ** -0.5 * b(r) ** b.q, 5, 1.5, 1.0, 0.1)
    # the default 400-per-decade sampling of analytic profiles limits accuracy
    assert wolff_potential(b, params, 0.1).value == pytest.approx(ref, rel=2e-5)


def test_matches_newtonian_oracle_on_bump():
    # a tabulated profile has a kink at every node, so ask for 1e-7 only
    u = _bump()
    quad = QuadratureConfig(rtol=1e-7)
    for d in (0.2, 1.0, 3.0):
        ref = newtonian_potential(lambda r: float(u(r)) ** 4, d)
        assert wolff_potential(u, P343, d, quad).value == pytest.approx(ref, rel=1e-6)


def test_numpy_backend_agrees():
    u = singular_profile(P343)
    a = wolff_potential(u, P343, 2.0, backend=kernels.numpy_impl).value
    b = wolff_potential(u, P343, 2.0).value
    assert a == pytest.approx(b, rel=1e-12)


def test_ratio_constant_for_singular_solution():
    rep = ratio_R(singular_profile(P343), P343, np.geomspace(1e-2, 1e2, 9))
    assert rep.upper / rep.lower - 1 <= 1e-6
    assert rep.lower == pytest.approx(1 / (4 * math.pi), rel=1e-8)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["radius", "u", "W", "w1", "w2", "ratio"]
    assert len(rows) == 10


@pytest.mark.parametrize("raw", [(5, 2, 3, -1, 1), (4, 1.5, 4, -0.5, 1), (6, 1.7, 2.0, -0.4, 1.3)])
def test_power_law_homogeneity(raw):
    params = validate_params(raw)
    t = derive_exponents(params).slow_rate
    u = PowerLawProfile(1.3, t)
    w1 = wolff_potential(u, params, 1.0).value
    w2 = wolff_potential(u, params, 4.0).value
    assert -math.log(w2 / w1) / math.log(4.0) == pytest.approx(wolff_exponent(params, t), abs=1e-8)
    assert wolff_exponent(params, t) == pytest.approx(t, abs=1e-12)


def test_inner_part_scales():
    params = validate_params((5, 2, 3, -1, 1))
    t = derive_exponents(params).slow_rate
    u = PowerLawProfile(1.0, t)
    a1, _ = wolff_split(u, params, 1.0)
    a2, _ = wolff_split(u, params, 2.0)
    expo = (params.p * params.beta + params.a - params.q * t) / (params.p - 1)
    assert a2 / a1 == pytest.approx(2 ** expo, rel=1e-7)


def test_inner_part_vanishes_outside_support():
    w1, w2 = wolff_split(_bump(radius=1.0), P343, 2.5)
    assert w1 == 0.0
    assert w2 > 0


def test_compact_source_lower_bound():
    u = _bump()
    fast = derive_exponents(P343).fast_rate
    vals = [wolff_potential(u, P343, d).value * d ** fast for d in (100.0, 1000.0, 1e4)]
    assert min(vals) > 0
    assert vals[-1] == pytest.approx(vals[-2], rel=1e-3)


def test_zero_limit():
    base = _bump()
    small = RadialProfile(base.grid, 1e-6 * base.values, 0.0, math.inf)
    w0 = wolff_potential(base, P343, 1.0).value
    ws = wolff_potential(small, P343, 1.0).value
    assert ws == pytest.approx(w0 * 1e-24, rel=1e-9)


def test_monotone_in_radius():
    b = BubbleProfile(3, 2)
    vals = [wolff_potential(b, P353, d).value for d in np.geomspace(0.1, 100, 7)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_divergent_tail_detected():
    # u^q decays like r^-2 = r^-(p beta): outer integral diverges logarithmically
    with pytest.raises(DivergentPotential):
        wolff_potential(PowerLawProfile(1.0, 0.5), P343, 1.0)


def test_needs_positive_radius():
    with pytest.raises(DomainError):
        wolff_potential(BubbleProfile(3, 2), P353, 0.0)
