import math

import pytest

from wingwrap import (GripState, capstan_tension_ratio, required_normal_force, slide_check)
from wingwrap.hold import G


def test_required_force_zero_mass():
    assert required_normal_force(0.0, 0.5) == 0.0


def test_required_force_value():
    assert required_normal_force(0.5, 0.5) == pytest.approx(9.80665, abs=1e-12)


@pytest.mark.parametrize("m", [0.1, 0.45, 2.0])
def test_required_force_halves_with_double_mu(m):
    assert required_normal_force(m, 0.8) == pytest.approx(0.5 * required_normal_force(m, 0.4),
                                                          rel=1e-15)


def test_frictionless_hold_is_an_error():
    with pytest.raises(ValueError, match="frictionless hold impossible"):
        required_normal_force(0.3, 0.0)


def test_capstan_examples():
    assert capstan_tension_ratio(0.0, 0.6) == 1.0
    assert capstan_tension_ratio(math.log(2) / 0.6, 0.6) == pytest.approx(2.0, abs=1e-12)
    a, b, mu = 1.3, 2.1, 0.45
    assert capstan_tension_ratio(a + b, mu) == pytest.approx(
        capstan_tension_ratio(a, mu) * capstan_tension_ratio(b, mu), abs=1e-12)


def test_capstan_rejects_negative():
    with pytest.raises(ValueError):
        capstan_tension_ratio(-1.0, 0.5)


def test_no_squeeze_slides():
    r = slide_check(GripState([], 4.5, 0.6, 0.45))
    assert not r.holds and r.capacity == 0.0 and r.margin == 0.0
    assert not slide_check(GripState([0.0, 0.0], 4.5, 0.6, 0.45)).holds


def test_squeeze_holds_with_margin():
    r = slide_check(GripState([10.0, 20.0], 4.0, 0.5, 0.45))
    assert r.capacity == pytest.approx(15.0)
    assert r.required == pytest.approx(0.45 * G)
    assert r.holds
    assert r.margin == pytest.approx(15.0 / (0.45 * G))
    assert r.margin == pytest.approx(3.40, abs=5e-3)


def test_massless_vehicle_holds_with_infinite_margin():
    r = slide_check(GripState([], 0.0, 0.5, 0.0))
    assert r.holds and math.isinf(r.margin)


def test_exact_required_force_gives_unit_margin():
    m, mu = 0.45, 0.6
    r = slide_check(GripState([required_normal_force(m, mu)], 3.0, mu, m))
    assert r.holds
    assert r.margin == pytest.approx(1.0, abs=1e-9)


def test_grip_state_validation():
    with pytest.raises(ValueError):
        GripState([-1.0], 1.0, 0.5, 0.4)
    with pytest.raises(ValueError):
        GripState([1.0], -0.1, 0.5, 0.4)
