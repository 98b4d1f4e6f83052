import math

import numpy as np
import pytest

from wingwrap import (HingeSpec, PoleSpec, SegmentSpec, SpecError, VehicleSpec, WingSpec,
                      build_model, validate_spec)
from wingwrap.model import LEFT, RIGHT

from conftest import vehicle_with


def test_rod_inertia_about_own_centre():
    m = build_model(VehicleSpec())
    assert m.inertia[1] == pytest.approx(3.75e-5, rel=1e-12)
    assert np.all(m.inertia > 0)


def test_total_mass_with_tip_fraction():
    m = build_model(VehicleSpec(tip_mass_fraction=0.25))
    assert m.baseline_mass == pytest.approx(0.36, rel=1e-12)
    assert m.total_mass == pytest.approx(0.45, rel=1e-12)
    assert m.tip_mass == pytest.approx(0.045, rel=1e-12)


def test_tip_mass_shifts_tip_segment_com():
    m = build_model(VehicleSpec(tip_mass_fraction=0.25))
    tip = m.tip_body(LEFT)
    assert m.mass[tip] == pytest.approx(0.065)
    assert m.com[tip] == pytest.approx((0.02 * 0.075 + 0.045 * 0.15) / 0.065, rel=1e-12)
    # weighted average of rod centre and tip point: 0.00825 / 0.065
    assert m.com[tip] == pytest.approx(0.126923, abs=1e-6)
    # rod about its own centre plus parallel-axis terms for rod and point mass
    c = m.com[tip]
    expect = 0.02 * 0.15 ** 2 / 12 + 0.02 * (0.075 - c) ** 2 + 0.045 * (0.15 - c) ** 2
    assert m.inertia[tip] == pytest.approx(expect, rel=1e-12)


def test_joint_layout():
    m = build_model(VehicleSpec())
    assert m.nq == 3 + 8
    assert list(m.qindex) == [-1] + list(range(3, 11))
    rigid = build_model(vehicle_with(root_rigid=True))
    assert rigid.nq == 3 + 6
    assert rigid.qindex[1] == -1 and rigid.qindex[5] == -1


def test_model_is_read_only():
    m = build_model(VehicleSpec())
    with pytest.raises(ValueError):
        m.mass[0] = 1.0


def test_default_spec_validates():
    assert validate_spec(VehicleSpec(), PoleSpec()) == []


def test_zero_radius_reported_with_path():
    issues = validate_spec(VehicleSpec(), PoleSpec(radius=0.0))
    assert [str(i) for i in issues] == ["PoleSpec.radius must be > 0"]


def test_tip_fraction_bound():
    issues = validate_spec(VehicleSpec(tip_mass_fraction=1.0))
    assert len(issues) == 1
    assert issues[0].path == "VehicleSpec.tip_mass_fraction"


@pytest.mark.parametrize("vehicle, path", [
    (VehicleSpec(fuselage_mass=0.0), "VehicleSpec.fuselage_mass"),
    (vehicle_with(segment=SegmentSpec(length=-1.0)), "VehicleSpec.left_wing.segments[0].length"),
    (vehicle_with(segment=SegmentSpec(mass=0.0)), "VehicleSpec.left_wing.segments[0].mass"),
    (vehicle_with(hinge=HingeSpec(max_fold_angle=math.pi)),
     "VehicleSpec.left_wing.hinges[0].max_fold_angle"),
    (vehicle_with(hinge=HingeSpec(free_stiffness=1.0, block_stiffness=50.0)),
     "VehicleSpec.left_wing.hinges[0].block_stiffness"),
    (VehicleSpec(left_wing=WingSpec.uniform(3)), "VehicleSpec.right_wing.segments"),
    (VehicleSpec(left_wing=WingSpec((SegmentSpec(),), ())), "VehicleSpec.left_wing.hinges"),
    (VehicleSpec(left_wing=WingSpec((), ()), right_wing=WingSpec((), ())),
     "VehicleSpec.left_wing.segments"),
    (vehicle_with(n=17), "VehicleSpec.left_wing.segments"),
])
def test_invalid_fields_are_named(vehicle, path):
    issues = validate_spec(vehicle)
    assert path in [i.path for i in issues]
    with pytest.raises(SpecError) as e:
        build_model(vehicle)
    assert path in str(e.value)


def test_nan_is_rejected():
    issues = validate_spec(VehicleSpec(fuselage_mass=float("nan")))
    assert issues and issues[0].path == "VehicleSpec.fuselage_mass"


def test_inertia_about_root_grows_with_tip_mass():
    prev = -1.0
    for f in (0.0, 0.05, 0.1, 0.25, 0.5):
        m = build_model(VehicleSpec(tip_mass_fraction=f))
        i = m.inertia_about_root(m.tip_body(LEFT))
        assert i > prev
        prev = i


def test_mirror_chains_match():
    m = build_model(VehicleSpec(tip_mass_fraction=0.1))
    left, right = list(m.chain(LEFT)), list(m.chain(RIGHT))
    for a in ("mass", "com", "inertia", "length"):
        arr = getattr(m, a)
        np.testing.assert_array_equal(arr[left], arr[right])
    assert m.half_span == pytest.approx(0.04 + 0.6)
