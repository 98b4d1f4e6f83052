import math

import numpy as np
import pytest
import yaml
from hypothesis import given, settings, strategies as st

from wingwrap import (HingeSpec, Outcome, PoleSpec, SegmentSpec, VehicleSpec, WingSpec,
                      build_model, classify_outcome, joint_torque, mass_matrix, search_min_speed,
                      wilson_interval, wrap_angle_of_points)
from wingwrap.config import config_hash, dump_config, from_dict
from wingwrap.model import LEFT, RIGHT
from wingwrap.reports import fmt


finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)
settings.register_profile("wingwrap", max_examples=60, deadline=None)
settings.load_profile("wingwrap")


@given(finite)
def test_fmt_is_decimal_and_accurate(x):
    s = fmt(x)
    assert "e" not in s.lower()
    if x == 0:
        assert s == "0"
    else:
        assert float(s) == pytest.approx(x, rel=1e-8)


@given(st.floats(0.01, 2 * math.pi - 0.01), st.integers(4, 40), st.sampled_from([LEFT, RIGHT]),
       st.floats(-math.pi, math.pi))
def test_wrap_of_arc_equals_sweep(sweep, n, side, start):
    angles = start - side * np.linspace(0.0, sweep, n + 1)
    pts = np.column_stack([0.07 * np.cos(angles), 0.07 * np.sin(angles)])
    assert wrap_angle_of_points(pts, side) == pytest.approx(sweep, abs=1e-9)


@given(st.floats(0, 6.28), st.floats(0, 6.28), st.booleans(), st.booleans(),
       st.floats(0, 3), st.booleans(), st.floats(0, 1), st.floats(0.5, 3))
def test_classification_rules(wl, wr, tip, contact, dist, receding, overlap, thr):
    out = classify_outcome(wl, wr, tip, contact, dist, receding, 0.8, overlap, thr)
    if not contact:
        assert out is Outcome.MISS
    elif wl >= thr and wr >= thr:
        assert out.success
        assert (out is Outcome.COLLIDE) == (tip or overlap <= 0.05)
    else:
        assert not out.success and out is not Outcome.MISS


@given(st.floats(1.01, 4.99), st.floats(0.005, 0.2))
def test_step_stub_search_contract(v_step, tol):
    res = search_min_speed(lambda v: v >= v_step, 1.0, 5.0, tol)
    assert v_step <= res.speed <= v_step + tol
    assert not res.non_monotone


@given(st.integers(1, 500).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_contains_estimate(kn):
    k, n = kn
    lo, hi = wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0


@given(st.floats(0, 1), st.floats(0, 1), st.floats(100, 1e4), st.floats(0.5, 3.0),
       st.floats(-0.5, 3.5), st.floats(-5, 5))
def test_hinge_torque_restores(k, c, kb_extra, phimax, phi, rate):
    h = HingeSpec(free_stiffness=k, free_damping=c, block_stiffness=100 * k + kb_extra,
                  max_fold_angle=phimax)
    tau = joint_torque(h, phi, 0.0)
    if phi > 0:
        assert tau <= 0
    elif phi < 0:
        assert tau > 0
    # damping only ever opposes the fold rate
    assert (joint_torque(h, phi, rate) - tau) * rate <= 0


@given(st.integers(1, 6), st.floats(0, 0.9), st.booleans(), st.integers(0, 2 ** 32 - 1))
def test_mass_matrix_spd(n, tip, rigid, seed):
    w = WingSpec.uniform(n, SegmentSpec(0.1, 0.015, 0.005), HingeSpec(), rigid)
    m = build_model(VehicleSpec(left_wing=w, right_wing=w, tip_mass_fraction=tip))
    rng = np.random.default_rng(seed)
    q = np.concatenate([rng.uniform(-1, 1, 3), rng.uniform(-0.3, 2.8, m.nq - 3)])
    M = mass_matrix(m, q)
    assert np.allclose(M, M.T, atol=1e-10)
    np.linalg.cholesky(M)


@given(st.integers(0, 2 ** 64 - 1), st.floats(0, 0.5), st.floats(0.03, 0.1),
       st.floats(0.1, 1.0), st.integers(1, 100))
def test_config_round_trip(seed, tip, radius, mu, n):
    cfg = from_dict({"master_seed": seed, "vehicle": {"tip_mass_fraction": tip},
                     "pole": {"radius": radius, "friction_mu": mu},
                     "trial_plan": {"n_trials": n}})
    again = from_dict(yaml.safe_load(dump_config(cfg)))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
