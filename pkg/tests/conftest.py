import numpy as np
import pytest

from wingwrap import (HingeSpec, PoleSpec, SegmentSpec, VehicleSpec, WingSpec, build_model)


def vehicle_with(n=4, hinge=None, segment=None, fuselage_mass=0.2, tip=0.0, root_rigid=False):
    w = WingSpec.uniform(n, segment or SegmentSpec(), hinge or HingeSpec(), root_rigid)
    return VehicleSpec(fuselage_mass=fuselage_mass, left_wing=w, right_wing=w,
                       tip_mass_fraction=tip)


def free_hinge():
    """Hinge with no restoring spring and no damping (blocked side kept)."""
    return HingeSpec(free_stiffness=0.0, free_damping=0.0, block_stiffness=50.0, max_fold_angle=2.6)


@pytest.fixture
def model():
    return build_model(VehicleSpec())


@pytest.fixture
def pole():
    return PoleSpec()


def random_q(rng, model, spread=1.0):
    q = np.zeros(model.nq)
    q[:2] = rng.uniform(-1, 1, 2)
    q[2] = rng.uniform(-np.pi, np.pi)
    q[3:] = rng.uniform(-0.2, 2.6, model.nq - 3) * spread
    return q


# acceptance criteria outcomes, printed at the end of the session
ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
