"""Physical description of the vehicle and pole, and the derived body tree.

The vehicle is a fuselage (a disc in the wrap plane) carrying two chains of
rigid wing segments. Each segment hangs off the previous one through a
one-way hinge; the first hinge of each chain attaches to the fuselage side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

LEFT = 1
RIGHT = -1

MAX_SEGMENTS = 16


@dataclass(frozen=True)
class SegmentSpec:
    length: float = 0.15
    mass: float = 0.02
    half_thickness: float = 0.01


@dataclass(frozen=True)
class HingeSpec:
    # calibrated: no restoring spring (a wrapped wing stays put), viscous fold damping
    free_stiffness: float = 0.0
    free_damping: float = 0.07
    block_stiffness: float = 50.0
    max_fold_angle: float = 2.6


@dataclass(frozen=True)
class WingSpec:
    segments: Tuple[SegmentSpec, ...] = field(default_factory=lambda: (SegmentSpec(),) * 4)
    hinges: Tuple[HingeSpec, ...] = field(default_factory=lambda: (HingeSpec(),) * 4)
    root_rigid: bool = False

    @classmethod
    def uniform(cls, n: int, segment: SegmentSpec = SegmentSpec(),
                hinge: HingeSpec = HingeSpec(), root_rigid: bool = False) -> "WingSpec":
        return cls((segment,) * n, (hinge,) * n, root_rigid)


@dataclass(frozen=True)
class PoleSpec:
    radius: float = 0.06
    friction_mu: float = 0.6
    normal_stiffness: float = 5.0e4
    normal_damping: float = 100.0


@dataclass(frozen=True)
class VehicleSpec:
    fuselage_mass: float = 0.2
    fuselage_half_width: float = 0.04
    left_wing: WingSpec = field(default_factory=WingSpec)
    right_wing: WingSpec = field(default_factory=WingSpec)
    tip_mass_fraction: float = 0.0

    def with_tip_mass(self, fraction: float) -> "VehicleSpec":
        return replace(self, tip_mass_fraction=fraction)


@dataclass(frozen=True)
class Issue:
    path: str
    rule: str

    def __str__(self) -> str:
        return f"{self.path} {self.rule}"


class SpecError(ValueError):
    """Raised when a spec violates its invariants; carries every issue found."""

    def __init__(self, issues: List[Issue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def _check(issues, path, value, ok, rule):
    if not _finite(value) or not ok(float(value)):
        issues.append(Issue(path, rule))


def _validate_wing(wing: WingSpec, path: str, issues: List[Issue]) -> None:
    segs, hinges = wing.segments, wing.hinges
    if len(segs) < 1:
        issues.append(Issue(f"{path}.segments", "must contain at least 1 segment"))
    if len(segs) > MAX_SEGMENTS:
        issues.append(Issue(f"{path}.segments", f"must contain at most {MAX_SEGMENTS} segments"))
    if len(hinges) != len(segs):
        issues.append(Issue(f"{path}.hinges", "count must equal segment count"))
    for i, s in enumerate(segs):
        p = f"{path}.segments[{i}]"
        _check(issues, f"{p}.length", s.length, lambda v: v > 0, "must be > 0")
        _check(issues, f"{p}.mass", s.mass, lambda v: v > 0, "must be > 0")
        _check(issues, f"{p}.half_thickness", s.half_thickness, lambda v: v >= 0, "must be >= 0")
    for i, h in enumerate(hinges):
        p = f"{path}.hinges[{i}]"
        _check(issues, f"{p}.free_stiffness", h.free_stiffness, lambda v: v >= 0, "must be >= 0")
        _check(issues, f"{p}.free_damping", h.free_damping, lambda v: v >= 0, "must be >= 0")
        _check(issues, f"{p}.block_stiffness", h.block_stiffness, lambda v: v >= 0, "must be >= 0")
        if _finite(h.block_stiffness) and _finite(h.free_stiffness) \
                and h.block_stiffness < 100.0 * h.free_stiffness:
            issues.append(Issue(f"{p}.block_stiffness", "must be >= 100 x free_stiffness"))
        _check(issues, f"{p}.max_fold_angle", h.max_fold_angle,
               lambda v: 0 < v < math.pi, "must be in (0, pi)")


def validate_vehicle(vehicle: VehicleSpec) -> List[Issue]:
    issues: List[Issue] = []
    _check(issues, "VehicleSpec.fuselage_mass", vehicle.fuselage_mass, lambda v: v > 0, "must be > 0")
    _check(issues, "VehicleSpec.fuselage_half_width", vehicle.fuselage_half_width,
           lambda v: v >= 0, "must be >= 0")
    _check(issues, "VehicleSpec.tip_mass_fraction", vehicle.tip_mass_fraction,
           lambda v: 0 <= v < 1, "must be in [0, 1)")
    _validate_wing(vehicle.left_wing, "VehicleSpec.left_wing", issues)
    _validate_wing(vehicle.right_wing, "VehicleSpec.right_wing", issues)
    if len(vehicle.left_wing.segments) != len(vehicle.right_wing.segments):
        issues.append(Issue("VehicleSpec.right_wing.segments", "count must equal left_wing segment count"))
    return issues


def validate_pole(pole: PoleSpec) -> List[Issue]:
    issues: List[Issue] = []
    _check(issues, "PoleSpec.radius", pole.radius, lambda v: v > 0, "must be > 0")
    _check(issues, "PoleSpec.friction_mu", pole.friction_mu, lambda v: v >= 0, "must be >= 0")
    _check(issues, "PoleSpec.normal_stiffness", pole.normal_stiffness, lambda v: v > 0, "must be > 0")
    _check(issues, "PoleSpec.normal_damping", pole.normal_damping, lambda v: v >= 0, "must be >= 0")
    return issues


def validate_spec(vehicle: VehicleSpec, pole: Optional[PoleSpec] = None) -> List[Issue]:
    """Return every violated invariant; an empty list means the specs are usable."""
    issues = validate_vehicle(vehicle)
    if pole is not None:
        issues += validate_pole(pole)
    return issues


def _ro(a) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ArticulatedModel:
    """Flat body tree consumed by the dynamics kernels.

    Body 0 is the fuselage. Bodies 1..n are the left chain root to tip and
    n+1..2n the right chain. For chain bodies, ``com`` is the distance of the
    body's centre of mass from its inboard hinge along the segment axis and
    ``inertia`` is about that centre of mass. ``qindex`` maps each body's
    inboard joint to its generalized coordinate (-1 when welded).
    """

    mass: np.ndarray
    com: np.ndarray
    inertia: np.ndarray
    length: np.ndarray
    half_thickness: np.ndarray
    side: np.ndarray
    qindex: np.ndarray
    hinge_k: np.ndarray
    hinge_c: np.ndarray
    hinge_kb: np.ndarray
    hinge_max: np.ndarray
    fuselage_half_width: float
    n_segments: int
    nq: int
    total_mass: float
    baseline_mass: float
    tip_mass: float
    vehicle: VehicleSpec

    @property
    def n_bodies(self) -> int:
        return len(self.mass)

    @property
    def n_joints(self) -> int:
        return self.nq - 3

    def chain(self, side: int) -> range:
        n = self.n_segments
        return range(1, n + 1) if side == LEFT else range(n + 1, 2 * n + 1)

    def tip_body(self, side: int) -> int:
        return self.n_segments if side == LEFT else 2 * self.n_segments

    @property
    def half_span(self) -> float:
        n = self.n_segments
        left = float(self.length[1:n + 1].sum())
        right = float(self.length[n + 1:].sum())
        return self.fuselage_half_width + max(left, right)

    def inertia_about_root(self, body: int) -> float:
        """Rotational inertia of one chain body about its wing root, wing straight."""
        side = int(self.side[body])
        start = self.chain(side)[0]
        offset = float(self.length[start:body].sum()) + float(self.com[body])
        return float(self.inertia[body]) + float(self.mass[body]) * offset ** 2


def build_model(vehicle: VehicleSpec) -> ArticulatedModel:
    issues = validate_vehicle(vehicle)
    if issues:
        raise SpecError(issues)

    wings = (vehicle.left_wing, vehicle.right_wing)
    baseline = vehicle.fuselage_mass + sum(s.mass for w in wings for s in w.segments)
    tip_mass = 0.5 * vehicle.tip_mass_fraction * baseline

    hw = float(vehicle.fuselage_half_width)
    # fuselage inertia: uniform disc of the collision radius, floored to stay positive
    r_gyr = max(hw, 1e-3)
    mass = [vehicle.fuselage_mass]
    com = [0.0]
    inertia = [0.5 * vehicle.fuselage_mass * r_gyr ** 2]
    length = [0.0]
    half_t = [hw]
    side = [0]
    qindex = [-1]
    hk, hc, hkb, hmax = [0.0], [0.0], [0.0], [1.0]

    q = 3
    for wing, s in zip(wings, (LEFT, RIGHT)):
        n = len(wing.segments)
        for j, (seg, hinge) in enumerate(zip(wing.segments, wing.hinges)):
            m, L = seg.mass, seg.length
            c = 0.5 * L
            inert = m * L * L / 12.0
            if j == n - 1 and tip_mass > 0.0:
                m_tot = m + tip_mass
                c_new = (m * c + tip_mass * L) / m_tot
                inert = inert + m * (c - c_new) ** 2 + tip_mass * (L - c_new) ** 2
                m, c = m_tot, c_new
            mass.append(m)
            com.append(c)
            inertia.append(inert)
            length.append(L)
            half_t.append(seg.half_thickness)
            side.append(s)
            welded = j == 0 and wing.root_rigid
            qindex.append(-1 if welded else q)
            q += 0 if welded else 1
            hk.append(hinge.free_stiffness)
            hc.append(hinge.free_damping)
            hkb.append(hinge.block_stiffness)
            hmax.append(hinge.max_fold_angle)

    mass_a = np.array(mass, dtype=np.float64)
    return ArticulatedModel(
        mass=_ro(mass_a),
        com=_ro(np.array(com, dtype=np.float64)),
        inertia=_ro(np.array(inertia, dtype=np.float64)),
        length=_ro(np.array(length, dtype=np.float64)),
        half_thickness=_ro(np.array(half_t, dtype=np.float64)),
        side=_ro(np.array(side, dtype=np.int64)),
        qindex=_ro(np.array(qindex, dtype=np.int64)),
        hinge_k=_ro(np.array(hk, dtype=np.float64)),
        hinge_c=_ro(np.array(hc, dtype=np.float64)),
        hinge_kb=_ro(np.array(hkb, dtype=np.float64)),
        hinge_max=_ro(np.array(hmax, dtype=np.float64)),
        fuselage_half_width=hw,
        n_segments=len(vehicle.left_wing.segments),
        nq=q,
        total_mass=float(mass_a.sum()),
        baseline_mass=float(baseline),
        tip_mass=float(tip_mass),
        vehicle=vehicle,
    )
