"""Single tosses onto the pole, outcome classification, and aggregate studies."""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import NormalDist
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import _kernels as K
from .dynamics import (DEFAULT_DT, MaterialParams, SimulationError, State, body_points,
                       contact_force, detect_contacts, total_energy)
from .hold import GripState, slide_check
from .model import LEFT, RIGHT, ArticulatedModel, PoleSpec, VehicleSpec, build_model

TWO_PI = 2.0 * math.pi


class Outcome(str, enum.Enum):
    MISS = "Miss"
    BOUNCE = "Bounce"
    PARTIAL = "PartialWrap"
    COLLIDE = "SuccessTipCollide"
    OVERLAP = "SuccessTipOverlap"

    @property
    def success(self) -> bool:
        return self in (Outcome.COLLIDE, Outcome.OVERLAP)


@dataclass(frozen=True)
class SimParams:
    dt: float = DEFAULT_DT
    timeout: float = 3.0
    settle_epsilon: float = 1e-4
    settle_hold: float = 0.2
    wrap_threshold: float = 2.0
    # None -> 2 x the larger tip half-thickness
    tip_collision_distance: Optional[float] = None
    tip_closing_speed: float = 0.05
    overlap_epsilon: float = 0.05
    contact_margin: float = 0.02
    slip_regularization_velocity: float = 1e-3


@dataclass(frozen=True)
class TrialConditions:
    impact_speed: float
    lateral_offset: float = 0.0
    approach_angle: float = 0.0
    start_distance: float = 0.8
    seed: int = 0

    def check(self, model: ArticulatedModel, pole: PoleSpec) -> None:
        if not self.impact_speed > 0:
            raise ValueError("TrialConditions.impact_speed must be > 0")
        if not self.start_distance > pole.radius + model.half_span:
            raise ValueError("TrialConditions.start_distance must exceed pole radius + half wingspan")


@dataclass
class TrialResult:
    outcome: Outcome
    impact_speed: float
    wrap_angle_left: float
    wrap_angle_right: float
    settle_time: float
    settled: bool
    tip_contact_event: bool
    energy_at_impact: float
    energy_at_settle: float
    contact_ever: bool
    end_reason: str
    overlap: float
    hold_capacity: float
    holds: bool
    conditions: Optional[TrialConditions] = None
    trajectory: Optional[np.ndarray] = None


def initial_state(model: ArticulatedModel, conditions: TrialConditions) -> State:
    """Wings straight, translating at ``impact_speed`` along the perturbed heading toward the pole."""
    heading = math.pi + conditions.approach_angle
    d = np.array([math.cos(heading), math.sin(heading)])
    perp = np.array([-d[1], d[0]])
    fuselage = -conditions.start_distance * d + conditions.lateral_offset * perp
    q = np.zeros(model.nq)
    q[2] = heading
    rel = -body_points(model, q)[0]  # system COM relative to the fuselage centre
    q[:2] = fuselage + rel
    v = np.zeros(model.nq)
    v[:2] = conditions.impact_speed * d
    return State(q, v)


def wrap_angle_of_points(points: np.ndarray, side: int) -> float:
    """Azimuth swept at the pole centre from ``points[0]`` along the rest, in the wing's fold sense.

    The left wing folds clockwise and the right counter-clockwise; the
    accumulation is unwrapped and clamped to [0, 2*pi).
    """
    pts = np.asarray(points, dtype=np.float64)
    w = K.wrap_of_points(pts, 1, len(pts) - 1, -side)
    return float(min(max(w, 0.0), np.nextafter(TWO_PI, 0.0)))


def wrap_angle(model: ArticulatedModel, state: State, side: int, pole: PoleSpec,
               contact_margin: float = 0.02) -> float:
    pts = body_points(model, state.q)
    return float(K.wing_wrap(pts, model.half_thickness, model.fuselage_half_width,
                             model.n_segments, side, pole.radius, contact_margin))


def azimuth_overlap(wrap_left: float, wrap_right: float) -> float:
    """Arc covered by both wings when each is measured from the fuselage azimuth."""
    return max(0.0, wrap_left + wrap_right - TWO_PI)


def classify_outcome(wrap_left: float, wrap_right: float, tip_event: bool, contact_ever: bool,
                     com_distance: float, com_receding: bool, start_distance: float,
                     overlap: float = 0.0, wrap_threshold: float = 2.0,
                     overlap_epsilon: float = 0.05) -> Outcome:
    if not contact_ever:
        return Outcome.MISS
    if wrap_left >= wrap_threshold and wrap_right >= wrap_threshold:
        if tip_event:
            return Outcome.COLLIDE
        if overlap > overlap_epsilon:
            return Outcome.OVERLAP
        # tips facing each other short of crossing
        return Outcome.COLLIDE
    if com_receding and com_distance > 0.5 * start_distance:
        return Outcome.BOUNCE
    return Outcome.PARTIAL


_END_NAMES = {K.END_SETTLED: "settled", K.END_TIMEOUT: "timeout",
              K.END_ESCAPED: "escaped", K.END_UNSTABLE: "unstable"}


def run_trial(model: ArticulatedModel, pole: PoleSpec, material: Optional[MaterialParams],
              conditions: TrialConditions, params: SimParams = SimParams(),
              record_every: int = 0) -> TrialResult:
    """Toss the vehicle at the pole and classify where it ends up.

    ``record_every > 0`` keeps every n-th step's ``[t, q...]`` in
    ``result.trajectory``.
    """
    conditions.check(model, pole)
    material = material or MaterialParams.from_pole(pole, params.slip_regularization_velocity)
    s0 = initial_state(model, conditions)
    tips = (model.tip_body(LEFT), model.tip_body(RIGHT))
    tip_dist = params.tip_collision_distance
    if tip_dist is None:
        tip_dist = 2.0 * float(max(model.half_thickness[tips[0]], model.half_thickness[tips[1]]))
    n_rows = 0
    if record_every > 0:
        n_rows = int(math.ceil(params.timeout / params.dt / record_every)) + 2
    traj = np.zeros((n_rows, 1 + model.nq))
    (q, v, t, end, first_contact, impact_speed, tip_event, e_impact, _,
     n_traj) = K.run_toss(
        model.mass, model.com, model.inertia, model.length, model.half_thickness, model.side,
        model.qindex, model.hinge_k, model.hinge_c, model.hinge_kb, model.hinge_max,
        model.fuselage_half_width, model.n_segments,
        s0.q, s0.v, pole.radius, material.normal_stiffness, material.normal_damping,
        material.friction_mu, material.slip_regularization_velocity,
        params.dt, params.timeout, params.settle_epsilon, params.settle_hold,
        params.contact_margin, tip_dist, params.tip_closing_speed, conditions.start_distance,
        record_every, traj)
    if end == K.END_UNSTABLE:
        raise SimulationError(
            f"non-finite state at t={t:.6g}s (dt={params.dt:g}); reduce dt or contact stiffness")
    final = State(q, v, t)
    contact_ever = first_contact >= 0.0
    wl = wrap_angle(model, final, LEFT, pole, params.contact_margin)
    wr = wrap_angle(model, final, RIGHT, pole, params.contact_margin)
    overlap = azimuth_overlap(wl, wr)
    com = q[:2]
    outcome = classify_outcome(
        wl, wr, bool(tip_event), contact_ever, float(np.hypot(*com)),
        bool(np.dot(com, v[:2]) > 0.0), conditions.start_distance, overlap,
        params.wrap_threshold, params.overlap_epsilon)

    contacts = detect_contacts(model, final, pole)
    normals = [float(np.dot(contact_force(c, material), c.normal)) for c in contacts]
    hold = slide_check(GripState(normals, wl + wr, material.friction_mu, model.total_mass))

    return TrialResult(
        outcome=outcome,
        impact_speed=float(impact_speed) if contact_ever else 0.0,
        wrap_angle_left=wl,
        wrap_angle_right=wr,
        settle_time=float(t),
        settled=end == K.END_SETTLED,
        tip_contact_event=bool(tip_event),
        energy_at_impact=float(e_impact),
        energy_at_settle=total_energy(model, final, pole, material),
        contact_ever=contact_ever,
        end_reason=_END_NAMES[int(end)],
        overlap=overlap,
        hold_capacity=hold.capacity,
        holds=hold.holds,
        conditions=conditions,
        trajectory=traj[:n_traj].copy() if record_every > 0 else None,
    )


# ---------------------------------------------------------------------------
# minimum perching speed


class BracketError(ValueError):
    """The speed interval does not bracket a fail -> success transition."""


@dataclass(frozen=True)
class SpeedSearch:
    speed: float
    non_monotone: bool
    scan_speeds: tuple
    scan_success: tuple
    evaluations: int


def search_min_speed(succeeds: Callable[[float], bool], v_lo: float, v_hi: float,
                     tol: float = 0.05, n_scan: int = 8) -> SpeedSearch:
    """Bisect the lowest fail->success transition found by an even pre-scan of [v_lo, v_hi]."""
    if not (0 < v_lo < v_hi) or not tol > 0:
        raise ValueError("need 0 < v_lo < v_hi and tol > 0")
    speeds = tuple(float(x) for x in np.linspace(v_lo, v_hi, n_scan))
    ok = tuple(bool(succeeds(s)) for s in speeds)
    evals = len(speeds)
    transitions = [i for i in range(n_scan - 1) if not ok[i] and ok[i + 1]]
    if not transitions:
        if all(ok):
            raise BracketError(f"trial already succeeds at v_lo={v_lo:g} m/s")
        raise BracketError(f"no fail->success transition in [{v_lo:g}, {v_hi:g}] m/s")
    # any success below a failure, or a failure at v_hi, breaks monotonicity
    non_monotone = len(transitions) > 1 or ok[0] or not ok[-1]
    i = transitions[0]
    lo, hi = speeds[i], speeds[i + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        evals += 1
        if succeeds(mid):
            hi = mid
        else:
            lo = mid
    return SpeedSearch(hi, non_monotone, speeds, ok, evals)


def min_perch_speed(model: ArticulatedModel, pole: PoleSpec, material: Optional[MaterialParams],
                    nominal: TrialConditions, v_lo: float = 1.0, v_hi: float = 5.0,
                    tol: float = 0.05, params: SimParams = SimParams()) -> SpeedSearch:
    def succeeds(speed: float) -> bool:
        c = replace(nominal, impact_speed=speed)
        return run_trial(model, pole, material, c, params).outcome.success
    return search_min_speed(succeeds, v_lo, v_hi, tol)


# ---------------------------------------------------------------------------
# Monte Carlo success rate

Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(successes: int, n: int, z: float = Z95):
    if n <= 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the bounds touch 0 and 1 exactly at the extremes; round-off would not
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial 64-bit seed derived from the master seed and trial index."""
    ss = np.random.SeedSequence([int(master_seed) & (2 ** 64 - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class TossDistribution:
    """Hand-toss scatter: uniform speed, lateral offset and heading error."""

    speed_min: float = 2.0
    speed_max: float = 3.5
    lateral_offset_jitter: float = 0.02
    approach_angle_jitter: float = math.radians(5.0)
    start_distance: float = 0.8

    def sample(self, seed: int) -> TrialConditions:
        rng = np.random.default_rng(seed)
        speed = rng.uniform(self.speed_min, self.speed_max)
        offset = rng.uniform(-self.lateral_offset_jitter, self.lateral_offset_jitter)
        angle = rng.uniform(-self.approach_angle_jitter, self.approach_angle_jitter)
        return TrialConditions(float(speed), float(offset), float(angle), self.start_distance, seed)

    def nominal(self, speed: float = 3.0) -> TrialConditions:
        return TrialConditions(speed, 0.0, 0.0, self.start_distance, 0)


@dataclass
class RateEstimate:
    successes: int
    n: int
    rate: float
    ci_lo: float
    ci_hi: float
    results: List[TrialResult] = field(default_factory=list)


def worker_count(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get("WINGWRAP_THREADS", "0") or 0) or (os.cpu_count() or 1)
    return max(1, int(workers))


def map_ordered(fn, items: Sequence, workers: Optional[int] = None) -> list:
    """Apply ``fn`` to every item, results in input order regardless of worker count."""
    workers = worker_count(workers)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def success_rate(model: ArticulatedModel, pole: PoleSpec, material: Optional[MaterialParams],
                 distribution: TossDistribution, n: int, master_seed: int,
                 params: SimParams = SimParams(), workers: Optional[int] = None,
                 trial_fn: Optional[Callable[[TrialConditions], TrialResult]] = None) -> RateEstimate:
    """Run ``n`` seeded tosses; ``trial_fn`` replaces the simulator (used for stubs)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if trial_fn is None:
        def trial_fn(c: TrialConditions) -> TrialResult:
            return run_trial(model, pole, material, c, params)
    conditions = [distribution.sample(trial_seed(master_seed, i)) for i in range(n)]
    results = map_ordered(trial_fn, conditions, workers)
    k = sum(1 for r in results if r.outcome.success)
    lo, hi = wilson_interval(k, n)
    return RateEstimate(k, n, k / n, lo, hi, results)


# ---------------------------------------------------------------------------
# mass sweep

DEFAULT_FRACTIONS = (0.0, 1.0 / 12.0, 1.0 / 6.0, 0.25)


@dataclass
class SweepRow:
    tip_mass_fraction: float
    n_trials: int
    successes: int
    success_rate: float
    ci_lo: float
    ci_hi: float
    min_speed_nominal: Optional[float]
    min_speed_empirical: Optional[float]
    overlap_share: Optional[float]
    flag: str
    results: List[TrialResult] = field(default_factory=list)
    search: Optional[SpeedSearch] = None


@dataclass
class SweepReport:
    rows: List[SweepRow]

    def pooled_split(self):
        """(collide, overlap) counts over every success in the sweep."""
        collide = sum(1 for r in self.rows for t in r.results if t.outcome is Outcome.COLLIDE)
        overlap = sum(1 for r in self.rows for t in r.results if t.outcome is Outcome.OVERLAP)
        return collide, overlap


def summarize_cell(fraction: float, est: RateEstimate, search: Optional[SpeedSearch],
                   flag: str) -> SweepRow:
    wins = [r for r in est.results if r.outcome.success]
    n_overlap = sum(1 for r in wins if r.outcome is Outcome.OVERLAP)
    return SweepRow(
        tip_mass_fraction=fraction,
        n_trials=est.n,
        successes=est.successes,
        success_rate=est.rate,
        ci_lo=est.ci_lo,
        ci_hi=est.ci_hi,
        min_speed_nominal=search.speed if search is not None else None,
        min_speed_empirical=min(r.impact_speed for r in wins) if wins else None,
        overlap_share=n_overlap / len(wins) if wins else None,
        flag=flag,
        results=est.results,
        search=search,
    )


def mass_sweep(vehicle: VehicleSpec, pole: PoleSpec, material: Optional[MaterialParams],
               fractions: Sequence[float] = DEFAULT_FRACTIONS,
               distribution: TossDistribution = TossDistribution(), n_trials: int = 40,
               master_seed: int = 0, params: SimParams = SimParams(),
               speed_bracket=(1.0, 5.0), speed_tol: float = 0.05,
               search_speed: bool = True, workers: Optional[int] = None) -> SweepReport:
    """One row per tip-mass fraction, in input order.

    Every cell reuses the same seeded toss conditions so the mass levels are
    compared on identical throws.
    """
    if not fractions:
        raise ValueError("fractions must be non-empty")
    for f in fractions:
        if not 0.0 <= f < 1.0:
            raise ValueError(f"tip mass fraction {f!r} outside [0, 1)")
    rows = []
    for f in fractions:
        model = build_model(vehicle.with_tip_mass(f))
        est = success_rate(model, pole, material, distribution, n_trials, master_seed, params, workers)
        search, flag = None, "ok"
        if search_speed:
            try:
                search = _parallel_min_speed(model, pole, material, distribution.nominal(),
                                             speed_bracket, speed_tol, params, workers)
                flag = "non_monotone" if search.non_monotone else "ok"
            except BracketError:
                flag = "no_bracket"
        rows.append(summarize_cell(f, est, search, flag))
    return SweepReport(rows)


def _parallel_min_speed(model, pole, material, nominal, bracket, tol, params, workers) -> SpeedSearch:
    """Same result as :func:`min_perch_speed`; the pre-scan runs concurrently."""
    v_lo, v_hi = bracket
    scan = [float(x) for x in np.linspace(v_lo, v_hi, 8)]
    outcomes = map_ordered(
        lambda s: run_trial(model, pole, material, replace(nominal, impact_speed=s), params)
        .outcome.success, scan, workers)
    cache = dict(zip(scan, outcomes))

    def succeeds(speed: float) -> bool:
        if speed not in cache:
            c = replace(nominal, impact_speed=speed)
            cache[speed] = run_trial(model, pole, material, c, params).outcome.success
        return cache[speed]
    return search_min_speed(succeeds, v_lo, v_hi, tol)
