"""Planar forward dynamics, pole contact and time stepping.

The simulation lives in the plane perpendicular to the pole axis with the
pole a fixed circle at the origin. Gravity points along the pole, so there
is no in-plane gravity; axial loads are handled by :mod:`wingwrap.hold`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import _kernels as K
from .model import LEFT, RIGHT, ArticulatedModel, HingeSpec, PoleSpec

DEFAULT_DT = 2e-5


class SimulationError(RuntimeError):
    """Integration produced non-finite values or a singular mass matrix."""


@dataclass(frozen=True)
class MaterialParams:
    normal_stiffness: float = 5.0e4
    normal_damping: float = 100.0
    friction_mu: float = 0.6
    slip_regularization_velocity: float = 1e-3

    @classmethod
    def from_pole(cls, pole: PoleSpec, slip_regularization_velocity: float = 1e-3) -> "MaterialParams":
        return cls(pole.normal_stiffness, pole.normal_damping, pole.friction_mu,
                   slip_regularization_velocity)

    def __post_init__(self):
        for name in ("normal_stiffness", "normal_damping", "friction_mu"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"MaterialParams.{name} must be >= 0")
        if not self.slip_regularization_velocity > 0:
            raise ValueError("MaterialParams.slip_regularization_velocity must be > 0")


@dataclass
class State:
    """Generalized coordinates ``[cx, cy, theta, phi...]`` and rates.

    ``(cx, cy)`` is the system centre of mass, ``theta`` the fuselage
    heading and ``phi`` the hinged fold angles, left chain root to tip then
    right chain. ``phi > 0`` folds forward (the free wrap direction).
    """

    q: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.q = np.array(self.q, dtype=np.float64)
        self.v = np.array(self.v, dtype=np.float64)
        if self.q.shape != self.v.shape or self.q.ndim != 1:
            raise ValueError("q and v must be 1-D arrays of equal length")

    def copy(self) -> "State":
        return State(self.q.copy(), self.v.copy(), self.t)

    def mirrored(self, model: ArticulatedModel) -> "State":
        """Reflect across the x axis and swap the two wings."""
        q = mirror_coordinates(model, self.q)
        v = mirror_coordinates(model, self.v)
        return State(q, v, self.t)


def mirror_coordinates(model: ArticulatedModel, x: np.ndarray) -> np.ndarray:
    out = np.array(x, dtype=np.float64)
    out[1] = -x[1]
    out[2] = -x[2]
    left = [model.qindex[b] for b in model.chain(LEFT)]
    right = [model.qindex[b] for b in model.chain(RIGHT)]
    for li, ri in zip(left, right):
        if li >= 0 and ri >= 0:
            out[li], out[ri] = x[ri], x[li]
    return out


@dataclass(frozen=True)
class Contact:
    body: int
    point: np.ndarray
    normal: np.ndarray
    penetration: float
    velocity: np.ndarray


def _args(model: ArticulatedModel):
    return (model.mass, model.com, model.inertia, model.length, model.half_thickness,
            model.side, model.qindex, model.hinge_k, model.hinge_c, model.hinge_kb,
            model.hinge_max, model.fuselage_half_width, model.n_segments)


def _check_state(model: ArticulatedModel, state: State) -> None:
    if state.q.shape != (model.nq,):
        raise ValueError(f"state has {state.q.shape[0]} coordinates, model needs {model.nq}")
    if not (np.all(np.isfinite(state.q)) and np.all(np.isfinite(state.v))):
        raise ValueError("state contains non-finite values")


def _workspace(model: ArticulatedModel):
    return K.make_workspace(model.n_bodies, model.nq)


def mass_matrix(model: ArticulatedModel, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    v = np.zeros_like(q)
    ws = _workspace(model)
    beta, betad, start, sbias, M, bias_q, Jbar, rbar, bbar, Jc, J = ws[:11]
    K.frames(model.side, model.qindex, model.length, model.fuselage_half_width,
             model.n_segments, q, v, beta, betad, start, sbias)
    K.mass_system(model.mass, model.com, model.inertia, model.side, model.qindex,
                  model.n_segments, model.nq, beta, betad, start, sbias,
                  M, bias_q, Jbar, rbar, bbar, Jc, J)
    return M.copy()


def _material(pole, material):
    if material is not None:
        return material
    return MaterialParams.from_pole(pole) if pole is not None else MaterialParams()


def _accel(model, state, pole, material, body_forces, joint_torques, dt, contacts):
    nb, nq = model.n_bodies, model.nq
    bf = np.zeros((nb, 2)) if body_forces is None else np.asarray(body_forces, dtype=np.float64)
    jt = np.zeros(max(nq - 3, 1))
    if joint_torques is not None:
        jt[:nq - 3] = joint_torques
    if bf.shape != (nb, 2):
        raise ValueError(f"body_forces must have shape ({nb}, 2)")
    a = np.zeros(nq)
    info = np.zeros(3)
    radius = pole.radius if pole is not None else 1.0
    m = _material(pole, material)
    ok = K.accelerations(*_args(model), state.q, state.v, radius, m.normal_stiffness,
                         m.normal_damping, m.friction_mu, m.slip_regularization_velocity,
                         dt, contacts and pole is not None, bf, jt, a, info, _workspace(model))
    if not ok:
        raise SimulationError("mass matrix is not positive definite")
    return a, info


def forward_dynamics(model: ArticulatedModel, state: State,
                     body_forces: Optional[np.ndarray] = None,
                     joint_torques: Optional[Sequence[float]] = None,
                     pole: Optional[PoleSpec] = None,
                     material: Optional[MaterialParams] = None) -> np.ndarray:
    """Generalized accelerations under hinge torques plus the given loads.

    ``body_forces`` (n_bodies x 2) act at body centres of mass and
    ``joint_torques`` add to the hinge torques. Pole contact is included
    only when ``pole`` is given.
    """
    _check_state(model, state)
    a, _ = _accel(model, state, pole, material, body_forces, joint_torques, 0.0, True)
    return a


def joint_torque(hinge: HingeSpec, phi: float, phi_rate: float) -> float:
    return K.hinge_torque(hinge.free_stiffness, hinge.free_damping, hinge.block_stiffness,
                          hinge.max_fold_angle, float(phi), float(phi_rate))


def body_points(model: ArticulatedModel, q: np.ndarray) -> np.ndarray:
    """World points: fuselage centre, left root..tip, right root..tip."""
    pts = np.zeros((1 + 2 * (model.n_segments + 1), 2))
    K.chain_points(model.length, model.side, model.qindex, model.fuselage_half_width,
                   model.n_segments, model.com, model.mass, np.asarray(q, dtype=np.float64), pts)
    return pts


def detect_contacts(model: ArticulatedModel, state: State, pole: PoleSpec) -> List[Contact]:
    """One contact per body whose capsule touches or overlaps the pole circle."""
    _check_state(model, state)
    ws = _workspace(model)
    beta, betad, start, sbias, M, bias_q, Jbar, rbar, bbar, Jc, J = ws[:11]
    K.frames(model.side, model.qindex, model.length, model.fuselage_half_width,
             model.n_segments, state.q, state.v, beta, betad, start, sbias)
    K.mass_system(model.mass, model.com, model.inertia, model.side, model.qindex,
                  model.n_segments, model.nq, beta, betad, start, sbias,
                  M, bias_q, Jbar, rbar, bbar, Jc, J)
    origin = state.q[:2] - rbar
    contacts = []
    for b in range(model.n_bodies):
        pen, nx, ny, rx, ry, h = K.body_contact(model.length, model.half_thickness, beta, start,
                                                rbar, state.q, b, pole.radius)
        if pen < 0.0:
            continue
        px, py = rx - h * nx, ry - h * ny
        K.point_jac(model.side, model.qindex, model.n_segments, start, b, px, py, J)
        vel = K.point_velocity(state.v, J, Jbar, model.nq)
        contacts.append(Contact(
            body=b,
            point=origin + np.array([px, py]),
            normal=np.array([nx, ny]),
            penetration=max(0.0, float(pen)),
            velocity=np.array(vel),
        ))
    return contacts


def contact_force(contact: Contact, material: MaterialParams) -> np.ndarray:
    """Penalty normal force plus regularized Coulomb friction, never attractive."""
    n = contact.normal
    t = np.array([-n[1], n[0]])
    approach = -float(np.dot(contact.velocity, n))
    N = max(0.0, material.normal_stiffness * contact.penetration + material.normal_damping * approach)
    slip = float(np.dot(contact.velocity, t))
    sat = min(1.0, max(-1.0, slip / material.slip_regularization_velocity))
    return N * n - material.friction_mu * N * sat * t


def kinetic_energy(model: ArticulatedModel, state: State) -> float:
    return float(K.kinetic_energy(model.mass, model.com, model.inertia, model.length, model.side,
                                  model.qindex, model.fuselage_half_width, model.n_segments,
                                  state.q, state.v, _workspace(model)))


def hinge_energy(model: ArticulatedModel, q: np.ndarray) -> float:
    e = 0.0
    for b in range(1, model.n_bodies):
        k = model.qindex[b]
        if k >= 0:
            e += K.hinge_energy(model.hinge_k[b], model.hinge_kb[b], model.hinge_max[b], q[k])
    return float(e)


def total_energy(model: ArticulatedModel, state: State, pole: Optional[PoleSpec] = None,
                 material: Optional[MaterialParams] = None) -> float:
    """Kinetic + hinge elastic + contact penalty elastic energy (no gravity term)."""
    _check_state(model, state)
    e = kinetic_energy(model, state) + hinge_energy(model, state.q)
    if pole is not None:
        kn = (material or MaterialParams.from_pole(pole)).normal_stiffness
        for c in detect_contacts(model, state, pole):
            e += 0.5 * kn * c.penetration ** 2
    return e


def com_velocity(model: ArticulatedModel, state: State) -> np.ndarray:
    return state.v[:2].copy()


def step(model: ArticulatedModel, state: State, dt: float,
         pole: Optional[PoleSpec] = None, material: Optional[MaterialParams] = None,
         joint_torques: Optional[Sequence[float]] = None) -> State:
    """One semi-implicit Euler step: velocities from accelerations, then positions."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    _check_state(model, state)
    a, _ = _accel(model, state, pole, material, None, joint_torques, dt, True)
    v = state.v + dt * a
    q = state.q + dt * v
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise SimulationError(f"non-finite state at t={state.t + dt:.6g}s; dt too large for the stiffness")
    return State(q, v, state.t + dt)


def simulate(model: ArticulatedModel, state: State, dt: float, duration: float,
             pole: Optional[PoleSpec] = None, material: Optional[MaterialParams] = None,
             record_every: int = 0, joint_torques: Optional[Sequence[float]] = None):
    """Advance ``duration`` seconds with fixed steps (same arithmetic as :func:`step`).

    Returns the final state, or ``(final, samples)`` with every
    ``record_every``-th state (starting with the initial one) when requested.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    _check_state(model, state)
    n = int(round(duration / dt))
    q, v = state.q.copy(), state.v.copy()
    rows = n // record_every if record_every > 0 else 0
    rq, rv = np.zeros((rows, model.nq)), np.zeros((rows, model.nq))
    jt = np.zeros(max(model.nq - 3, 1))
    if joint_torques is not None:
        jt[:model.nq - 3] = joint_torques
    m = _material(pole, material)
    radius = pole.radius if pole is not None else 1.0
    done = K.integrate(*_args(model), q, v, radius, m.normal_stiffness, m.normal_damping,
                       m.friction_mu, m.slip_regularization_velocity, pole is not None, jt,
                       dt, n, record_every, rq, rv)
    if done < n:
        raise SimulationError(f"non-finite state at t={state.t + (done + 1) * dt:.6g}s; "
                              "dt too large for the stiffness")
    final = State(q, v, state.t + n * dt)
    if not record_every:
        return final
    samples = [state.copy()] + [State(rq[i], rv[i], state.t + (i + 1) * record_every * dt)
                                for i in range(rows)]
    return final, samples


def stable_dt(model: ArticulatedModel, pole: PoleSpec, safety: float = 0.1) -> float:
    """Conservative explicit step bound for the stiffest spring/body pairing.

    Uses the lightest body mass against the contact stiffness and the
    smallest segment inertia about its hinge against the block stiffness.
    The contact dashpot is bounded separately: explicit damping is stable
    for dt < 2 m / c, and half of that is kept.
    """
    m_min = float(model.mass.min()) / 4.0
    w_contact = math.sqrt(pole.normal_stiffness / m_min)
    seg = slice(1, model.n_bodies)
    i_hinge = model.inertia[seg] + model.mass[seg] * model.com[seg] ** 2
    kb = float(model.hinge_kb[seg].max())
    w_hinge = math.sqrt(kb / float(i_hinge.min())) if kb > 0 else 0.0
    bound = safety * 2.0 / max(w_contact, w_hinge, 1e-12)
    if pole.normal_damping > 0:
        bound = min(bound, m_min / pole.normal_damping)
    return bound
