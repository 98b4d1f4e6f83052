"""Planar simulation of a segmented-wing vehicle wrapping around a pole on impact."""

__version__ = "0.1.0"

from .model import (LEFT, RIGHT, ArticulatedModel, HingeSpec, Issue, PoleSpec, SegmentSpec,
                    SpecError, VehicleSpec, WingSpec, build_model, validate_spec)
from .dynamics import (DEFAULT_DT, Contact, MaterialParams, SimulationError, State, body_points,
                       com_velocity, contact_force, detect_contacts, forward_dynamics,
                       hinge_energy, joint_torque, kinetic_energy, mass_matrix, simulate,
                       stable_dt, step, total_energy)
from .trial import (DEFAULT_FRACTIONS, BracketError, Outcome, RateEstimate, SimParams,
                    SpeedSearch, SweepReport, SweepRow, TossDistribution, TrialConditions,
                    TrialResult, azimuth_overlap, classify_outcome, initial_state, mass_sweep,
                    min_perch_speed, run_trial, search_min_speed, success_rate, wilson_interval,
                    wrap_angle, wrap_angle_of_points)
from .hold import (GripState, HoldReport, capstan_tension_ratio, required_normal_force,
                   slide_check)
