"""Experiment configuration: schema, loading, defaults and hashing.

A config is a YAML (or JSON) mapping. Only ``master_seed`` is required;
every other field falls back to the calibrated defaults. Unknown keys are
rejected so that a typo cannot silently change an experiment.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import jsonschema
import yaml

from .dynamics import MaterialParams
from .model import (HingeSpec, Issue, PoleSpec, SegmentSpec, SpecError, VehicleSpec, WingSpec,
                    validate_spec)
from .trial import DEFAULT_FRACTIONS, SimParams, TossDistribution, TrialConditions


class ConfigError(ValueError):
    """The config document is malformed or describes an invalid experiment."""


_NUM = {"type": "number"}
_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}


def _obj(props: Dict[str, Any], required=()) -> Dict[str, Any]:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_SEGMENT = _obj({"length": _NUM, "mass": _NUM, "half_thickness": _NUM})
_HINGE = _obj({"free_stiffness": _NUM, "free_damping": _NUM, "block_stiffness": _NUM,
               "max_fold_angle": _NUM})
_WING = _obj({
    "n_segments": _INT,
    "segment": _SEGMENT,
    "hinge": _HINGE,
    "segments": {"type": "array", "items": _SEGMENT},
    "hinges": {"type": "array", "items": _HINGE},
    "root_rigid": _BOOL,
})

CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "wingwrap experiment config",
    **_obj({
        "master_seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "output_dir": {"type": ["string", "null"]},
        "vehicle": _obj({
            "fuselage_mass": _NUM,
            "fuselage_half_width": _NUM,
            "tip_mass_fraction": _NUM,
            "wing": _WING,
            "left_wing": _WING,
            "right_wing": _WING,
        }),
        "pole": _obj({"radius": _NUM, "friction_mu": _NUM, "normal_stiffness": _NUM,
                      "normal_damping": _NUM}),
        "material": _obj({"normal_stiffness": _NUM, "normal_damping": _NUM,
                          "friction_mu": _NUM, "slip_regularization_velocity": _NUM}),
        "trial_plan": _obj({
            "n_trials": _INT,
            "speed_min": _NUM,
            "speed_max": _NUM,
            "lateral_offset_jitter": _NUM,
            "approach_angle_jitter": _NUM,
            "start_distance": _NUM,
            "trial": _obj({"impact_speed": _NUM, "lateral_offset": _NUM,
                           "approach_angle": _NUM, "seed": _INT}),
            "speed_bracket": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            "speed_tol": _NUM,
        }),
        "sweep": _obj({"fractions": {"type": "array", "items": _NUM, "minItems": 1}}),
        "solver": _obj({f.name: ({"type": ["number", "null"]} if f.name == "tip_collision_distance"
                                 else _NUM) for f in fields(SimParams)}),
    }, required=("master_seed",)),
}


@dataclass(frozen=True)
class TrialPlan:
    n_trials: int = 40
    distribution: TossDistribution = field(default_factory=TossDistribution)
    # conditions for the single-toss ``trial`` subcommand
    trial: TrialConditions = field(default_factory=lambda: TrialConditions(3.0))
    speed_bracket: Tuple[float, float] = (1.0, 5.0)
    speed_tol: float = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    vehicle: VehicleSpec = field(default_factory=VehicleSpec)
    pole: PoleSpec = field(default_factory=PoleSpec)
    material: MaterialParams = field(default_factory=MaterialParams)
    plan: TrialPlan = field(default_factory=TrialPlan)
    fractions: Tuple[float, ...] = DEFAULT_FRACTIONS
    solver: SimParams = field(default_factory=SimParams)
    output_dir: Optional[str] = None

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, master_seed=int(seed))

    def with_trials(self, n: int) -> "ExperimentConfig":
        return replace(self, plan=replace(self.plan, n_trials=int(n)))


def _wing_to_dict(w: WingSpec) -> Dict[str, Any]:
    return {"segments": [asdict(s) for s in w.segments],
            "hinges": [asdict(h) for h in w.hinges],
            "root_rigid": w.root_rigid}


def to_dict(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Fully explicit form of the config, loadable by :func:`from_dict`."""
    v, plan, dist = cfg.vehicle, cfg.plan, cfg.plan.distribution
    return {
        "master_seed": cfg.master_seed,
        "output_dir": cfg.output_dir,
        "vehicle": {
            "fuselage_mass": v.fuselage_mass,
            "fuselage_half_width": v.fuselage_half_width,
            "tip_mass_fraction": v.tip_mass_fraction,
            "left_wing": _wing_to_dict(v.left_wing),
            "right_wing": _wing_to_dict(v.right_wing),
        },
        "pole": asdict(cfg.pole),
        "material": asdict(cfg.material),
        "trial_plan": {
            "n_trials": plan.n_trials,
            "speed_min": dist.speed_min,
            "speed_max": dist.speed_max,
            "lateral_offset_jitter": dist.lateral_offset_jitter,
            "approach_angle_jitter": dist.approach_angle_jitter,
            "start_distance": dist.start_distance,
            "trial": {"impact_speed": plan.trial.impact_speed,
                      "lateral_offset": plan.trial.lateral_offset,
                      "approach_angle": plan.trial.approach_angle,
                      "seed": plan.trial.seed},
            "speed_bracket": list(plan.speed_bracket),
            "speed_tol": plan.speed_tol,
        },
        "sweep": {"fractions": list(cfg.fractions)},
        "solver": asdict(cfg.solver),
    }


def _wing_from_dict(d: Optional[Dict[str, Any]], path: str) -> WingSpec:
    if d is None:
        return WingSpec()
    explicit = "segments" in d or "hinges" in d
    uniform = any(k in d for k in ("n_segments", "segment", "hinge"))
    if explicit and uniform:
        raise ConfigError(f"{path}: give either n_segments/segment/hinge or segments/hinges, not both")
    if explicit:
        segs = tuple(SegmentSpec(**s) for s in d.get("segments", []))
        hinges = tuple(HingeSpec(**h) for h in d.get("hinges", [])) if "hinges" in d \
            else (HingeSpec(),) * len(segs)
        return WingSpec(segs, hinges, d.get("root_rigid", False))
    n = d.get("n_segments", 4)
    if n < 1:
        raise ConfigError(f"{path}.n_segments must be >= 1")
    return WingSpec.uniform(n, SegmentSpec(**d.get("segment", {})), HingeSpec(**d.get("hinge", {})),
                            d.get("root_rigid", False))


def from_dict(doc: Dict[str, Any]) -> ExperimentConfig:
    """Validate a config document and build the experiment description.

    Raises :class:`ConfigError` naming the offending field.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {e.message}") from None

    vd = doc.get("vehicle", {})
    if "wing" in vd and ("left_wing" in vd or "right_wing" in vd):
        raise ConfigError("vehicle: give either wing or left_wing/right_wing, not both")
    both = vd.get("wing")
    vehicle = VehicleSpec(
        fuselage_mass=vd.get("fuselage_mass", VehicleSpec.fuselage_mass),
        fuselage_half_width=vd.get("fuselage_half_width", VehicleSpec.fuselage_half_width),
        left_wing=_wing_from_dict(vd.get("left_wing", both), "vehicle.left_wing"),
        right_wing=_wing_from_dict(vd.get("right_wing", both), "vehicle.right_wing"),
        tip_mass_fraction=vd.get("tip_mass_fraction", 0.0),
    )
    pole = PoleSpec(**doc.get("pole", {}))
    # contact parameters default to the pole's surface values
    md = {"normal_stiffness": pole.normal_stiffness, "normal_damping": pole.normal_damping,
          "friction_mu": pole.friction_mu, **doc.get("material", {})}

    pd = doc.get("trial_plan", {})
    d0 = TossDistribution()
    dist = TossDistribution(
        speed_min=pd.get("speed_min", d0.speed_min),
        speed_max=pd.get("speed_max", d0.speed_max),
        lateral_offset_jitter=pd.get("lateral_offset_jitter", d0.lateral_offset_jitter),
        approach_angle_jitter=pd.get("approach_angle_jitter", d0.approach_angle_jitter),
        start_distance=pd.get("start_distance", d0.start_distance),
    )
    td = pd.get("trial", {})
    trial = TrialConditions(td.get("impact_speed", 3.0), td.get("lateral_offset", 0.0),
                            td.get("approach_angle", 0.0), dist.start_distance, td.get("seed", 0))
    plan = TrialPlan(pd.get("n_trials", 40), dist, trial,
                     tuple(pd.get("speed_bracket", (1.0, 5.0))), pd.get("speed_tol", 0.05))

    try:
        material = MaterialParams(**md)
        solver = SimParams(**doc.get("solver", {}))
    except ValueError as e:
        raise ConfigError(str(e)) from None
    cfg = ExperimentConfig(
        master_seed=doc["master_seed"],
        vehicle=vehicle,
        pole=pole,
        material=material,
        plan=plan,
        fractions=tuple(doc.get("sweep", {}).get("fractions", DEFAULT_FRACTIONS)),
        solver=solver,
        output_dir=doc.get("output_dir"),
    )
    check(cfg)
    return cfg


def check(cfg: ExperimentConfig) -> None:
    issues = validate_spec(cfg.vehicle, cfg.pole)
    plan, dist, s = cfg.plan, cfg.plan.distribution, cfg.solver
    rules = [
        ("trial_plan.n_trials", plan.n_trials >= 1, "must be >= 1"),
        ("trial_plan.speed_min", dist.speed_min > 0, "must be > 0"),
        ("trial_plan.speed_max", dist.speed_max >= dist.speed_min, "must be >= speed_min"),
        ("trial_plan.lateral_offset_jitter", dist.lateral_offset_jitter >= 0, "must be >= 0"),
        ("trial_plan.approach_angle_jitter", 0 <= dist.approach_angle_jitter < math.pi / 2,
         "must be in [0, pi/2)"),
        ("trial_plan.trial.impact_speed", plan.trial.impact_speed > 0, "must be > 0"),
        ("trial_plan.speed_bracket", 0 < plan.speed_bracket[0] < plan.speed_bracket[1],
         "must satisfy 0 < lo < hi"),
        ("trial_plan.speed_tol", plan.speed_tol > 0, "must be > 0"),
        ("solver.dt", s.dt > 0, "must be > 0"),
        ("solver.timeout", s.timeout > s.dt, "must exceed dt"),
        ("solver.settle_epsilon", s.settle_epsilon > 0, "must be > 0"),
        ("solver.settle_hold", s.settle_hold >= 0, "must be >= 0"),
        ("solver.wrap_threshold", 0 < s.wrap_threshold < 2 * math.pi, "must be in (0, 2 pi)"),
        ("solver.overlap_epsilon", s.overlap_epsilon >= 0, "must be >= 0"),
        ("solver.contact_margin", s.contact_margin >= 0, "must be >= 0"),
    ]
    issues += [Issue(p, r) for p, ok, r in rules if not ok]
    if not all(0 <= x < 1 for x in cfg.fractions):
        issues.append(Issue("sweep.fractions", "entries must be in [0, 1)"))
    if not issues:
        half_span = cfg.vehicle.fuselage_half_width + max(
            sum(x.length for x in cfg.vehicle.left_wing.segments),
            sum(x.length for x in cfg.vehicle.right_wing.segments))
        if not dist.start_distance > cfg.pole.radius + half_span:
            issues.append(Issue("trial_plan.start_distance",
                                "must exceed pole radius + half wingspan"))
    if issues:
        raise ConfigError(str(SpecError(issues)))


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from None
    return from_dict(doc if doc is not None else {})


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=True)


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical effective config, ignoring where outputs go."""
    d = to_dict(cfg)
    d.pop("output_dir", None)
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(blob.encode()).hexdigest()
