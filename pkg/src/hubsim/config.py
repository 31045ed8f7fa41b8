"""Experiment configuration: dataclasses, JSON parsing and serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

import jsonschema
import numpy as np

from .bath import ANGLE_CONVENTIONS, BathMode, BathSpec, Coupling, Topology
from .engine import NoiseModel
from .model import Filling, InitialKind, InitialState, ModelSpec, default_initial_state

DEFAULT_SHOTS = 8192


class ConfigError(ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


@dataclass(frozen=True)
class ZneSettings:
    order: int = 1
    scales: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))
        if len(set(self.scales)) != len(self.scales) or min(self.scales) < 1:
            raise ValueError("zne scales must be distinct positive integers")
        if len(self.scales) < self.order + 1:
            raise ValueError(f"zne order {self.order} needs {self.order + 1} scales")


@dataclass(frozen=True)
class Mitigation:
    readout: bool = False
    zne: ZneSettings | None = None
    bitflip: bool = False
    raw_inverse: bool = False

    @property
    def any(self) -> bool:
        return self.readout or self.bitflip or self.zne is not None


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    init: InitialState | None = None
    bath: BathSpec = field(default_factory=BathSpec)
    noise: NoiseModel = field(default_factory=NoiseModel)
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    mitigation: Mitigation = field(default_factory=Mitigation)
    output_path: str = ""
    relabel: bool = False
    name: str = ""

    def __post_init__(self):
        if self.init is None:
            object.__setattr__(self, "init", default_initial_state(self.model.filling))
        self.init.density(self.model.filling)  # raises on filling mismatch
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.shots == 0 and (self.mitigation.readout or self.mitigation.bitflip):
            raise ValueError("readout and bitflip mitigation need sampled runs (shots > 0)")

    def exact(self) -> "ExperimentConfig":
        """Exact-mode copy; drops mitigations that only apply to sampled data."""
        return replace(self, shots=0, mitigation=replace(self.mitigation, readout=False, bitflip=False))


_PROB = {"type": "number", "minimum": 0, "maximum": 1}
_NONNEG = {"type": "number", "minimum": 0}
_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "name": {"type": "string"},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["filling"],
            "properties": {
                "filling": {"enum": [f.value for f in Filling]},
                "eps_dt": {"type": "number"},
                "t12_dt": {"type": "number"},
                "uc_dt": {"type": "number"},
                "steps": {"type": "integer", "minimum": 0, "maximum": 100000},
            },
        },
        "init": {
            "oneOf": [
                {"enum": [k.value for k in InitialKind if k is not InitialKind.CUSTOM]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["custom"],
                    "properties": {"custom": {"type": "array", "items": {"type": "array", "items": _COMPLEX}}},
                },
            ]
        },
        "bath": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coupling": {"enum": [c.value for c in Coupling]},
                "g_dt": _NONNEG,
                "topology": {"enum": [t.value for t in Topology]},
                "mode": {"enum": [m.value for m in BathMode]},
                "beta_omega": {"oneOf": [{"type": "null"}, _NONNEG]},
                "angle_convention": {"enum": list(ANGLE_CONVENTIONS)},
                "extra_modes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["g_dt"],
                        "properties": {"g_dt": _NONNEG, "beta_omega": {"oneOf": [{"type": "null"}, _NONNEG]}},
                    },
                },
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gate_depolarizing": _PROB,
                "gate_depolarizing_2q": {"oneOf": [{"type": "null"}, _PROB]},
                "amplitude_decay_per_step": _PROB,
                "readout_flip": {"type": "array", "items": _PROB, "minItems": 2, "maxItems": 2},
                "fresh_swap_depolarizing": _PROB,
            },
        },
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "mitigation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "readout": {"type": "boolean"},
                "bitflip": {"type": "boolean"},
                "raw_inverse": {"type": "boolean"},
                "zne": {
                    "oneOf": [
                        {"type": "null"},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                "order": {"type": "integer", "minimum": 1},
                                "scales": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                            },
                        },
                    ]
                },
            },
        },
        "output_path": {"type": "string"},
        "relabel": {"type": "boolean"},
    },
}


def _path(parts) -> str:
    return ".".join(str(p) for p in parts)


def _build(section: str, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(section, str(exc)) from None


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Validate a decoded JSON document and build the config (with defaults)."""
    if not isinstance(doc, dict) or not doc:
        raise ConfigError("", "configuration document is empty")
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_path(errors[0].absolute_path), errors[0].message)

    m = doc["model"]
    if m["filling"] == Filling.TWO_ELECTRON.value and m.get("eps_dt", 0) != 0:
        raise ConfigError("model.eps_dt", "must be 0 for the two-electron model")
    model = _build("model", ModelSpec, **m)

    init = None
    if "init" in doc:
        raw = doc["init"]
        if isinstance(raw, str):
            init = InitialState(InitialKind(raw))
        else:
            mat = np.array([[complex(re, im) for re, im in row] for row in raw["custom"]])
            init = _build("init.custom", InitialState.custom, mat)

    b = dict(doc.get("bath", {}))
    if "extra_modes" in b:
        b["extra_modes"] = tuple((e["g_dt"], e.get("beta_omega")) for e in b["extra_modes"])
    bath = _build("bath", BathSpec, **b)
    noise = _build("noise", NoiseModel, **doc.get("noise", {}))

    mit = dict(doc.get("mitigation", {}))
    if mit.get("zne") is not None:
        mit["zne"] = _build("mitigation.zne", ZneSettings, **mit["zne"])
    mitigation = Mitigation(**mit)

    return _build("", ExperimentConfig, model=model, init=init, bath=bath, noise=noise,
                  shots=doc.get("shots", DEFAULT_SHOTS), seed=doc.get("seed", 0),
                  mitigation=mitigation, output_path=doc.get("output_path", ""),
                  relabel=doc.get("relabel", False), name=doc.get("name", ""))


def parse_config(text: str) -> ExperimentConfig:
    if not text or not text.strip():
        raise ConfigError("", "configuration document is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from None
    return config_from_dict(doc)


def config_to_dict(config: ExperimentConfig) -> dict:
    m, b, n, mit = config.model, config.bath, config.noise, config.mitigation
    if config.init.kind is InitialKind.CUSTOM:
        init: Any = {"custom": [[[z.real, z.imag] for z in row] for row in config.init.matrix]}
    else:
        init = config.init.kind.value
    return {
        "name": config.name,
        "model": {"filling": m.filling.value, "eps_dt": m.eps_dt, "t12_dt": m.t12_dt,
                  "uc_dt": m.uc_dt, "steps": m.steps},
        "init": init,
        "bath": {"coupling": b.coupling.value, "g_dt": b.g_dt, "topology": b.topology.value,
                 "mode": b.mode.value, "beta_omega": b.beta_omega, "angle_convention": b.angle_convention,
                 "extra_modes": [{"g_dt": g, "beta_omega": beta} for g, beta in b.extra_modes]},
        "noise": {"gate_depolarizing": n.gate_depolarizing, "gate_depolarizing_2q": n.gate_depolarizing_2q,
                  "amplitude_decay_per_step": n.amplitude_decay_per_step,
                  "readout_flip": list(n.readout_flip), "fresh_swap_depolarizing": n.fresh_swap_depolarizing},
        "shots": config.shots,
        "seed": config.seed,
        "mitigation": {"readout": mit.readout, "bitflip": mit.bitflip, "raw_inverse": mit.raw_inverse,
                       "zne": None if mit.zne is None else {"order": mit.zne.order, "scales": list(mit.zne.scales)}},
        "output_path": config.output_path,
        "relabel": config.relabel,
    }


def serialize_config(config: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True)
