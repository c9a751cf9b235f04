"""JSON simulation configs: schema validation and conversion to typed specs."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Optional

import jsonschema

from .cavity import CavitySpec, enhancement
from .exceptions import CavityFockError, ConfigError
from .herald import HeraldSpec, Pattern, RateModel
from .tomo import TomoConfig

_prob = {"type": "number", "minimum": 0, "maximum": 1}
_prob_open = {"type": "number", "minimum": 0, "exclusiveMaximum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["source"],
    "properties": {
        "source": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lambda"],
            "properties": {
                "lambda": _prob_open,
                "rep_rate": {"type": "number", "exclusiveMinimum": 0},
                "dim": {"type": "integer", "minimum": 2, "maximum": 60},
            },
        },
        "cavity": {
            "type": "object",
            "additionalProperties": False,
            "required": ["r_in", "r_loop"],
            "properties": {"r_in": _prob_open, "r_loop": _prob_open},
        },
        "herald": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "split": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "eta_click": _prob,
                "dark": _prob_open,
                "pattern": {"enum": [p.value for p in Pattern]},
            },
        },
        "losses": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"eta_prep": _prob},
        },
        "detection": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"eta_d": _prob},
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_samples": {"type": "integer", "minimum": 1},
                "schedule": {"enum": ["uniform-random", "stepped"]},
                "steps": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "tomo": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dim": {"type": "integer", "minimum": 2, "maximum": 60},
                "eta_d": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "mode": {"enum": ["full", "diagonal"]},
                "bins": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "reference": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rate1_hz": {"type": "number", "exclusiveMinimum": 0},
                "rate1_single_pass_hz": {"type": "number", "exclusiveMinimum": 0},
                "rate2_hz": {"type": "number", "minimum": 0},
                "rate2_err_hz": {"type": "number", "minimum": 0},
            },
        },
    },
}


@dataclass(frozen=True)
class SamplingConfig:
    n_samples: int = 7000
    schedule: str = "uniform-random"
    steps: int = 12
    seed: int = 0


@dataclass(frozen=True)
class SimulationConfig:
    lam: float
    rep_rate: float
    source_dim: int
    cavity: Optional[CavitySpec]
    herald: HeraldSpec
    eta_prep: float
    eta_d: float
    sampling: SamplingConfig
    tomo: TomoConfig
    reference: dict

    @property
    def rate_model(self) -> RateModel:
        return RateModel(self.rep_rate, self.lam)


def _path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    return "/".join(parts) if parts else "<root>"


def parse_config(obj: dict, seed: Optional[int] = None) -> SimulationConfig:
    """Validate a config mapping; ``seed`` overrides ``sampling.seed``."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(err.message, _path(err))
    obj = copy.deepcopy(obj)
    src = obj["source"]
    samp = obj.get("sampling", {})
    if seed is not None:
        samp["seed"] = seed
    cavity = None
    if "cavity" in obj:
        cavity = CavitySpec(obj["cavity"]["r_in"], obj["cavity"]["r_loop"])
        try:
            scaled = src["lambda"] * enhancement(cavity) ** 0.5
        except CavityFockError as exc:
            raise ConfigError(str(exc), "cavity") from exc
        if scaled >= 1:
            raise ConfigError(f"cavity-enhanced gain {scaled:.4g} >= 1", "source/lambda")
    try:
        tomo = TomoConfig(**obj.get("tomo", {}))
        herald = HeraldSpec(**obj.get("herald", {}))
    except CavityFockError as exc:
        raise ConfigError(str(exc)) from exc
    return SimulationConfig(
        lam=float(src["lambda"]),
        rep_rate=float(src.get("rep_rate", 82e6)),
        source_dim=int(src.get("dim", 8)),
        cavity=cavity,
        herald=herald,
        eta_prep=float(obj.get("losses", {}).get("eta_prep", 1.0)),
        eta_d=float(obj.get("detection", {}).get("eta_d", 1.0)),
        sampling=SamplingConfig(**samp),
        tomo=tomo,
        reference=dict(obj.get("reference", {})),
    )
