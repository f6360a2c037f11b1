"""Engine and solver configuration.

One JSON file drives everything; every field has a default so an empty
object is a valid config. Unknown keys are rejected to catch typos.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .plant import PlantConfig
from .posture import SolverConfig
from .upperbody import RefinerConfig


@dataclass
class EngineConfig:
    # loop rates [Hz]
    opg_hz: float = 8.0
    hfpg_hz: float = 30.0
    plant_hz: float = 100.0
    input_hz: float = 30.0
    # wire
    tcp_port: int = 8765
    ws_port: int = 8766
    proto_version: int = 1
    outbound_queue: int = 64  # per-client, drop-oldest
    # teleoperation
    scale: dict = field(default_factory=dict)  # limb -> k (scalar or 3-vector)
    # task weights (see stance.default_weights)
    weights: dict = field(default_factory=dict)
    com_weight: tuple = (1.0, 1.0, 0.0)
    root_height_offset: float | None = None
    collision_pairs: tuple = ()
    # footstep
    footstep_height_threshold: float = 0.06
    footstep_x_threshold: float = 0.05
    footstep_hysteresis: float = 0.005
    # sub-configs
    solver: SolverConfig = field(default_factory=SolverConfig)
    refiner: RefinerConfig = field(default_factory=RefinerConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    # recording
    record_rate_hz: float = 30.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, default=list)


def _apply(obj, data: dict, path: str):
    for key, value in data.items():
        if not hasattr(obj, key):
            raise ValueError(f"unknown config key {path}{key}")
        current = getattr(obj, key)
        if isinstance(current, (SolverConfig, RefinerConfig, PlantConfig)):
            if not isinstance(value, dict):
                raise ValueError(f"config key {path}{key} must be an object")
            _apply(current, value, f"{path}{key}.")
        else:
            if isinstance(value, list):
                value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
            setattr(obj, key, value)


def load_config(path=None) -> EngineConfig:
    cfg = EngineConfig()
    if path is not None:
        data = json.loads(Path(path).read_text())
        _apply(cfg, data, "")
    return cfg
