"""Scenario files: objects the simulated robot interacts with.

JSON schema (docs/scenario_format.md): top-level `name`, optional `objects`
list (boxes/payloads with handles) and optional `pedal`. A box attaches to
the hands when every listed handle has its hand within `grasp_radius` and
that hand's trigger above `trigger_threshold`; it detaches when a trigger
drops below the release threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class BoxObject:
    name: str
    mass: float  # kg
    position: np.ndarray  # reference point, world
    handles: dict  # hand frame -> world position at scenario start
    grasp_radius: float = 0.10
    trigger_threshold: float = 0.8
    release_threshold: float = 0.2


@dataclass(frozen=True)
class PedalObject:
    name: str
    position: np.ndarray  # rest position of the pedal top, world
    spring_k: float  # N/m
    travel: float = 0.08  # m
    radius: float = 0.12  # foot must be within this horizontal radius


@dataclass(frozen=True)
class Scenario:
    name: str = "empty"
    boxes: tuple = ()
    pedal: PedalObject | None = None

    @property
    def total_payload(self) -> float:
        return float(sum(b.mass for b in self.boxes))


def build_scenario(data: dict) -> Scenario:
    boxes = []
    for raw in data.get("objects", []):
        if raw.get("type", "box") != "box":
            raise ValueError(f"unknown object type {raw.get('type')!r}")
        boxes.append(
            BoxObject(
                name=raw["name"],
                mass=float(raw["mass"]),
                position=np.asarray(raw["position"], dtype=float),
                handles={k: np.asarray(v, dtype=float) for k, v in raw.get("handles", {}).items()},
                grasp_radius=float(raw.get("grasp_radius", 0.10)),
                trigger_threshold=float(raw.get("trigger_threshold", 0.8)),
                release_threshold=float(raw.get("release_threshold", 0.2)),
            )
        )
    pedal = None
    if data.get("pedal"):
        p = data["pedal"]
        pedal = PedalObject(
            name=p.get("name", "pedal"),
            position=np.asarray(p["position"], dtype=float),
            spring_k=float(p["spring_k"]),
            travel=float(p.get("travel", 0.08)),
            radius=float(p.get("radius", 0.12)),
        )
    return Scenario(name=data.get("name", "scenario"), boxes=tuple(boxes), pedal=pedal)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return build_scenario(json.loads(path.read_text()))
