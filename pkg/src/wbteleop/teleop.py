"""Teleoperation session semantics.

Targets are driven by relative displacement: at session start (and on every
resume) the device pose and the robot's end-effector pose are captured as
anchors, and the target is the robot anchor advanced by the scaled device
displacement. Button combos pause/resume the stream, reset the pose, and
toggle demonstration recording; one trigger per hand drives that hand's
fingers.

Everything here is a pure transition function over immutable state
snapshots; the owning event loop serializes calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

IDLE = "idle"
ACTIVE = "active"
PAUSED = "paused"

LIMBS = ("l_hand", "r_hand", "l_foot", "r_foot")


class PhaseError(RuntimeError):
    """Operation not allowed in the current session phase."""


@dataclass(frozen=True)
class ControllerInput:
    """One sample from the operator device: per-hand buttons b1..b3,
    trigger in [0,1], and the device limb poses."""

    timestamp: float
    left_buttons: tuple = (False, False, False)
    right_buttons: tuple = (False, False, False)
    left_trigger: float = 0.0
    right_trigger: float = 0.0
    device_poses: dict = field(default_factory=dict)  # limb -> (R, p)

    def __post_init__(self):
        object.__setattr__(self, "left_trigger", float(np.clip(self.left_trigger, 0.0, 1.0)))
        object.__setattr__(self, "right_trigger", float(np.clip(self.right_trigger, 0.0, 1.0)))


@dataclass(frozen=True)
class Event:
    kind: str  # pause | resume | reset_pose | record | triggers
    data: object = None


@dataclass(frozen=True)
class SessionState:
    phase: str = IDLE
    scale: dict = field(default_factory=dict)  # limb -> per-axis factor (3,)
    device_anchor: dict = field(default_factory=dict)  # limb -> (R, p)
    robot_anchor: dict = field(default_factory=dict)  # limb -> (R, p)
    rotation_offset: dict = field(default_factory=dict)  # limb -> R
    frozen: frozenset = frozenset()
    recording: bool = False
    prev_left: tuple = (False, False, False)
    prev_right: tuple = (False, False, False)
    triggers: tuple = (0.0, 0.0)

    def limb_scale(self, limb) -> np.ndarray:
        k = self.scale.get(limb, 1.0)
        k = np.asarray(k, dtype=float)
        return np.full(3, float(k)) if k.ndim == 0 else k.reshape(3)

    def check(self) -> None:
        if self.phase == IDLE:
            if self.device_anchor or self.robot_anchor:
                raise ValueError("idle session must not carry anchors")
        else:
            if not self.device_anchor or not self.robot_anchor:
                raise ValueError(f"{self.phase} session requires anchors")
        for limb in self.scale:
            if np.any(self.limb_scale(limb) <= 0.0):
                raise ValueError(f"scale for {limb} must be > 0")


def start_session(state: SessionState, device_poses: dict, robot_poses: dict) -> SessionState:
    """Capture fresh anchors and go active (used at start and on resume)."""
    limbs = [l for l in device_poses if l in robot_poses]
    return replace(
        state,
        phase=ACTIVE,
        device_anchor={l: _copy_pose(device_poses[l]) for l in limbs},
        robot_anchor={l: _copy_pose(robot_poses[l]) for l in limbs},
    )


def _copy_pose(pose):
    R, p = pose
    return np.array(R, dtype=float), np.array(p, dtype=float)


def map_target(state: SessionState, device_poses: dict) -> dict:
    """Scaled relative-displacement mapping, limb by limb.

    target position = robot anchor + k * (device - device anchor)
    target rotation = offset @ (R_dev @ R_dev_anchor^T) @ R_rob_anchor
    Frozen limbs return their robot anchor pose unchanged.
    """
    if state.phase != ACTIVE:
        raise PhaseError(f"map_target requires an active session (phase={state.phase})")
    out = {}
    for limb, pose in device_poses.items():
        if limb not in state.device_anchor:
            continue
        Ra, pa = state.device_anchor[limb]
        Rr, pr = state.robot_anchor[limb]
        if limb in state.frozen:
            out[limb] = (Rr.copy(), pr.copy())
            continue
        Rd, pd = pose
        k = state.limb_scale(limb)
        p_tgt = pr + k * (np.asarray(pd, float) - pa)
        R_rel = np.asarray(Rd, float) @ Ra.T
        R_tgt = state.rotation_offset.get(limb, np.eye(3)) @ R_rel @ Rr
        out[limb] = (R_tgt, p_tgt)
    return out


def _pressed(prev, cur, i):
    return cur[i] and not prev[i]


def _combo_pressed(prev, cur, i, j):
    return (cur[i] and cur[j]) and not (prev[i] and prev[j])


def handle_input(state: SessionState, inp: ControllerInput, robot_poses: dict | None = None):
    """Apply one controller sample; returns (state', events).

    Button map: Lb-1 pause, Rb-1 restart (re-anchor), Lb-2+Lb-3 reset pose,
    Rb-2+Rb-3 record toggle. Trigger values are always forwarded.
    """
    events = []
    new = state

    if _pressed(state.prev_left, inp.left_buttons, 0) and state.phase == ACTIVE:
        new = replace(new, phase=PAUSED)
        events.append(Event("pause"))

    if _pressed(state.prev_right, inp.right_buttons, 0) and new.phase in (PAUSED, ACTIVE, IDLE):
        if robot_poses is None or not inp.device_poses:
            raise ValueError("restart requires device and robot poses to re-anchor")
        new = start_session(new, inp.device_poses, robot_poses)
        events.append(Event("resume"))

    if _combo_pressed(state.prev_left, inp.left_buttons, 1, 2):
        events.append(Event("reset_pose"))

    if _combo_pressed(state.prev_right, inp.right_buttons, 1, 2):
        new = replace(new, recording=not new.recording)
        events.append(Event("record", new.recording))

    events.append(Event("triggers", (inp.left_trigger, inp.right_trigger)))
    new = replace(
        new,
        prev_left=tuple(inp.left_buttons),
        prev_right=tuple(inp.right_buttons),
        triggers=(inp.left_trigger, inp.right_trigger),
    )
    return new, events


# ------------------------------------------------------------------ fingers

FINGER_JOINTS = ("thumb", "index0", "index1", "middle0", "middle1")

DEFAULT_FINGER_RANGES = {
    "thumb": (0.0, 1.2),
    "index0": (0.0, 1.4),
    "index1": (0.0, 1.4),
    "middle0": (0.0, 1.4),
    "middle1": (0.0, 1.4),
}

# two fingers mechanically fixed at 90 degrees for heavy-load carrying
LOCKED_FINGER_PRESET = {
    "thumb": 0.0,
    "index0": np.pi / 2,
    "index1": np.pi / 2,
    "middle0": np.pi / 2,
    "middle1": np.pi / 2,
}


def trigger_to_fingers(trigger: float, ranges: dict | None = None) -> dict:
    """Affine map from a single trigger value to the finger joint angles."""
    r = ranges or DEFAULT_FINGER_RANGES
    t = float(np.clip(trigger, 0.0, 1.0))
    return {name: (1.0 - t) * r[name][0] + t * r[name][1] for name in FINGER_JOINTS}
