"""Contact-mode state machine driven by generated foot heights.

Double support switches to single support when one sole rises above the
other by more than the height threshold (the raised foot becomes swing);
single support returns to double only when the feet are level again AND
their x positions are close, so pressing something forward with the swing
foot cannot drop the robot back to double support. A small hysteresis band
around the threshold suppresses chatter from noisy poses.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import Configuration, RobotModel, forward_kinematics
from .posture import DOUBLE, SINGLE_LEFT, SINGLE_RIGHT


@dataclass(frozen=True)
class FootstepState:
    mode: str = DOUBLE
    height_threshold: float = 0.06  # m
    x_threshold: float = 0.05  # m
    hysteresis: float = 0.005  # m
    swing_pose: tuple | None = None  # last commanded swing-foot (R, p)

    def __post_init__(self):
        if self.height_threshold <= 0 or self.x_threshold <= 0:
            raise ValueError("thresholds must be > 0")


@dataclass(frozen=True)
class FootstepEvent:
    kind: str  # contact_mode | wrench_task | swing_target
    mode: str
    swing_foot: str | None = None
    pose: tuple | None = None  # (R, p) for swing_target


def update(state: FootstepState, pose: Configuration, model: RobotModel):
    """Advance the machine on a new whole-body pose; returns (state', events).

    Events come in triples on each transition: the contact-set change and
    wrench-task change for the posture optimizer, and the swing-foot pose
    command for the plant.
    """
    fk = forward_kinematics(model, pose)
    Rl, pl = fk.frame_pose("l_foot")
    Rr, pr = fk.frame_pose("r_foot")
    dz = pl[2] - pr[2]
    dx = abs(pl[0] - pr[0])

    up = state.height_threshold + state.hysteresis
    down = state.height_threshold - state.hysteresis

    new_mode = state.mode
    if state.mode == DOUBLE:
        if dz > up:
            new_mode = SINGLE_RIGHT  # left foot raised; right is stance
        elif -dz > up:
            new_mode = SINGLE_LEFT
    else:
        if abs(dz) < down and dx < state.x_threshold:
            new_mode = DOUBLE

    if new_mode == state.mode:
        if state.mode != DOUBLE:
            swing = "l_foot" if state.mode == SINGLE_RIGHT else "r_foot"
            swing_pose = (Rl, pl) if swing == "l_foot" else (Rr, pr)
            return replace(state, swing_pose=_copy(swing_pose)), []
        return state, []

    events = []
    if new_mode == DOUBLE:
        swing = "l_foot" if state.mode == SINGLE_RIGHT else "r_foot"
        ground = (Rl, pl) if swing == "l_foot" else (Rr, pr)
        events.append(FootstepEvent("contact_mode", DOUBLE))
        events.append(FootstepEvent("wrench_task", DOUBLE))
        events.append(FootstepEvent("swing_target", DOUBLE, swing_foot=swing, pose=_copy(ground)))
        return replace(state, mode=DOUBLE, swing_pose=None), events

    swing = "l_foot" if new_mode == SINGLE_RIGHT else "r_foot"
    swing_pose = (Rl, pl) if swing == "l_foot" else (Rr, pr)
    events.append(FootstepEvent("contact_mode", new_mode))
    events.append(FootstepEvent("wrench_task", new_mode))
    events.append(FootstepEvent("swing_target", new_mode, swing_foot=swing, pose=_copy(swing_pose)))
    return replace(state, mode=new_mode, swing_pose=_copy(swing_pose)), events


def _copy(pose):
    R, p = pose
    return (np.array(R, dtype=float), np.array(p, dtype=float))
