"""Nominal standing pose and default problem-spec builders for biped models.

Joint naming follows the reference model (``*_hip_pitch``, ``*_knee_pitch``,
...); models without those names just get a zero pose.
"""

from __future__ import annotations

import numpy as np

from .model import Configuration, RobotModel, forward_kinematics
from .posture import DOUBLE, KinematicTarget, ProblemSpec, WrenchTarget


def nominal_stance(model: RobotModel, knee_bend: float = 0.35) -> Configuration:
    """Slightly crouched symmetric stance with soles on the ground plane."""
    cfg = Configuration.neutral(model)
    angles = {}
    for side in ("l", "r"):
        angles[f"{side}_hip_pitch"] = -knee_bend / 2
        angles[f"{side}_knee_pitch"] = knee_bend
        angles[f"{side}_ankle_pitch"] = -knee_bend / 2
        angles[f"{side}_shoulder_pitch"] = 0.35
        angles[f"{side}_shoulder_roll"] = 0.25 if side == "l" else -0.25
        angles[f"{side}_elbow_pitch"] = -0.9
    for name, value in angles.items():
        try:
            cfg.joint_angles[model.joint_index(name)] = value
        except KeyError:
            pass
    # drop the root so the lowest sole sits at z = 0
    fk = forward_kinematics(model, cfg)
    feet = [ee.name for ee in model.end_effectors if ee.name.endswith("_foot")]
    if feet:
        sole_z = min(fk.frame_pose(f)[1][2] for f in feet)
        cfg.root_position = np.array([0.0, 0.0, -sole_z])
    return cfg


def stance_wrenches(model: RobotModel, feet=("l_foot", "r_foot")) -> dict:
    share = model.total_mass * model.gravity / len(feet)
    return {f: np.array([0.0, 0.0, share, 0.0, 0.0, 0.0]) for f in feet}


def default_weights() -> dict:
    return {
        "hand_kin": 10.0,
        "foot_kin": 10.0,
        "root_orientation": 0.1,
        "head_orientation": 0.1,
        "force": 1.0,
        "moment": 1.0,
        "torque": 0.02,
        "com": 1.0,
    }


def stance_spec(
    model: RobotModel,
    cfg: Configuration,
    weights: dict | None = None,
    com_target=None,
    com_weight=(1.0, 1.0, 0.0),
    collision_pairs=(),
    root_height_offset=None,
) -> ProblemSpec:
    """Double-support spec holding all end effectors at their current poses."""
    w = default_weights()
    if weights:
        w.update(weights)
    fk = forward_kinematics(model, cfg)
    targets = []
    for ee in model.end_effectors:
        R, p = fk.frame_pose(ee.name)
        if ee.name.endswith("_hand"):
            kw = np.full(6, w["hand_kin"])
            targets.append(KinematicTarget(ee.name, p.copy(), R.copy(), kw))
        elif ee.name.endswith("_foot"):
            kw = np.full(6, w["foot_kin"])
            targets.append(KinematicTarget(ee.name, p.copy(), R.copy(), kw))
        elif ee.name == "head":
            targets.append(
                KinematicTarget(ee.name, None, R.copy(), np.full(6, w["head_orientation"]))
            )
    R_root, _ = fk.link_pose(model.root_link)
    targets.append(
        KinematicTarget(model.root_link, None, R_root.copy(), np.full(6, w["root_orientation"]))
    )
    feet = tuple(ee.name for ee in model.end_effectors if ee.name.endswith("_foot"))
    return ProblemSpec(
        kinematic_targets=tuple(targets),
        wrench_frames=feet,
        contact_frames=feet,
        contact_mode=DOUBLE,
        torque_weight=w["torque"],
        com_target=None if com_target is None else np.asarray(com_target, float),
        com_weight=np.asarray(com_weight, float),
        force_weight=np.full(3, w["force"]),
        moment_weight=np.full(3, w["moment"]),
        collision_pairs=tuple(collision_pairs),
        root_height_offset=root_height_offset,
    )


def with_hand_load(spec: ProblemSpec, force_per_hand: float, weight: float = 5.0) -> ProblemSpec:
    """Adds both hands to the wrench task with a downward target force
    (payload reaction), e.g. force_per_hand = -m_payload * g / 2."""
    from dataclasses import replace

    hands = ("l_hand", "r_hand")
    wrench_frames = spec.wrench_frames + tuple(h for h in hands if h not in spec.wrench_frames)
    w_ref = np.array([0.0, 0.0, force_per_hand, 0.0, 0.0, 0.0])
    targets = tuple(t for t in spec.wrench_targets if t.frame not in hands) + tuple(
        WrenchTarget(h, w_ref.copy(), np.full(6, weight)) for h in hands
    )
    return replace(spec, wrench_frames=wrench_frames, wrench_targets=targets)
