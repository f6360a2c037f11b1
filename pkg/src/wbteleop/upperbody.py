"""High-rate upper-body refinement.

Damped least-squares IK over the trunk and arm joints only, warm-started
from the latest optimized whole-body pose. Legs and the root pose pass
through bit-exactly; the per-call joint excursion is capped so the
optimizer's statics stay approximately valid between low-rate solves.

The iteration count is fixed (not wall-clock gated) so replays are
deterministic; the count is sized to fit the high-rate budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import rotation_log
from .model import Configuration, RobotModel, forward_kinematics, frame_jacobian


@dataclass(frozen=True)
class UpperBodySelection:
    """Index sets splitting joints into refined and pass-through groups."""

    joints: tuple  # refined (trunk + arms)
    excluded: tuple  # untouched (legs, everything else)

    def validate(self, model: RobotModel) -> None:
        j, e = set(self.joints), set(self.excluded)
        if j & e:
            raise ValueError(f"selection sets overlap: {sorted(j & e)}")
        if not (j | e) <= set(range(model.n_joints)):
            raise ValueError("selection references joints outside the model")


def default_selection(model: RobotModel) -> UpperBodySelection:
    """Trunk and both arms; legs, neck, and anything else pass through."""
    refined = []
    for i, name in enumerate(model.joint_names):
        if name.startswith("waist") or "shoulder" in name or "elbow" in name:
            refined.append(i)
    excluded = tuple(i for i in range(model.n_joints) if i not in refined)
    return UpperBodySelection(tuple(refined), excluded)


@dataclass
class RefinerConfig:
    iterations: int = 12
    damping: float = 0.05
    orientation_weight: float = 0.3
    position_weight: float = 1.0
    delta_cap: float = 0.1  # rad, per call, per joint


def refine(
    model: RobotModel,
    pose: Configuration,
    hand_targets: dict,
    selection: UpperBodySelection | None = None,
    config: RefinerConfig | None = None,
) -> Configuration:
    """Pull the hands toward `hand_targets` using only the selected joints.

    hand_targets maps frame name -> (R, p) or p (position-only). Always
    returns a best-effort result within the iteration budget.
    """
    sel = selection or default_selection(model)
    cf = config or RefinerConfig()
    sel.validate(model)
    if not hand_targets:
        return pose.copy()

    cols = [6 + j for j in sel.joints]
    base = pose.joint_angles
    lo = np.maximum(model.joint_lower[list(sel.joints)], base[list(sel.joints)] - cf.delta_cap)
    hi = np.minimum(model.joint_upper[list(sel.joints)], base[list(sel.joints)] + cf.delta_cap)

    out = pose.copy()
    for _ in range(cf.iterations):
        fk = forward_kinematics(model, out)
        rows = []
        errs = []
        for frame, target in hand_targets.items():
            R, p = fk.frame_pose(frame)
            if isinstance(target, tuple):
                R_t, p_t = target
            else:
                R_t, p_t = None, np.asarray(target, float)
            J = frame_jacobian(model, out, frame, fk=fk)
            rows.append(cf.position_weight * J[0:3][:, cols])
            errs.append(cf.position_weight * (p_t - p))
            if R_t is not None:
                rows.append(cf.orientation_weight * J[3:6][:, cols])
                errs.append(cf.orientation_weight * rotation_log(np.asarray(R_t) @ R.T))
        J = np.vstack(rows)
        e = np.concatenate(errs)
        if float(np.max(np.abs(e))) < 1e-12:
            break
        H = J.T @ J + cf.damping**2 * np.eye(len(cols))
        step = np.linalg.solve(H, J.T @ e)
        th = out.joint_angles[list(sel.joints)] + step
        new_sel = np.clip(th, lo, hi)
        if np.array_equal(new_sel, out.joint_angles[list(sel.joints)]):
            break
        out.joint_angles[list(sel.joints)] = new_sel
    return out
