"""Forward/differential kinematics and statics over a robot model.

All functions are pure over (model, configuration) snapshots. Jacobian
columns are ordered (root translation, root orientation increment, joints);
the orientation increment is an angle-axis vector applied on the left of
the root quaternion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kern
from ..geometry import quat_to_matrix
from .types import Configuration, RobotModel


@dataclass(frozen=True)
class FK:
    """World poses of every link, in model link order."""

    model: RobotModel
    R: np.ndarray  # (L,3,3)
    p: np.ndarray  # (L,3)

    def link_pose(self, name: str):
        i = self.model.link_index(name)
        return self.R[i], self.p[i]

    def frame_pose(self, ee_name: str):
        ee = self.model.end_effector(ee_name)
        i = self.model.link_index(ee.link)
        return self.R[i] @ ee.offset_rot, self.p[i] + self.R[i] @ ee.offset_pos

    def poses(self) -> dict:
        return {name: (self.R[i], self.p[i]) for i, name in enumerate(self.model.link_names)}


def forward_kinematics(model: RobotModel, cfg: Configuration) -> FK:
    k = model.kin
    be = kern.get_backend()
    R, p = be.fk(
        k.parent,
        k.joint_col,
        k.origin_pos,
        k.origin_rot,
        k.axis,
        quat_to_matrix(cfg.root_quaternion),
        cfg.root_position,
        cfg.joint_angles,
    )
    return FK(model, R, p)


def point_jacobian(model: RobotModel, cfg: Configuration, link: str, point_in_link=None, fk: FK | None = None) -> np.ndarray:
    """6x(6+N) Jacobian of a point rigidly attached to `link`."""
    if fk is None:
        fk = forward_kinematics(model, cfg)
    i = model.link_index(link)
    if point_in_link is None:
        x = fk.p[i]
    else:
        x = fk.p[i] + fk.R[i] @ np.asarray(point_in_link, dtype=float)
    k = model.kin
    return kern.get_backend().point_jacobian(
        k.parent, k.joint_col, k.axis, fk.R, fk.p, cfg.root_position, i, x, model.n_joints
    )


def frame_jacobian(model: RobotModel, cfg: Configuration, ee_name: str, fk: FK | None = None) -> np.ndarray:
    ee = model.end_effector(ee_name)
    return point_jacobian(model, cfg, ee.link, ee.offset_pos, fk=fk)


def com(model: RobotModel, cfg: Configuration, fk: FK | None = None) -> np.ndarray:
    c, _ = com_and_jacobian(model, cfg, fk=fk)
    return c


def com_jacobian(model: RobotModel, cfg: Configuration, fk: FK | None = None) -> np.ndarray:
    _, J = com_and_jacobian(model, cfg, fk=fk)
    return J


def com_and_jacobian(model: RobotModel, cfg: Configuration, fk: FK | None = None):
    if fk is None:
        fk = forward_kinematics(model, cfg)
    k = model.kin
    return kern.get_backend().com_and_jacobian(
        k.parent, k.joint_col, k.axis, k.mass, k.com, fk.R, fk.p, cfg.root_position, model.n_joints
    )


def gravity_torque(model: RobotModel, cfg: Configuration, fk: FK | None = None) -> np.ndarray:
    if fk is None:
        fk = forward_kinematics(model, cfg)
    k = model.kin
    return kern.get_backend().gravity_torque(
        k.parent, k.joint_col, k.axis, k.mass, k.com, fk.R, fk.p, model.gravity, model.n_joints
    )


def _frame_arrays(model: RobotModel, frames):
    links = np.array([model.link_index(model.end_effector(f).link) for f in frames], dtype=np.int32)
    offsets = np.array([model.end_effector(f).offset_pos for f in frames], dtype=float).reshape(-1, 3)
    return links, offsets


def contact_torque(model: RobotModel, cfg: Configuration, wrenches: dict, fk: FK | None = None) -> np.ndarray:
    """Joint torques induced by world wrenches applied at end-effector frames."""
    if fk is None:
        fk = forward_kinematics(model, cfg)
    if not wrenches:
        return np.zeros(model.n_joints)
    frames = list(wrenches)
    links, offsets = _frame_arrays(model, frames)
    W = np.array([np.asarray(wrenches[f], dtype=float).reshape(6) for f in frames])
    k = model.kin
    return kern.get_backend().contact_torque(
        k.parent, k.joint_col, k.axis, fk.R, fk.p, links, offsets, W, model.n_joints
    )


def drive_torque(model: RobotModel, cfg: Configuration, wrenches: dict | None = None, fk: FK | None = None) -> np.ndarray:
    """Actuator torque holding the pose statically: gravity minus contact."""
    if fk is None:
        fk = forward_kinematics(model, cfg)
    tau = gravity_torque(model, cfg, fk=fk)
    if wrenches:
        tau = tau - contact_torque(model, cfg, wrenches, fk=fk)
    return tau
