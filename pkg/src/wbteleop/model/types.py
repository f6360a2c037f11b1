"""Robot model and configuration containers.

A model is an immutable kinematic tree of revolute joints under a 6-DOF
floating root. Loading precomputes a flat array view (`KinArrays`) that the
kinematics kernels consume; nothing here mutates after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import quat_normalize

GRAVITY_DEFAULT = 9.80665


class ModelError(ValueError):
    """Raised when a model file violates the schema or an invariant."""


@dataclass(frozen=True)
class CollisionPrimitive:
    kind: str  # "sphere" | "capsule"
    radius: float
    # sphere: p0 is the center; capsule: segment p0..p1, both in link frame
    p0: np.ndarray
    p1: np.ndarray | None = None


@dataclass(frozen=True)
class Link:
    name: str
    mass: float
    com: np.ndarray  # COM offset in link frame [m]
    primitives: tuple[CollisionPrimitive, ...] = ()


@dataclass(frozen=True)
class Joint:
    name: str
    parent: str
    child: str
    axis: np.ndarray  # unit vector in child frame
    origin_pos: np.ndarray  # child frame origin in parent frame
    origin_rot: np.ndarray  # 3x3
    lower: float
    upper: float
    torque_lower: float
    torque_upper: float


@dataclass(frozen=True)
class EndEffector:
    name: str
    link: str
    offset_pos: np.ndarray
    offset_rot: np.ndarray


@dataclass(frozen=True)
class FeetGeometry:
    half_x: float  # sole half-extent along x [m]
    half_y: float
    mu: float  # friction coefficient
    mu_z: float  # torsional friction coefficient
    fz_min: float = 0.0
    fz_max: float | None = None  # default 2*M*g, resolved by the solver


@dataclass(frozen=True)
class KinArrays:
    """Flat, kernel-friendly view of the tree (one row per link).

    Links are stored in topological order, root first. `parent[i]` is the
    link index of link i's parent (-1 for root) and `joint_col[i]` the
    column of its driving joint in the joint-angle vector (-1 for root).
    """

    parent: np.ndarray  # (L,) int32
    joint_col: np.ndarray  # (L,) int32
    origin_pos: np.ndarray  # (L,3)
    origin_rot: np.ndarray  # (L,3,3)
    axis: np.ndarray  # (L,3) zero row for root
    mass: np.ndarray  # (L,)
    com: np.ndarray  # (L,3)


@dataclass(frozen=True)
class RobotModel:
    name: str
    links: tuple[Link, ...]
    joints: tuple[Joint, ...]  # topological order; joints[i] drives links[i+1]
    root_link: str
    end_effectors: tuple[EndEffector, ...]
    feet: FeetGeometry
    gravity: float = GRAVITY_DEFAULT
    kin: KinArrays = field(repr=False, default=None)

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def total_mass(self) -> float:
        return float(sum(l.mass for l in self.links))

    @property
    def link_names(self) -> list[str]:
        return [l.name for l in self.links]

    @property
    def joint_names(self) -> list[str]:
        return [j.name for j in self.joints]

    def link_index(self, name: str) -> int:
        try:
            return self.link_names.index(name)
        except ValueError:
            raise KeyError(f"unknown link: {name}") from None

    def joint_index(self, name: str) -> int:
        try:
            return self.joint_names.index(name)
        except ValueError:
            raise KeyError(f"unknown joint: {name}") from None

    def end_effector(self, name: str) -> EndEffector:
        for ee in self.end_effectors:
            if ee.name == name:
                return ee
        raise KeyError(f"unknown end effector: {name}")

    @property
    def joint_lower(self) -> np.ndarray:
        return np.array([j.lower for j in self.joints])

    @property
    def joint_upper(self) -> np.ndarray:
        return np.array([j.upper for j in self.joints])

    @property
    def torque_lower(self) -> np.ndarray:
        return np.array([j.torque_lower for j in self.joints])

    @property
    def torque_upper(self) -> np.ndarray:
        return np.array([j.torque_upper for j in self.joints])


@dataclass
class Configuration:
    """Optimization variable: root pose, joint angles, contact wrenches.

    Wrenches are keyed by end-effector name; each value is a 6-vector
    (force, moment) expressed in world coordinates at the frame origin.
    """

    root_position: np.ndarray
    root_quaternion: np.ndarray  # (w, x, y, z), unit norm
    joint_angles: np.ndarray
    wrenches: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.root_position = np.asarray(self.root_position, dtype=float).reshape(3)
        self.root_quaternion = np.asarray(self.root_quaternion, dtype=float).reshape(4)
        self.joint_angles = np.asarray(self.joint_angles, dtype=float).reshape(-1)
        self.wrenches = {k: np.asarray(v, dtype=float).reshape(6) for k, v in self.wrenches.items()}

    def validate(self, model: RobotModel, atol: float = 1e-9) -> None:
        if abs(float(np.linalg.norm(self.root_quaternion)) - 1.0) > atol:
            raise ValueError("root quaternion is not unit norm")
        if self.joint_angles.shape[0] != model.n_joints:
            raise ValueError(
                f"joint_angles has length {self.joint_angles.shape[0]}, "
                f"model has {model.n_joints} joints"
            )
        ee_names = {ee.name for ee in model.end_effectors}
        for frame in self.wrenches:
            if frame not in ee_names:
                raise ValueError(f"wrench bound to unknown frame: {frame}")

    def copy(self) -> "Configuration":
        return Configuration(
            root_position=self.root_position.copy(),
            root_quaternion=self.root_quaternion.copy(),
            joint_angles=self.joint_angles.copy(),
            wrenches={k: v.copy() for k, v in self.wrenches.items()},
        )

    @staticmethod
    def neutral(model: RobotModel) -> "Configuration":
        return Configuration(
            root_position=np.zeros(3),
            root_quaternion=np.array([1.0, 0.0, 0.0, 0.0]),
            joint_angles=np.zeros(model.n_joints),
        )

    def normalized(self) -> "Configuration":
        out = self.copy()
        out.root_quaternion = quat_normalize(out.root_quaternion)
        return out
