from .collision import NearestPoints, nearest_points
from .kinematics import (
    FK,
    com,
    com_and_jacobian,
    com_jacobian,
    contact_torque,
    drive_torque,
    forward_kinematics,
    frame_jacobian,
    gravity_torque,
    point_jacobian,
)
from .load import build_model, load_model
from .types import (
    Configuration,
    EndEffector,
    FeetGeometry,
    Joint,
    Link,
    ModelError,
    RobotModel,
)

__all__ = [
    "FK",
    "Configuration",
    "EndEffector",
    "FeetGeometry",
    "Joint",
    "Link",
    "ModelError",
    "NearestPoints",
    "RobotModel",
    "build_model",
    "com",
    "com_and_jacobian",
    "com_jacobian",
    "contact_torque",
    "drive_torque",
    "forward_kinematics",
    "frame_jacobian",
    "gravity_torque",
    "load_model",
    "nearest_points",
    "point_jacobian",
]
