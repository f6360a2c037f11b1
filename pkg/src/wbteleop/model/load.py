"""Model file loading and validation.

The schema is JSON with top-level keys `links`, `joints`, `end_effectors`,
`feet`, `gravity` (see docs/model_format.md). Angles are radians, lengths
meters, masses kilograms. Validation failures raise `ModelError` with the
offending field path in the message.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..geometry import rpy_to_matrix
from .types import (
    GRAVITY_DEFAULT,
    CollisionPrimitive,
    EndEffector,
    FeetGeometry,
    Joint,
    KinArrays,
    Link,
    ModelError,
    RobotModel,
)


def _vec3(raw, path):
    try:
        v = np.asarray(raw, dtype=float).reshape(3)
    except Exception:
        raise ModelError(f"{path}: expected a 3-vector, got {raw!r}") from None
    return v


def _origin(raw, path):
    raw = raw or {}
    pos = _vec3(raw.get("xyz", [0, 0, 0]), f"{path}.xyz")
    rot = rpy_to_matrix(raw.get("rpy", [0, 0, 0]))
    return pos, rot


def _parse_primitive(raw, path):
    kind = raw.get("type")
    radius = float(raw.get("radius", 0.0))
    if radius <= 0.0:
        raise ModelError(f"{path}.radius: must be > 0")
    if kind == "sphere":
        return CollisionPrimitive("sphere", radius, _vec3(raw.get("center", [0, 0, 0]), f"{path}.center"))
    if kind == "capsule":
        return CollisionPrimitive(
            "capsule", radius, _vec3(raw["p0"], f"{path}.p0"), _vec3(raw["p1"], f"{path}.p1")
        )
    raise ModelError(f"{path}.type: unknown primitive {kind!r}")


def _parse_link(raw, path):
    if "name" not in raw:
        raise ModelError(f"{path}: link without a name")
    mass = float(raw.get("mass", 0.0))
    if mass < 0.0:
        raise ModelError(f"{path}.mass: negative mass for link {raw['name']!r}")
    prims = tuple(
        _parse_primitive(p, f"{path}.collision[{i}]") for i, p in enumerate(raw.get("collision", []))
    )
    return Link(raw["name"], mass, _vec3(raw.get("com", [0, 0, 0]), f"{path}.com"), prims)


def _parse_joint(raw, path):
    for key in ("name", "parent", "child", "axis"):
        if key not in raw:
            raise ModelError(f"{path}: joint missing {key!r}")
    if raw.get("type", "revolute") != "revolute":
        raise ModelError(f"{path}.type: only revolute joints are supported")
    axis = _vec3(raw["axis"], f"{path}.axis")
    n = float(np.linalg.norm(axis))
    if n == 0.0:
        raise ModelError(f"{path}.axis: zero axis on joint {raw['name']!r}")
    pos, rot = _origin(raw.get("origin"), f"{path}.origin")
    limits = raw.get("limits", {})
    lower = float(limits.get("lower", -np.pi))
    upper = float(limits.get("upper", np.pi))
    if lower > upper:
        raise ModelError(
            f"{path}.limits: empty interval (lower > upper) on joint {raw['name']!r}"
        )
    torque = raw.get("torque", {})
    if "effort" in torque:
        t_up = abs(float(torque["effort"]))
        t_lo = -t_up
    else:
        t_lo = float(torque.get("lower", -np.inf))
        t_up = float(torque.get("upper", np.inf))
    if t_lo > t_up:
        raise ModelError(
            f"{path}.torque: empty interval (lower > upper) on joint {raw['name']!r}"
        )
    return Joint(raw["name"], raw["parent"], raw["child"], axis / n, pos, rot, lower, upper, t_lo, t_up)


def _build_arrays(links, joints, order, link_idx):
    L = len(order)
    parent = np.full(L, -1, dtype=np.int32)
    joint_col = np.full(L, -1, dtype=np.int32)
    origin_pos = np.zeros((L, 3))
    origin_rot = np.tile(np.eye(3), (L, 1, 1))
    axis = np.zeros((L, 3))
    mass = np.zeros(L)
    com = np.zeros((L, 3))
    by_child = {j.child: j for j in joints}
    for row, name in enumerate(order):
        link = links[name]
        mass[row] = link.mass
        com[row] = link.com
        if name in by_child:
            j = by_child[name]
            parent[row] = order.index(j.parent)
            joint_col[row] = joints.index(j)
            origin_pos[row] = j.origin_pos
            origin_rot[row] = j.origin_rot
            axis[row] = j.axis
    return KinArrays(parent, joint_col, origin_pos, origin_rot, axis, mass, com)


def build_model(data: dict) -> RobotModel:
    links = {}
    for i, raw in enumerate(data.get("links", [])):
        link = _parse_link(raw, f"links[{i}]")
        if link.name in links:
            raise ModelError(f"links[{i}]: duplicate link name {link.name!r}")
        links[link.name] = link
    if not links:
        raise ModelError("links: empty")

    root = data.get("root_link")
    if root not in links:
        raise ModelError(f"root_link: {root!r} is not a declared link")

    joints = []
    children = {}
    for i, raw in enumerate(data.get("joints", [])):
        j = _parse_joint(raw, f"joints[{i}]")
        for end in (j.parent, j.child):
            if end not in links:
                raise ModelError(f"joints[{i}]: references unknown link {end!r}")
        if j.child in children:
            raise ModelError(f"joints[{i}]: link {j.child!r} has two parents")
        if j.child == root:
            raise ModelError(f"joints[{i}]: root link {root!r} cannot be a joint child")
        children[j.child] = j
        joints.append(j)

    # topological order by walking from the root; anything unreached or
    # revisited means the joint graph is not a tree
    order = [root]
    frontier = [root]
    while frontier:
        parent = frontier.pop(0)
        for j in joints:
            if j.parent == parent:
                if j.child in order:
                    raise ModelError(f"joints: cycle involving link {j.child!r}")
                order.append(j.child)
                frontier.append(j.child)
    unreached = set(links) - set(order)
    if unreached:
        raise ModelError(f"links: not connected to the root: {sorted(unreached)}")

    joints_sorted = tuple(sorted(joints, key=lambda j: order.index(j.child)))

    declared_mass = data.get("total_mass")
    mass_sum = sum(l.mass for l in links.values())
    if declared_mass is not None and abs(float(declared_mass) - mass_sum) > 1e-9:
        raise ModelError(
            f"total_mass: declared {declared_mass} but link masses sum to {mass_sum}"
        )

    ees = []
    for i, raw in enumerate(data.get("end_effectors", [])):
        for key in ("name", "link"):
            if key not in raw:
                raise ModelError(f"end_effectors[{i}]: missing {key!r}")
        if raw["link"] not in links:
            raise ModelError(f"end_effectors[{i}].link: unknown link {raw['link']!r}")
        pos, rot = _origin(raw.get("origin"), f"end_effectors[{i}].origin")
        ees.append(EndEffector(raw["name"], raw["link"], pos, rot))

    feet_raw = data.get("feet", {})
    hx, hy = feet_raw.get("half_extents", [0.1, 0.06])
    mu = float(feet_raw.get("mu", 0.5))
    if mu <= 0.0:
        raise ModelError("feet.mu: must be > 0")
    feet = FeetGeometry(
        half_x=float(hx),
        half_y=float(hy),
        mu=mu,
        mu_z=float(feet_raw.get("mu_z", 0.05)),
        fz_min=float(feet_raw.get("fz_min", 0.0)),
        fz_max=feet_raw.get("fz_max"),
    )

    ordered_links = tuple(links[n] for n in order)
    kin = _build_arrays(links, list(joints_sorted), order, {n: i for i, n in enumerate(order)})
    return RobotModel(
        name=data.get("name", "robot"),
        links=ordered_links,
        joints=joints_sorted,
        root_link=root,
        end_effectors=tuple(ees),
        feet=feet,
        gravity=float(data.get("gravity", GRAVITY_DEFAULT)),
        kin=kin,
    )


def load_model(path) -> RobotModel:
    path = Path(path)
    if not path.exists():
        raise ModelError(f"model file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from None
    return build_model(data)
