import numpy as np
import pytest

import wbteleop
from wbteleop.model import Configuration, build_model, load_model


@pytest.fixture(scope="session")
def biped():
    return load_model(wbteleop.reference_model_path())


def arm2_dict():
    # planar 2-link arm in the xy plane, both links 0.5 m, joints about z
    return {
        "name": "arm2",
        "root_link": "base",
        "links": [
            {"name": "base", "mass": 1.0, "com": [0, 0, 0]},
            {"name": "link1", "mass": 1.0, "com": [0.25, 0, 0]},
            {"name": "link2", "mass": 1.0, "com": [0.25, 0, 0]},
        ],
        "joints": [
            {
                "name": "j1",
                "parent": "base",
                "child": "link1",
                "axis": [0, 0, 1],
                "origin": {"xyz": [0, 0, 0]},
                "limits": {"lower": -3.14, "upper": 3.14},
                "torque": {"effort": 50},
            },
            {
                "name": "j2",
                "parent": "link1",
                "child": "link2",
                "axis": [0, 0, 1],
                "origin": {"xyz": [0.5, 0, 0]},
                "limits": {"lower": -3.14, "upper": 3.14},
                "torque": {"effort": 50},
            },
        ],
        "end_effectors": [{"name": "tip", "link": "link2", "origin": {"xyz": [0.5, 0, 0]}}],
        "feet": {"half_extents": [0.05, 0.05], "mu": 0.5, "mu_z": 0.05},
    }


def arm3_dict():
    # 3-link planar arm hanging in the xz plane, joints about y
    d = {
        "name": "arm3",
        "root_link": "base",
        "links": [
            {"name": "base", "mass": 0.5, "com": [0, 0, 0]},
            {"name": "link1", "mass": 1.0, "com": [0, 0, -0.25]},
            {"name": "link2", "mass": 0.8, "com": [0, 0, -0.2]},
            {"name": "link3", "mass": 0.6, "com": [0, 0, -0.15]},
        ],
        "joints": [],
        "end_effectors": [{"name": "tip", "link": "link3", "origin": {"xyz": [0, 0, -0.3]}}],
        "feet": {"half_extents": [0.05, 0.05], "mu": 0.5, "mu_z": 0.05},
    }
    lengths = {"link1": 0.0, "link2": -0.5, "link3": -0.4}
    parents = {"link1": "base", "link2": "link1", "link3": "link2"}
    for i, child in enumerate(["link1", "link2", "link3"]):
        d["joints"].append(
            {
                "name": f"j{i + 1}",
                "parent": parents[child],
                "child": child,
                "axis": [0, 1, 0],
                "origin": {"xyz": [0, 0, lengths[child]]},
                "limits": {"lower": -2.8, "upper": 2.8},
                "torque": {"effort": 80},
            }
        )
    return d


@pytest.fixture(scope="session")
def arm2():
    return build_model(arm2_dict())


@pytest.fixture(scope="session")
def arm3():
    return build_model(arm3_dict())


def random_configuration(model, rng, wrench_frames=(), scale=0.5):
    lo, hi = model.joint_lower, model.joint_upper
    mid = 0.5 * (lo + hi)
    span = hi - lo
    theta = mid + (rng.uniform(-0.5, 0.5, model.n_joints) * span * scale)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    wrenches = {f: rng.normal(scale=30.0, size=6) for f in wrench_frames}
    return Configuration(
        root_position=rng.normal(scale=0.3, size=3),
        root_quaternion=q,
        joint_angles=theta,
        wrenches=wrenches,
    )
