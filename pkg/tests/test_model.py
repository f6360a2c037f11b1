import json
import math

import numpy as np
import pytest

import wbteleop.kern as kern
from conftest import arm2_dict, arm3_dict, random_configuration
from fd import (
    fd_com_jacobian,
    fd_contact_torque,
    fd_gravity_torque,
    fd_point_jacobian,
    rel_err,
)
from wbteleop.model import (
    Configuration,
    ModelError,
    build_model,
    com,
    com_jacobian,
    contact_torque,
    forward_kinematics,
    gravity_torque,
    load_model,
    nearest_points,
    point_jacobian,
)


@pytest.fixture(params=kern.available_backends())
def backend(request):
    prev = kern.backend_name()
    kern.set_backend(request.param)
    yield request.param
    kern.set_backend(prev)


# ---------------------------------------------------------------- loading


def test_load_reference_model(biped):
    assert biped.n_joints == 20
    assert abs(biped.total_mass - sum(l.mass for l in biped.links)) < 1e-9
    assert {ee.name for ee in biped.end_effectors} == {"l_hand", "r_hand", "l_foot", "r_foot", "head"}


def test_load_missing_file(tmp_path):
    with pytest.raises(ModelError, match="not found"):
        load_model(tmp_path / "nope.json")


def test_load_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ModelError, match="JSON"):
        load_model(p)


def test_empty_limit_interval_names_joint():
    d = arm2_dict()
    d["joints"][1]["limits"] = {"lower": 1.0, "upper": -1.0}
    with pytest.raises(ModelError, match="j2"):
        build_model(d)


def test_mass_mismatch_rejected():
    d = arm2_dict()
    d["total_mass"] = 99.0
    with pytest.raises(ModelError, match="total_mass"):
        build_model(d)


def test_cycle_rejected():
    d = arm2_dict()
    d["joints"].append(
        {
            "name": "j3",
            "parent": "link2",
            "child": "link1",
            "axis": [0, 0, 1],
        }
    )
    with pytest.raises(ModelError, match="two parents|cycle"):
        build_model(d)


def test_disconnected_link_rejected():
    d = arm2_dict()
    d["links"].append({"name": "orphan", "mass": 0.1, "com": [0, 0, 0]})
    with pytest.raises(ModelError, match="orphan"):
        build_model(d)


def test_arm3_fixture_shape(arm3):
    assert arm3.n_joints == 3
    assert arm3.root_link == "base"
    assert arm3.kin.parent[0] == -1
    assert np.all(arm3.kin.parent[1:] >= 0)


# ---------------------------------------------------------------- forward kinematics


def test_fk_zero_configuration_chains_origins(arm3, backend):
    cfg = Configuration.neutral(arm3)
    fk = forward_kinematics(arm3, cfg)
    assert np.allclose(fk.link_pose("link1")[1], [0, 0, 0])
    assert np.allclose(fk.link_pose("link2")[1], [0, 0, -0.5])
    assert np.allclose(fk.link_pose("link3")[1], [0, 0, -0.9])
    for name in arm3.link_names:
        assert np.allclose(fk.link_pose(name)[0], np.eye(3))


def test_fk_root_pose_exact(biped, backend):
    rng = np.random.default_rng(0)
    cfg = random_configuration(biped, rng)
    fk = forward_kinematics(biped, cfg)
    R, p = fk.link_pose(biped.root_link)
    assert np.array_equal(p, cfg.root_position)


def test_fk_rigid_translation_equivariance(biped, backend):
    rng = np.random.default_rng(1)
    cfg = random_configuration(biped, rng)
    d = np.array([0.3, -0.7, 1.1])
    shifted = cfg.copy()
    shifted.root_position = cfg.root_position + d
    fk0 = forward_kinematics(biped, cfg)
    fk1 = forward_kinematics(biped, shifted)
    assert np.allclose(fk1.p, fk0.p + d, atol=1e-12)
    assert np.allclose(fk1.R, fk0.R, atol=1e-15)


def test_fk_planar_two_link_trig(arm2, backend):
    cfg = Configuration.neutral(arm2)
    cfg.joint_angles = np.array([math.pi / 2, 0.0])
    fk = forward_kinematics(arm2, cfg)
    tip = fk.frame_pose("tip")[1]
    assert np.allclose(tip, [0.0, 1.0, 0.0], atol=1e-12)


# ---------------------------------------------------------------- jacobians


def test_point_jacobian_off_path_columns_zero(biped, backend):
    rng = np.random.default_rng(2)
    cfg = random_configuration(biped, rng)
    J = point_jacobian(biped, cfg, "l_forearm")
    for j, name in enumerate(biped.joint_names):
        if name.startswith("r_") or "leg" in name or name.startswith(("l_hip", "l_knee", "l_ankle", "neck")):
            assert np.allclose(J[:, 6 + j], 0.0), name


def test_point_jacobian_root_translation_identity(biped, backend):
    rng = np.random.default_rng(3)
    cfg = random_configuration(biped, rng)
    J = point_jacobian(biped, cfg, "head")
    assert np.allclose(J[0:3, 0:3], np.eye(3))
    assert np.allclose(J[3:6, 0:3], 0.0)


def test_point_jacobian_fd(biped, backend):
    rng = np.random.default_rng(4)
    for _ in range(4):
        cfg = random_configuration(biped, rng)
        for link in ("l_forearm", "r_foot", "head"):
            J = point_jacobian(biped, cfg, link, point_in_link=[0.05, 0.0, -0.1])
            Jfd = fd_point_jacobian(biped, cfg, link, point_in_link=[0.05, 0.0, -0.1])
            assert rel_err(J, Jfd) < 1e-6


def test_com_single_link():
    d = {
        "name": "one",
        "root_link": "a",
        "links": [{"name": "a", "mass": 2.0, "com": [0.1, 0.2, 0.3]}],
        "joints": [],
        "end_effectors": [],
        "feet": {"half_extents": [0.1, 0.1], "mu": 0.5, "mu_z": 0.05},
    }
    m = build_model(d)
    cfg = Configuration.neutral(m)
    cfg.root_position = np.array([1.0, 0.0, 0.0])
    assert np.allclose(com(m, cfg), [1.1, 0.2, 0.3])


def test_com_symmetric_pose_centered(biped, backend):
    cfg = Configuration.neutral(biped)
    c = com(biped, cfg)
    assert abs(c[1]) < 1e-12  # left-right symmetric mass layout


def test_com_jacobian_fd(biped, backend):
    rng = np.random.default_rng(5)
    for _ in range(4):
        cfg = random_configuration(biped, rng)
        assert rel_err(com_jacobian(biped, cfg), fd_com_jacobian(biped, cfg)) < 1e-6


# ---------------------------------------------------------------- statics


def pendulum_model(axis=(0, 1, 0)):
    return build_model(
        {
            "name": "pendulum",
            "root_link": "base",
            "links": [
                {"name": "base", "mass": 0.0, "com": [0, 0, 0]},
                {"name": "bob", "mass": 2.0, "com": [0.0, 0.0, -0.7]},
            ],
            "joints": [
                {
                    "name": "pivot",
                    "parent": "base",
                    "child": "bob",
                    "axis": list(axis),
                    "origin": {"xyz": [0, 0, 0]},
                    "limits": {"lower": -3.1, "upper": 3.1},
                    "torque": {"effort": 100},
                }
            ],
            "end_effectors": [{"name": "tip", "link": "bob", "origin": {"xyz": [0, 0, -0.7]}}],
            "feet": {"half_extents": [0.1, 0.1], "mu": 0.5, "mu_z": 0.05},
        }
    )


def test_gravity_torque_horizontal_pendulum(backend):
    m = pendulum_model()
    cfg = Configuration.neutral(m)
    cfg.joint_angles = np.array([-math.pi / 2])  # bob horizontal, +x side
    tau = gravity_torque(m, cfg)
    assert tau.shape == (1,)
    assert abs(abs(tau[0]) - 2.0 * m.gravity * 0.7) < 1e-9


def test_gravity_torque_hanging_pendulum_zero(backend):
    m = pendulum_model()
    cfg = Configuration.neutral(m)
    assert np.allclose(gravity_torque(m, cfg), 0.0, atol=1e-12)


def test_gravity_torque_linear_in_mass(biped, backend):
    rng = np.random.default_rng(6)
    cfg = random_configuration(biped, rng)
    tau = gravity_torque(biped, cfg)
    doubled = json.loads(json.dumps(json.load(open(wbt_path()))))
    for l in doubled["links"]:
        l["mass"] *= 2.0
    doubled["total_mass"] *= 2.0
    m2 = build_model(doubled)
    assert np.allclose(gravity_torque(m2, cfg), 2.0 * tau, atol=1e-9)


def wbt_path():
    import wbteleop

    return wbteleop.reference_model_path()


def test_gravity_torque_fd(biped, backend):
    rng = np.random.default_rng(7)
    for _ in range(3):
        cfg = random_configuration(biped, rng)
        assert rel_err(gravity_torque(biped, cfg), fd_gravity_torque(biped, cfg)) < 1e-5


def test_contact_torque_zero_wrench(biped, backend):
    cfg = Configuration.neutral(biped)
    tau = contact_torque(biped, cfg, {"l_foot": np.zeros(6)})
    assert np.allclose(tau, 0.0)


def test_contact_torque_linear_in_wrench(biped, backend):
    rng = np.random.default_rng(8)
    cfg = random_configuration(biped, rng)
    w1 = {"l_foot": rng.normal(size=6), "r_hand": rng.normal(size=6)}
    w2 = {"l_foot": rng.normal(size=6), "r_hand": rng.normal(size=6)}
    a, b = 2.5, -1.25
    combo = {k: a * w1[k] + b * w2[k] for k in w1}
    t = contact_torque(biped, cfg, combo)
    assert np.allclose(t, a * contact_torque(biped, cfg, w1) + b * contact_torque(biped, cfg, w2), atol=1e-12)


def test_contact_torque_unknown_frame(biped, backend):
    cfg = Configuration.neutral(biped)
    with pytest.raises(KeyError):
        contact_torque(biped, cfg, {"nonexistent": np.zeros(6)})


def test_contact_torque_virtual_work_fd(biped, backend):
    rng = np.random.default_rng(9)
    cfg = random_configuration(biped, rng)
    wrenches = {"l_foot": rng.normal(scale=50, size=6), "r_hand": rng.normal(scale=20, size=6)}
    tau = contact_torque(biped, cfg, wrenches)
    assert rel_err(tau, fd_contact_torque(biped, cfg, wrenches)) < 1e-6


# ---------------------------------------------------------------- collision


def two_sphere_model(d):
    return build_model(
        {
            "name": "spheres",
            "root_link": "a",
            "links": [
                {
                    "name": "a",
                    "mass": 1.0,
                    "com": [0, 0, 0],
                    "collision": [{"type": "sphere", "center": [0, 0, 0], "radius": 0.1}],
                },
                {
                    "name": "b",
                    "mass": 1.0,
                    "com": [0, 0, 0],
                    "collision": [{"type": "sphere", "center": [0, 0, 0], "radius": 0.1}],
                },
            ],
            "joints": [
                {
                    "name": "j",
                    "parent": "a",
                    "child": "b",
                    "axis": [0, 0, 1],
                    "origin": {"xyz": [d, 0, 0]},
                }
            ],
            "end_effectors": [],
            "feet": {"half_extents": [0.1, 0.1], "mu": 0.5, "mu_z": 0.05},
        }
    )


def test_nearest_points_spheres():
    m = two_sphere_model(0.5)
    res = nearest_points(m, Configuration.neutral(m), "a", "b")
    assert abs(res.distance - 0.3) < 1e-12
    assert res.penetration == 0.0
    assert np.allclose(res.point_a, [0.1, 0, 0])
    assert np.allclose(res.point_b, [0.4, 0, 0])


def test_nearest_points_overlap_reports_penetration():
    m = two_sphere_model(0.15)
    res = nearest_points(m, Configuration.neutral(m), "a", "b")
    assert res.distance == 0.0
    assert abs(res.penetration - 0.05) < 1e-12


def test_nearest_points_same_link_rejected(biped):
    with pytest.raises(ValueError, match="distinct"):
        nearest_points(biped, Configuration.neutral(biped), "torso", "torso")


def test_nearest_points_no_primitives(biped):
    with pytest.raises(ValueError, match="primitives"):
        nearest_points(biped, Configuration.neutral(biped), "l_anklelink", "torso")


def test_nearest_points_capsule_sphere(biped, backend):
    cfg = Configuration.neutral(biped)
    res = nearest_points(biped, cfg, "l_forearm", "torso")
    assert res.distance > 0.0


# ---------------------------------------------------------------- backend parity


def test_backends_agree(biped):
    if len(kern.available_backends()) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(10)
    cfg = random_configuration(biped, rng)
    results = {}
    for name in kern.available_backends():
        kern.set_backend(name)
        fk = forward_kinematics(biped, cfg)
        results[name] = (
            fk.p.copy(),
            point_jacobian(biped, cfg, "l_forearm").copy(),
            com_jacobian(biped, cfg).copy(),
            gravity_torque(biped, cfg).copy(),
        )
    a, b = results["python"], results["cython"]
    for xa, xb in zip(a, b):
        assert np.allclose(xa, xb, atol=1e-13)
