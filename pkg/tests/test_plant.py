import numpy as np
import pytest

import wbteleop
from wbteleop.model import Configuration, forward_kinematics
from wbteleop.plant import FEATURE_DIM, Plant, PlantConfig
from wbteleop.scenario import Scenario, build_scenario, load_scenario
from wbteleop.stance import nominal_stance


@pytest.fixture()
def standing(biped):
    return nominal_stance(biped)


def make_plant(biped, standing, scenario=None, **cfg):
    config = PlantConfig(**cfg) if cfg else PlantConfig(filter_tau=0.0)
    return Plant(biped, scenario=scenario, config=config, initial=standing)


def total_fz(plant):
    return sum(w[2] for w in plant.contact_wrenches.values())


def test_equilibrium_at_rest(biped, standing):
    plant = make_plant(biped, standing)
    Mg = biped.total_mass * biped.gravity
    for _ in range(10):
        plant.step(standing, dt=0.01)
        assert abs(total_fz(plant) - Mg) <= 1e-6 * Mg


def test_tracking_decays_monotonically(biped, standing):
    plant = make_plant(biped, standing)
    cmd = standing.copy()
    cmd.joint_angles = standing.joint_angles + 0.2
    cmd.joint_angles = np.clip(cmd.joint_angles, biped.joint_lower, biped.joint_upper)
    prev = np.inf
    for _ in range(50):
        plant.step(cmd, dt=0.01)
        err = float(np.max(np.abs(plant.joints - cmd.joint_angles)))
        assert err <= prev + 1e-15
        prev = err
    assert prev < 0.05


def test_command_outside_limits_clamped_with_warning(biped, standing):
    plant = make_plant(biped, standing)
    cmd = standing.copy()
    cmd.joint_angles = standing.joint_angles.copy()
    cmd.joint_angles[0] = biped.joint_upper[0] + 1.0
    events = plant.step(cmd, dt=0.01)
    assert any(e.kind == "clamped" for e in events)
    assert np.all(plant.joints <= biped.joint_upper + 1e-12)


def test_payload_attach_split(biped, standing):
    scenario = load_scenario(wbteleop.data_path("scenarios/heavy_lift.json"))
    # put the handles where the hands already are so the grasp succeeds
    fk = forward_kinematics(biped, standing)
    lh = fk.frame_pose("l_hand")[1]
    rh = fk.frame_pose("r_hand")[1]
    mid = 0.5 * (lh + rh)
    box = scenario.boxes[0]
    import dataclasses

    box = dataclasses.replace(
        box, position=mid.copy(), handles={"l_hand": lh.copy(), "r_hand": rh.copy()}
    )
    scenario = Scenario(name=scenario.name, boxes=(box,))
    plant = make_plant(biped, standing, scenario=scenario)
    Mg = biped.total_mass * biped.gravity
    # not grasped yet
    plant.step(standing, triggers={"l_hand": 0.0, "r_hand": 0.0}, dt=0.01)
    assert abs(total_fz(plant) - Mg) <= 1e-6 * Mg

    events = plant.step(standing, triggers={"l_hand": 0.9, "r_hand": 0.9}, dt=0.01)
    assert any(e.kind == "grasp" for e in events)
    expected = (biped.total_mass + 16.0) * biped.gravity
    assert abs(total_fz(plant) - expected) <= 1e-6 * expected
    half = 16.0 * biped.gravity / 2
    for hand in ("l_hand", "r_hand"):
        assert abs(plant.hand_loads[hand][2] + half) < 1e-9

    events = plant.step(standing, triggers={"l_hand": 0.1, "r_hand": 0.1}, dt=0.01)
    assert any(e.kind == "release" for e in events)
    assert abs(total_fz(plant) - Mg) <= 1e-6 * Mg


def test_single_support_stance_carries_all(biped, standing):
    plant = make_plant(biped, standing, transition_duration=0.0, filter_tau=0.0)
    plant.set_contact(("l_foot",))
    plant.step(standing, dt=0.01)
    plant.step(standing, dt=0.01)
    Mg = biped.total_mass * biped.gravity
    assert abs(plant.contact_wrenches["l_foot"][2] - Mg) <= 1e-5 * Mg
    assert np.allclose(plant.contact_wrenches["r_foot"], 0.0, atol=1e-9)


def test_contact_transition_blends_load(biped, standing):
    plant = make_plant(biped, standing, transition_duration=0.5, filter_tau=0.0)
    plant.step(standing, dt=0.01)
    fz_before = plant.contact_wrenches["r_foot"][2]
    assert fz_before > 50.0
    plant.set_contact(("l_foot",))
    loads = []
    for _ in range(60):
        plant.step(standing, dt=0.01)
        loads.append(plant.contact_wrenches["r_foot"][2])
    assert loads[-1] == 0.0
    # load leaves the foot without an instantaneous drop to zero
    assert loads[5] > 0.0
    Mg = biped.total_mass * biped.gravity
    assert abs(plant.contact_wrenches["l_foot"][2] - Mg) <= 1e-5 * Mg


def test_pedal_reaction(biped, standing):
    scenario = load_scenario(wbteleop.data_path("scenarios/pedal.json"))
    plant = make_plant(biped, standing, transition_duration=0.0, filter_tau=0.0)
    plant.scenario = scenario
    plant.set_contact(("r_foot",))
    # swing foot pressed to pedal height - 2 cm
    import test_footstep as tf

    pressed = tf.place_sole(biped, standing, "l", 0.26, 0.04)
    # move sole over the pedal's y
    pressed2 = pressed.copy()
    for _ in range(5):
        plant.step(pressed2, dt=0.05)
    p = forward_kinematics(biped, Configuration(plant.root_position, plant.root_quaternion, plant.joints)).frame_pose("l_foot")[1]
    if abs(p[0] - 0.26) < 0.15 and p[2] < 0.06:
        depression = min(0.06 - p[2], 0.05)
        expected = 1500.0 * depression
        assert abs(plant.sensed["l_foot"][2] - expected) < 1e-6
        total = (biped.total_mass * biped.gravity) - expected
        assert abs(plant.contact_wrenches["r_foot"][2] - total) <= 1e-5 * abs(total)
        assert plant.pedal_depression > 0.0


def test_features_shape_and_determinism(biped, standing):
    scenario = load_scenario(wbteleop.data_path("scenarios/pick_drop.json"))
    p1 = Plant(biped, scenario=scenario, config=PlantConfig(noise_force=2.0, noise_moment=0.2), seed=7, initial=standing)
    p2 = Plant(biped, scenario=scenario, config=PlantConfig(noise_force=2.0, noise_moment=0.2), seed=7, initial=standing)
    for _ in range(5):
        p1.step(standing, dt=0.01)
        p2.step(standing, dt=0.01)
    s1, s2 = p1.sense_features(), p2.sense_features()
    assert s1.shape == (FEATURE_DIM,)
    assert np.array_equal(s1, s2)
    assert np.all(np.abs(s1) <= 1.0)


def test_features_neutral_scene(biped, standing):
    plant = make_plant(biped, standing)
    plant.step(standing, dt=0.01)
    s = plant.sense_features()
    assert np.array_equal(s[0:6], np.zeros(6))  # no objects
    assert s[9] == -1.0 and s[10] == -1.0  # nothing grasped
    assert abs(s[8]) < 1e-6  # symmetric load share
    assert s[11] == -1.0  # phase 0


def test_features_reflect_grasp(biped, standing):
    scenario = load_scenario(wbteleop.data_path("scenarios/pick_drop.json"))
    fk = forward_kinematics(biped, standing)
    lh, rh = fk.frame_pose("l_hand")[1], fk.frame_pose("r_hand")[1]
    import dataclasses

    box = dataclasses.replace(
        scenario.boxes[0],
        position=0.5 * (lh + rh),
        handles={"l_hand": lh.copy(), "r_hand": rh.copy()},
    )
    plant = make_plant(biped, standing, scenario=Scenario(boxes=(box,)))
    plant.step(standing, triggers={"l_hand": 0.9, "r_hand": 0.9}, dt=0.01)
    for _ in range(30):  # let the sensor filter settle
        plant.step(standing, triggers={"l_hand": 0.9, "r_hand": 0.9}, dt=0.05)
    s = plant.sense_features()
    assert s[9] == 1.0 and s[10] == 1.0
    # each hand carries half the 0.8 kg parcel, scaled by M*g
    expected = -(0.8 * biped.gravity / 2) / (biped.total_mass * biped.gravity)
    assert s[6] < 0.8 * expected and s[7] < 0.8 * expected


def test_noise_free_bit_reproducible(biped, standing):
    runs = []
    for _ in range(2):
        plant = make_plant(biped, standing)
        stream = []
        cmd = standing.copy()
        for i in range(20):
            cmd2 = cmd.copy()
            cmd2.joint_angles = cmd.joint_angles + 0.001 * i
            cmd2.joint_angles = np.clip(cmd2.joint_angles, biped.joint_lower, biped.joint_upper)
            plant.step(cmd2, dt=0.01)
            stream.append((plant.joints.copy(), dict(plant.contact_wrenches)))
        runs.append(stream)
    for (j1, w1), (j2, w2) in zip(*runs):
        assert np.array_equal(j1, j2)
        for f in w1:
            assert np.array_equal(w1[f], w2[f])
