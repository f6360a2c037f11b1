import time

import numpy as np
import pytest

from conftest import random_configuration
from wbteleop.model import forward_kinematics
from wbteleop.stance import nominal_stance
from wbteleop.upperbody import RefinerConfig, UpperBodySelection, default_selection, refine


def hand_poses(model, cfg):
    fk = forward_kinematics(model, cfg)
    return {f: fk.frame_pose(f) for f in ("l_hand", "r_hand")}


def test_default_selection_excludes_legs_and_root(biped):
    sel = default_selection(biped)
    names = [biped.joint_names[i] for i in sel.joints]
    assert all(("shoulder" in n) or ("elbow" in n) or n.startswith("waist") for n in names)
    excluded_names = [biped.joint_names[i] for i in sel.excluded]
    for n in excluded_names:
        assert not (("shoulder" in n) or ("elbow" in n) or n.startswith("waist"))
    assert set(sel.joints) | set(sel.excluded) == set(range(biped.n_joints))


def test_selection_overlap_rejected(biped):
    with pytest.raises(ValueError, match="overlap"):
        UpperBodySelection((0, 1), (1, 2)).validate(biped)


def test_refine_fixed_point_exact(biped):
    cfg = nominal_stance(biped)
    targets = {f: (R.copy(), p.copy()) for f, (R, p) in hand_poses(biped, cfg).items()}
    out = refine(biped, cfg, targets)
    assert np.array_equal(out.joint_angles, cfg.joint_angles)
    assert np.array_equal(out.root_position, cfg.root_position)
    assert np.array_equal(out.root_quaternion, cfg.root_quaternion)


def test_refine_reaches_2cm_offset(biped):
    # position-only targets: two full 6-DOF hand poses overdetermine the
    # 7 upper-body joints, so the reachability contract is positional
    cfg = nominal_stance(biped)
    targets = {}
    for f, (R, p) in hand_poses(biped, cfg).items():
        targets[f] = p + np.array([0.015, 0.0, 0.012])  # |d| ~ 2 cm
    out = refine(biped, cfg, targets)
    fk = forward_kinematics(biped, out)
    for f, p_t in targets.items():
        err = np.linalg.norm(fk.frame_pose(f)[1] - p_t)
        assert err < 1e-3, (f, err)
    sel = default_selection(biped)
    legs = list(sel.excluded)
    assert np.array_equal(out.joint_angles[legs], cfg.joint_angles[legs])


def test_refine_unreachable_stays_within_limits_and_cap(biped):
    cfg = nominal_stance(biped)
    targets = {f: (R.copy(), p + np.array([2.0, 0.0, 1.0])) for f, (R, p) in hand_poses(biped, cfg).items()}
    out = refine(biped, cfg, targets)
    sel = default_selection(biped)
    legs = list(sel.excluded)
    assert np.array_equal(out.joint_angles[legs], cfg.joint_angles[legs])
    assert np.all(out.joint_angles >= biped.joint_lower - 1e-15)
    assert np.all(out.joint_angles <= biped.joint_upper + 1e-15)
    delta = np.abs(out.joint_angles - cfg.joint_angles)
    assert np.max(delta) <= 0.1 + 1e-12


def test_refine_excluded_bits_over_random_inputs(biped):
    rng = np.random.default_rng(11)
    sel = default_selection(biped)
    legs = list(sel.excluded)
    for _ in range(50):
        cfg = random_configuration(biped, rng, scale=0.3)
        targets = {
            "l_hand": rng.normal(scale=0.5, size=3),
            "r_hand": (np.eye(3), rng.normal(scale=0.5, size=3)),
        }
        out = refine(biped, cfg, targets)
        assert np.array_equal(out.joint_angles[legs], cfg.joint_angles[legs])
        assert np.array_equal(out.root_position, cfg.root_position)
        assert np.array_equal(out.root_quaternion, cfg.root_quaternion)
        assert np.max(np.abs(out.joint_angles - cfg.joint_angles)) <= 0.1 + 1e-12


def test_refine_budget(biped):
    cfg = nominal_stance(biped)
    targets = {f: (R.copy(), p + np.array([0.02, 0.01, 0.02])) for f, (R, p) in hand_poses(biped, cfg).items()}
    refine(biped, cfg, targets)  # warm caches
    t0 = time.perf_counter()
    n = 20
    for _ in range(n):
        refine(biped, cfg, targets)
    per_call = (time.perf_counter() - t0) / n
    assert per_call < 0.033, f"refine took {per_call * 1e3:.1f} ms"


def test_refine_empty_targets_copies(biped):
    cfg = nominal_stance(biped)
    out = refine(biped, cfg, {})
    assert np.array_equal(out.joint_angles, cfg.joint_angles)
    assert out is not cfg
