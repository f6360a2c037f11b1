"""Whole-body posture generation.

Solves a constrained nonlinear least-squares problem over the configuration
q = (root pose, joint angles, contact wrenches) by sequential quadratic
programming: the stacked task residual (kinematic targets, force/moment
balance, drive-torque balance, COM target) is linearized at each iterate
and a damped QP with linearized limit/collision/contact-cone rows yields
the step.

Conventions: contact wrenches are what the environment applies to the
robot, in world coordinates at the frame origin; the force balance residual
is sum(f) - M*g*z_up and moments are taken about the root link position
with gravity acting at the COM.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import apply_left_increment, rotation_log
from .model import Configuration, RobotModel, nearest_points
from .model.kinematics import (
    FK,
    com_and_jacobian,
    contact_torque,
    forward_kinematics,
    frame_jacobian,
    gravity_torque,
    point_jacobian,
)
from .qp import solve_qp

DOUBLE = "double"
SINGLE_LEFT = "single_left"
SINGLE_RIGHT = "single_right"


@dataclass(frozen=True)
class KinematicTarget:
    frame: str  # end-effector name, or a link name (e.g. the root) for orientation goals
    position: np.ndarray | None  # None -> orientation-only
    rotation: np.ndarray | None  # None -> position-only
    weight: np.ndarray  # 6-vector, (position xyz, orientation xyz)

    def __eq__(self, other):
        return (
            isinstance(other, KinematicTarget)
            and self.frame == other.frame
            and _arr_eq(self.position, other.position)
            and _arr_eq(self.rotation, other.rotation)
            and _arr_eq(self.weight, other.weight)
        )


@dataclass(frozen=True)
class WrenchTarget:
    frame: str
    value: np.ndarray  # 6-vector w_ref
    weight: np.ndarray  # per-axis weight, 6-vector

    def __eq__(self, other):
        return (
            isinstance(other, WrenchTarget)
            and self.frame == other.frame
            and _arr_eq(self.value, other.value)
            and _arr_eq(self.weight, other.weight)
        )


def _arr_eq(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(np.asarray(a), np.asarray(b))


@dataclass(frozen=True)
class ProblemSpec:
    """Task targets, weights, and the constraint set for one solve."""

    kinematic_targets: tuple = ()
    wrench_frames: tuple = ()  # frames entering the force/moment balance, owning w
    contact_frames: tuple = ()  # subset of wrench_frames under the contact cone rows
    contact_mode: str = DOUBLE
    torque_ref: np.ndarray | None = None
    torque_weight: float = 0.02
    com_target: np.ndarray | None = None
    com_weight: np.ndarray = field(default_factory=lambda: np.ones(3))
    force_weight: np.ndarray = field(default_factory=lambda: np.ones(3))
    moment_weight: np.ndarray = field(default_factory=lambda: np.ones(3))
    joint_limits: bool = True
    joint_limit_margin: float = 0.0
    torque_limits: bool = True
    torque_margin: float = 1.0
    collision_pairs: tuple = ()  # (link_a, link_b, d_margin)
    root_height_offset: float | None = None  # None disables the root-height row
    wrench_targets: tuple = ()  # WrenchTarget entries (soft equalities)
    fz_max: float | None = None  # default 2*M*g

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        for f in self.__dataclass_fields__:
            a, b = getattr(self, f), getattr(other, f)
            if isinstance(a, tuple) and isinstance(b, tuple):
                if len(a) != len(b) or any(x != y for x, y in zip(a, b)):
                    return False
            elif isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if not _arr_eq(a, b):
                    return False
            elif a != b:
                return False
        return True

    def validate(self, model: RobotModel) -> None:
        names = {ee.name for ee in model.end_effectors} | set(model.link_names)
        for t in self.kinematic_targets:
            if t.frame not in names:
                raise ValueError(f"kinematic target on unknown frame {t.frame!r}")
            if np.any(np.asarray(t.weight) < 0):
                raise ValueError(f"negative weight on kinematic target {t.frame!r}")
        ee_names = {ee.name for ee in model.end_effectors}
        for f in self.wrench_frames:
            if f not in ee_names:
                raise ValueError(f"wrench frame {f!r} is not an end effector")
        for f in self.contact_frames:
            if f not in self.wrench_frames:
                raise ValueError(f"contact frame {f!r} not in wrench task frames")
        for t in self.wrench_targets:
            if t.frame not in self.wrench_frames:
                raise ValueError(f"wrench target on frame {t.frame!r} outside wrench task")
            if np.any(np.asarray(t.weight) < 0):
                raise ValueError(f"negative weight on wrench target {t.frame!r}")
        for a, b, _ in self.collision_pairs:
            model.link_index(a)
            model.link_index(b)


@dataclass
class ResidualReport:
    kinematic: dict  # frame -> (position error [m], orientation error [rad])
    force: float
    moment: float
    torque: float
    com: float

    def to_dict(self):
        return {
            "kinematic": {k: [float(p), float(o)] for k, (p, o) in self.kinematic.items()},
            "force": float(self.force),
            "moment": float(self.moment),
            "torque": float(self.torque),
            "com": float(self.com),
        }


@dataclass
class GeneratedPose:
    configuration: Configuration
    report: ResidualReport
    slack_min: dict  # constraint group -> worst slack (>=0 means satisfied)
    iterations: int
    status: str  # "converged" | "max_iter" | "infeasible_constraints"
    blocking: list = field(default_factory=list)
    solve_time: float = 0.0


@dataclass
class SolverConfig:
    damping: float = 1e-6
    step_clamp_angle: float = 0.2  # rad, joints and root orientation
    step_clamp_pos: float = 0.1  # m, root translation
    eps_step: float = 1e-8
    eps_residual: float = 1e-10
    rel_decrease: float = 1e-2  # stop after two accepted steps gaining less than this fraction
    max_iter: int = 100
    merit_penalty: float = 1e4
    feas_tol: float = 1e-9
    polish_iter: int = 5
    backtrack_steps: int = 4


# -------------------------------------------------------------- packing


def _frame_pose(model, fk: FK, frame):
    ee_names = {ee.name for ee in model.end_effectors}
    if frame in ee_names:
        return fk.frame_pose(frame)
    return fk.link_pose(frame)


def _frame_jac(model, cfg, fk, frame):
    ee_names = {ee.name for ee in model.end_effectors}
    if frame in ee_names:
        return frame_jacobian(model, cfg, frame, fk=fk)
    return point_jacobian(model, cfg, frame, fk=fk)


def pack_wrenches(spec: ProblemSpec, cfg: Configuration) -> np.ndarray:
    return np.concatenate([cfg.wrenches.get(f, np.zeros(6)) for f in spec.wrench_frames]) if spec.wrench_frames else np.zeros(0)


def contact_cone_rows(model: RobotModel, fz_max: float):
    """The 12 affine rows keeping a local foot wrench realizable.

    Returns (A, b) with the constraint A @ w_local >= b; w_local is the
    wrench rotated into the foot frame.
    """
    ft = model.feet
    mu, muz, lx, ly = ft.mu, ft.mu_z, ft.half_x, ft.half_y
    A = np.array(
        [
            [0, 0, 1, 0, 0, 0],
            [0, 0, -1, 0, 0, 0],
            [1, 0, mu, 0, 0, 0],
            [-1, 0, mu, 0, 0, 0],
            [0, 1, mu, 0, 0, 0],
            [0, -1, mu, 0, 0, 0],
            [0, 0, ly, 1, 0, 0],
            [0, 0, ly, -1, 0, 0],
            [0, 0, lx, 0, 1, 0],
            [0, 0, lx, 0, -1, 0],
            [0, 0, muz, 0, 0, 1],
            [0, 0, muz, 0, 0, -1],
        ],
        dtype=float,
    )
    b = np.zeros(12)
    b[0] = ft.fz_min
    b[1] = -fz_max
    return A, b


def _resolve_fz_max(model, spec):
    if spec.fz_max is not None:
        return spec.fz_max
    if model.feet.fz_max is not None:
        return model.feet.fz_max
    return 2.0 * model.total_mass * model.gravity


# -------------------------------------------------------------- tasks


def _kin_error(target: KinematicTarget, R, p):
    e = np.zeros(6)
    if target.position is not None:
        e[0:3] = target.position - p
    if target.rotation is not None:
        e[3:6] = rotation_log(target.rotation @ R.T)
    return e


def evaluate_tasks(model: RobotModel, cfg: Configuration, spec: ProblemSpec, fk: FK | None = None) -> np.ndarray:
    """Weighted task residual stack, fixed block order:
    kinematic per target (6 rows each), force (3), moment (3),
    torque (N_joint), COM (3)."""
    e, _, _ = _tasks(model, cfg, spec, fk=fk, want_jacobian=False)
    return e


def _tasks(model, cfg, spec, fk=None, want_jacobian=True):
    if fk is None:
        fk = forward_kinematics(model, cfg)
    n_theta = 6 + model.n_joints
    nw = 6 * len(spec.wrench_frames)
    n = n_theta + nw
    M = model.total_mass
    g = model.gravity

    blocks = []
    jacs = [] if want_jacobian else None
    labels = []

    target_pos = {}  # frame -> target position used by the moment sum
    for t in spec.kinematic_targets:
        if t.position is not None:
            target_pos[t.frame] = np.asarray(t.position, float)

    for t in spec.kinematic_targets:
        R, p = _frame_pose(model, fk, t.frame)
        w = np.asarray(t.weight, float)
        e = w * _kin_error(t, R, p)
        blocks.append(e)
        labels.append(("kin", t.frame))
        if want_jacobian:
            Jf = _frame_jac(model, cfg, fk, t.frame)
            J = np.zeros((6, n))
            J[:, :n_theta] = -(w[:, None] * Jf)
            if t.position is None:
                J[0:3, :] = 0.0
            if t.rotation is None:
                J[3:6, :] = 0.0
            jacs.append(J)

    # force balance: sum f_m - M g z_up
    wf = np.asarray(spec.force_weight, float)
    f_sum = np.zeros(3)
    for fname in spec.wrench_frames:
        f_sum += cfg.wrenches.get(fname, np.zeros(6))[0:3]
    e_force = wf * (f_sum - np.array([0.0, 0.0, M * g]))
    blocks.append(e_force)
    labels.append(("force", ""))
    if want_jacobian:
        J = np.zeros((3, n))
        for k in range(len(spec.wrench_frames)):
            J[:, n_theta + 6 * k : n_theta + 6 * k + 3] = np.diag(wf)
        jacs.append(J)

    # moment balance about the root, gravity acting at the COM
    wm = np.asarray(spec.moment_weight, float)
    root_p = cfg.root_position
    com_p, J_com = com_and_jacobian(model, cfg, fk=fk)
    grav_force = np.array([0.0, 0.0, -M * g])
    m_sum = np.cross(com_p - root_p, grav_force)
    frame_points = {}
    for k, fname in enumerate(spec.wrench_frames):
        wvec = cfg.wrenches.get(fname, np.zeros(6))
        if fname in target_pos:
            pm = target_pos[fname]
            pm_current = False
        else:
            pm = _frame_pose(model, fk, fname)[1]
            pm_current = True
        frame_points[fname] = (pm, pm_current)
        m_sum += np.cross(pm - root_p, wvec[0:3]) + wvec[3:6]
    e_moment = wm * m_sum
    blocks.append(e_moment)
    labels.append(("moment", ""))
    if want_jacobian:
        J = np.zeros((3, n))
        J_root = np.zeros((3, n_theta))
        J_root[:, 0:3] = np.eye(3)
        # gravity lever term: d/dq cross(com - root, F_g) = -[F_g x](J_com - J_root)
        J[:, :n_theta] += -_skew(grav_force) @ (J_com - J_root)
        for k, fname in enumerate(spec.wrench_frames):
            wvec = cfg.wrenches.get(fname, np.zeros(6))
            pm, pm_current = frame_points[fname]
            if pm_current:
                Jp = _frame_jac(model, cfg, fk, fname)[0:3]
            else:
                Jp = np.zeros((3, n_theta))
            J[:, :n_theta] += -_skew(wvec[0:3]) @ (Jp - J_root)
            J[:, n_theta + 6 * k : n_theta + 6 * k + 3] = _skew(pm - root_p)
            J[:, n_theta + 6 * k + 3 : n_theta + 6 * k + 6] = np.eye(3)
        J *= wm[:, None]
        jacs.append(J)

    # drive torque balance: tau_ref - tau_grav + tau_cnt
    wt = spec.torque_weight * np.ones(model.n_joints) if np.isscalar(spec.torque_weight) else np.asarray(spec.torque_weight, float)
    tau_ref = np.zeros(model.n_joints) if spec.torque_ref is None else np.asarray(spec.torque_ref, float)
    wrench_map = {f: cfg.wrenches.get(f, np.zeros(6)) for f in spec.wrench_frames}
    tau_g = gravity_torque(model, cfg, fk=fk)
    tau_c = contact_torque(model, cfg, wrench_map, fk=fk) if wrench_map else np.zeros(model.n_joints)
    e_torque = wt * (tau_ref - tau_g + tau_c)
    blocks.append(e_torque)
    labels.append(("torque", ""))
    if want_jacobian:
        J = np.zeros((model.n_joints, n))
        J[:, :n_theta] = -_drive_torque_jac_theta(model, cfg, wrench_map, fk)
        for k, fname in enumerate(spec.wrench_frames):
            Jf = _frame_jac(model, cfg, fk, fname)
            J[:, n_theta + 6 * k : n_theta + 6 * k + 6] = Jf[:, 6:].T
        J *= wt[:, None]
        jacs.append(J)

    # COM target
    wc = np.asarray(spec.com_weight, float)
    if spec.com_target is not None:
        e_com = wc * (np.asarray(spec.com_target, float) - com_p)
    else:
        e_com = np.zeros(3)
    blocks.append(e_com)
    labels.append(("com", ""))
    if want_jacobian:
        J = np.zeros((3, n))
        if spec.com_target is not None:
            J[:, :n_theta] = -(wc[:, None] * J_com)
        jacs.append(J)

    # soft wrench equality rows: weight * (w - w_ref)
    for t in spec.wrench_targets:
        k = spec.wrench_frames.index(t.frame)
        wvec = cfg.wrenches.get(t.frame, np.zeros(6))
        tw = np.asarray(t.weight, float)
        blocks.append(tw * (wvec - np.asarray(t.value, float)))
        labels.append(("wrench_target", t.frame))
        if want_jacobian:
            J = np.zeros((6, n))
            J[:, n_theta + 6 * k : n_theta + 6 * k + 6] = np.diag(tw)
            jacs.append(J)

    e = np.concatenate(blocks)
    Jfull = np.vstack(jacs) if want_jacobian else None
    return e, Jfull, labels


def _skew(v):
    return np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]], dtype=float)


def _drive_torque_jac_theta(model, cfg, wrench_map, fk, h=1e-7):
    """d(tau_grav - tau_cnt)/d(root increments, theta) by one-sided FD."""
    n_theta = 6 + model.n_joints
    tau0 = gravity_torque(model, cfg, fk=fk) - (
        contact_torque(model, cfg, wrench_map, fk=fk) if wrench_map else 0.0
    )
    J = np.zeros((model.n_joints, n_theta))
    for c in range(3, n_theta):  # root translation leaves statics torques unchanged
        pert = cfg.copy()
        if c < 6:
            phi = np.zeros(3)
            phi[c - 3] = h
            pert.root_quaternion = apply_left_increment(pert.root_quaternion, phi)
        else:
            pert.joint_angles[c - 6] += h
        fkp = forward_kinematics(model, pert)
        taup = gravity_torque(model, pert, fk=fkp) - (
            contact_torque(model, pert, wrench_map, fk=fkp) if wrench_map else 0.0
        )
        J[:, c] = (taup - tau0) / h
    return J


# -------------------------------------------------------------- constraints


def evaluate_constraints(model: RobotModel, cfg: Configuration, spec: ProblemSpec, fk: FK | None = None):
    """Returns (equality residuals, inequality slack dict).

    Slack >= 0 iff the row is satisfied. Groups: joint_limits,
    torque_limits, collision, root_height, contact:<frame>.
    """
    if fk is None:
        fk = forward_kinematics(model, cfg)
    slacks = {}
    if spec.joint_limits:
        lo = model.joint_lower + spec.joint_limit_margin
        hi = model.joint_upper - spec.joint_limit_margin
        slacks["joint_limits"] = np.concatenate([cfg.joint_angles - lo, hi - cfg.joint_angles])
    if spec.torque_limits:
        wrench_map = {f: cfg.wrenches.get(f, np.zeros(6)) for f in spec.wrench_frames}
        tau = gravity_torque(model, cfg, fk=fk) - (
            contact_torque(model, cfg, wrench_map, fk=fk) if wrench_map else 0.0
        )
        lo = model.torque_lower * spec.torque_margin
        hi = model.torque_upper * spec.torque_margin
        slacks["torque_limits"] = np.concatenate([tau - lo, hi - tau])
    if spec.collision_pairs:
        vals = []
        for a, b, margin in spec.collision_pairs:
            res = nearest_points(model, cfg, a, b, fk=fk)
            vals.append(res.signed_distance - margin)
        slacks["collision"] = np.array(vals)
    if spec.root_height_offset is not None:
        z_hands = [_frame_pose(model, fk, f)[1][2] for f in ("l_hand", "r_hand")]
        slacks["root_height"] = np.array(
            [min(z_hands) - cfg.root_position[2] - spec.root_height_offset]
        )
    if spec.contact_frames:
        A, b = contact_cone_rows(model, _resolve_fz_max(model, spec))
        for f in spec.contact_frames:
            R, _ = _frame_pose(model, fk, f)
            w = cfg.wrenches.get(f, np.zeros(6))
            w_local = np.concatenate([R.T @ w[0:3], R.T @ w[3:6]])
            slacks[f"contact:{f}"] = A @ w_local - b

    eq = []
    for t in spec.wrench_targets:
        w = cfg.wrenches.get(t.frame, np.zeros(6))
        eq.append(np.asarray(t.weight, float) * (w - np.asarray(t.value, float)))
    eq_resid = np.concatenate(eq) if eq else np.zeros(0)
    return eq_resid, slacks


def _constraint_rows(model, cfg, spec, fk, cfg_backoff=0.0):
    """Linearized inequality rows C dq >= d at the current iterate."""
    n_theta = 6 + model.n_joints
    nw = 6 * len(spec.wrench_frames)
    n = n_theta + nw
    C_rows, d_rows, labels = [], [], []

    if spec.joint_limits:
        lo = model.joint_lower + spec.joint_limit_margin
        hi = model.joint_upper - spec.joint_limit_margin
        I = np.zeros((model.n_joints, n))
        I[:, 6:n_theta] = np.eye(model.n_joints)
        C_rows += [I, -I]
        d_rows += [lo - cfg.joint_angles, cfg.joint_angles - hi]
        labels += [f"joint_lower:{j}" for j in model.joint_names]
        labels += [f"joint_upper:{j}" for j in model.joint_names]

    if spec.torque_limits:
        wrench_map = {f: cfg.wrenches.get(f, np.zeros(6)) for f in spec.wrench_frames}
        tau = gravity_torque(model, cfg, fk=fk) - (
            contact_torque(model, cfg, wrench_map, fk=fk) if wrench_map else 0.0
        )
        Jt = np.zeros((model.n_joints, n))
        Jt[:, :n_theta] = _drive_torque_jac_theta(model, cfg, wrench_map, fk)
        for k, fname in enumerate(spec.wrench_frames):
            Jf = _frame_jac(model, cfg, fk, fname)
            Jt[:, n_theta + 6 * k : n_theta + 6 * k + 6] = -Jf[:, 6:].T
        lo = model.torque_lower * spec.torque_margin + cfg_backoff
        hi = model.torque_upper * spec.torque_margin - cfg_backoff
        C_rows += [Jt, -Jt]
        d_rows += [lo - tau, tau - hi]
        labels += [f"torque_lower:{j}" for j in model.joint_names]
        labels += [f"torque_upper:{j}" for j in model.joint_names]

    for a, b, margin in spec.collision_pairs:
        res = nearest_points(model, cfg, a, b, fk=fk)
        direction = res.core_b - res.core_a  # stays nonzero under penetration
        norm = float(np.linalg.norm(direction))
        dhat = direction / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
        core_gap = res.signed_distance
        ia, ib = model.link_index(a), model.link_index(b)
        pa_local = fk.R[ia].T @ (res.core_a - fk.p[ia])
        pb_local = fk.R[ib].T @ (res.core_b - fk.p[ib])
        Ja = point_jacobian(model, cfg, a, pa_local, fk=fk)[0:3]
        Jb = point_jacobian(model, cfg, b, pb_local, fk=fk)[0:3]
        row = np.zeros(n)
        row[:n_theta] = dhat @ (Jb - Ja)
        C_rows.append(row[None, :])
        d_rows.append(np.array([margin - core_gap]))
        labels.append(f"collision:{a}~{b}")

    if spec.root_height_offset is not None:
        hands = []
        for f in ("l_hand", "r_hand"):
            _, p = _frame_pose(model, fk, f)
            hands.append((p[2], f))
        z_low, f_low = min(hands)
        Jh = _frame_jac(model, cfg, fk, f_low)[2]
        row = np.zeros(n)
        row[:n_theta] = Jh
        row[2] -= 1.0  # d(z_root)/d(root z)
        slack = z_low - cfg.root_position[2] - spec.root_height_offset
        C_rows.append(row[None, :])
        d_rows.append(np.array([-slack]))
        labels.append("root_height")

    if spec.contact_frames:
        A, b = contact_cone_rows(model, _resolve_fz_max(model, spec))
        for f in spec.contact_frames:
            R, _ = _frame_pose(model, fk, f)
            Rblk = np.zeros((6, 6))
            Rblk[0:3, 0:3] = R.T
            Rblk[3:6, 3:6] = R.T
            k = spec.wrench_frames.index(f)
            w = cfg.wrenches.get(f, np.zeros(6))
            rows = np.zeros((12, n))
            rows[:, n_theta + 6 * k : n_theta + 6 * k + 6] = A @ Rblk
            C_rows.append(rows)
            d_rows.append(b - A @ (Rblk @ w))
            labels += [f"contact:{f}:{i}" for i in range(12)]

    if not C_rows:
        return np.zeros((0, n)), np.zeros(0), []
    return np.vstack(C_rows), np.concatenate(d_rows), labels


# -------------------------------------------------------------- reports


def _build_report(model, cfg, spec, fk):
    kin = {}
    for t in spec.kinematic_targets:
        R, p = _frame_pose(model, fk, t.frame)
        pos_err = float(np.linalg.norm(t.position - p)) if t.position is not None else 0.0
        ori_err = (
            float(np.linalg.norm(rotation_log(t.rotation @ R.T))) if t.rotation is not None else 0.0
        )
        kin[t.frame] = (pos_err, ori_err)
    M, g = model.total_mass, model.gravity
    f_sum = np.zeros(3)
    for fname in spec.wrench_frames:
        f_sum += cfg.wrenches.get(fname, np.zeros(6))[0:3]
    force = float(np.linalg.norm(f_sum - np.array([0, 0, M * g])))
    com_p, _ = com_and_jacobian(model, cfg, fk=fk)
    m_sum = np.cross(com_p - cfg.root_position, np.array([0, 0, -M * g]))
    target_pos = {t.frame: t.position for t in spec.kinematic_targets if t.position is not None}
    for fname in spec.wrench_frames:
        w = cfg.wrenches.get(fname, np.zeros(6))
        pm = target_pos.get(fname)
        if pm is None:
            pm = _frame_pose(model, fk, fname)[1]
        m_sum += np.cross(pm - cfg.root_position, w[0:3]) + w[3:6]
    moment = float(np.linalg.norm(m_sum))
    wrench_map = {f: cfg.wrenches.get(f, np.zeros(6)) for f in spec.wrench_frames}
    tau_ref = np.zeros(model.n_joints) if spec.torque_ref is None else np.asarray(spec.torque_ref)
    tau = tau_ref - gravity_torque(model, cfg, fk=fk)
    if wrench_map:
        tau = tau + contact_torque(model, cfg, wrench_map, fk=fk)
    torque = float(np.linalg.norm(tau))
    com_err = (
        float(np.linalg.norm(np.asarray(spec.com_target) - com_p)) if spec.com_target is not None else 0.0
    )
    return ResidualReport(kin, force, moment, torque, com_err), com_p


def _merit(model, cfg, spec, fk, penalty):
    e = evaluate_tasks(model, cfg, spec, fk=fk)
    _, slacks = evaluate_constraints(model, cfg, spec, fk=fk)
    viol = 0.0
    for v in slacks.values():
        viol += float(np.sum(np.minimum(v, 0.0) ** 2))
    return 0.5 * float(e @ e) + penalty * viol


def _hard_violation(slacks, exclude=("root_height",)):
    """Worst violation over the hard constraint groups (root height is a
    soft preference, relaxed rather than enforced)."""
    worst = 0.0
    for k, v in slacks.items():
        if k in exclude or not v.size:
            continue
        worst = max(worst, float(-np.min(v)))
    return worst


# -------------------------------------------------------------- solver


class PostureSolver:
    """SQP solver instance; single-threaded per solve, reusable."""

    def __init__(self, model: RobotModel, config: SolverConfig | None = None):
        self.model = model
        self.config = config or SolverConfig()

    def solve(self, q0: Configuration, spec: ProblemSpec) -> GeneratedPose:
        t_start = time.perf_counter()
        model, cf = self.model, self.config
        spec.validate(model)
        q0.validate(model)
        cfg = q0.copy()
        # every wrench-task frame owns decision variables
        for f in spec.wrench_frames:
            cfg.wrenches.setdefault(f, np.zeros(6))
        cfg.wrenches = {f: cfg.wrenches[f] for f in spec.wrench_frames}

        n_theta = 6 + model.n_joints
        infeasible_rows: list = []
        status = "max_iter"
        best_cfg, best_merit = None, np.inf

        fk = forward_kinematics(model, cfg)
        merit = _merit(model, cfg, spec, fk, cf.merit_penalty)
        best_cfg, best_merit = cfg.copy(), merit

        small_steps = 0
        iterations = 0
        for it in range(cf.max_iter):
            iterations = it + 1
            e, J, _ = _tasks(model, cfg, spec, fk=fk)
            C, d, labels = _constraint_rows(model, cfg, spec, fk)
            H = J.T @ J
            lam = cf.damping * max(np.trace(H) / H.shape[0], 1e-12)
            H = H + lam * np.eye(H.shape[0])
            g = J.T @ e
            res = solve_qp(H, g, C, d)
            if res.status == "infeasible":
                # relax the soft root-height row and retry once
                relaxed = replace(spec, root_height_offset=None)
                if spec.root_height_offset is not None:
                    C2, d2, labels2 = _constraint_rows(model, cfg, relaxed, fk)
                    res = solve_qp(H, g, C2, d2)
                    labels = labels2
                if res.status == "infeasible":
                    infeasible_rows = [labels[i] for i in res.blocking if 0 <= i < len(labels)]
                    status = "infeasible_constraints"
                    break
            dq = res.x
            # trust-region style uniform scaling to the per-iteration caps
            ang = float(np.max(np.abs(dq[3:n_theta]))) if n_theta > 3 else 0.0
            pos = float(np.max(np.abs(dq[0:3])))
            alpha_cap = 1.0
            if ang > cf.step_clamp_angle:
                alpha_cap = min(alpha_cap, cf.step_clamp_angle / ang)
            if pos > cf.step_clamp_pos:
                alpha_cap = min(alpha_cap, cf.step_clamp_pos / pos)

            step_norm = float(np.linalg.norm(dq, ord=np.inf))
            if step_norm < cf.eps_step:
                status = "converged"
                break

            accepted = False
            alpha = alpha_cap
            merit_before = merit
            for _ in range(cf.backtrack_steps):
                trial = self._apply_step(cfg, spec, dq, alpha)
                fk_trial = forward_kinematics(model, trial)
                m_trial = _merit(model, trial, spec, fk_trial, cf.merit_penalty)
                if m_trial < merit:
                    cfg, fk, merit = trial, fk_trial, m_trial
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                status = "converged"
                break
            if merit < best_merit:
                best_cfg, best_merit = cfg.copy(), merit
            if alpha * step_norm < cf.eps_step:
                status = "converged"
                break
            decrease = merit_before - merit
            if decrease < cf.eps_residual + cf.rel_decrease * merit:
                small_steps += 1
                if small_steps >= 2:
                    status = "converged"
                    break
            else:
                small_steps = 0

        cfg = best_cfg if best_merit < merit else cfg
        fk = forward_kinematics(model, cfg)

        # polish: nonlinear rows (torque, collision, contact under rotated
        # feet) can drift a hair across the last linearization; take small
        # feasibility-restoring steps until hard rows hold
        if status != "infeasible_constraints":
            for _ in range(cf.polish_iter):
                _, slacks = evaluate_constraints(model, cfg, spec, fk=fk)
                if _hard_violation(slacks) <= cf.feas_tol:
                    break
                e, J, _ = _tasks(model, cfg, spec, fk=fk)
                C, d, labels = _constraint_rows(model, cfg, spec, fk, cfg_backoff=1e-9)
                H = J.T @ J + 1e-8 * np.eye(J.shape[1])
                res = solve_qp(H, J.T @ e, C, d)
                if res.status != "optimal":
                    break
                cfg = self._apply_step(cfg, spec, res.x, 1.0)
                fk = forward_kinematics(model, cfg)

        cfg.joint_angles = np.clip(cfg.joint_angles, model.joint_lower, model.joint_upper)
        report, _ = _build_report(model, cfg, spec, fk)
        _, slacks = evaluate_constraints(model, cfg, spec, fk=fk)
        slack_min = {k: float(np.min(v)) for k, v in slacks.items() if v.size}
        if status == "max_iter" and _hard_violation(slacks) <= cf.feas_tol:
            pass  # ran out of iterations but feasible; keep max_iter status
        if status == "converged" and _hard_violation(slacks) > cf.feas_tol:
            status = "max_iter"
        return GeneratedPose(
            configuration=cfg,
            report=report,
            slack_min=slack_min,
            iterations=iterations,
            status=status,
            blocking=infeasible_rows,
            solve_time=time.perf_counter() - t_start,
        )

    def _apply_step(self, cfg: Configuration, spec: ProblemSpec, dq, alpha):
        model = self.model
        n_theta = 6 + model.n_joints
        out = cfg.copy()
        step = alpha * dq
        out.root_position = cfg.root_position + step[0:3]
        out.root_quaternion = apply_left_increment(cfg.root_quaternion, step[3:6])
        out.joint_angles = np.clip(
            cfg.joint_angles + step[6:n_theta], model.joint_lower, model.joint_upper
        )
        for k, f in enumerate(spec.wrench_frames):
            out.wrenches[f] = cfg.wrenches.get(f, np.zeros(6)) + step[
                n_theta + 6 * k : n_theta + 6 * k + 6
            ]
        return out


# -------------------------------------------------------------- contact modes


def set_contact_mode(
    spec: ProblemSpec, mode: str, swing_target=None, swing_weight=None
) -> ProblemSpec:
    """Switch the stance set between double and single support.

    The swing foot leaves the contact cone rows and the force/moment sums,
    and becomes a kinematic target (pose given by `swing_target=(R, p)`;
    required when the foot had no kinematic target yet).
    """
    if mode not in (DOUBLE, SINGLE_LEFT, SINGLE_RIGHT):
        raise ValueError(f"unknown contact mode {mode!r}")
    if mode == spec.contact_mode:
        return spec
    stance = {
        DOUBLE: ("l_foot", "r_foot"),
        SINGLE_LEFT: ("l_foot",),
        SINGLE_RIGHT: ("r_foot",),
    }[mode]
    feet = ("l_foot", "r_foot")
    swing = tuple(f for f in feet if f not in stance)

    non_feet = tuple(f for f in spec.wrench_frames if f not in feet)
    wrench_frames = stance + non_feet
    contact_frames = tuple(f for f in spec.contact_frames if f not in feet) + stance

    targets = list(spec.kinematic_targets)
    have = {t.frame for t in targets}
    for f in swing:
        if f not in have:
            if swing_target is None:
                raise ValueError(f"swing foot {f} needs a kinematic target pose")
            R, p = swing_target
            w = np.full(6, 10.0) if swing_weight is None else np.asarray(swing_weight, float)
            targets.append(KinematicTarget(f, np.asarray(p, float), np.asarray(R, float), w))
    wrench_targets = tuple(t for t in spec.wrench_targets if t.frame in wrench_frames)
    return replace(
        spec,
        contact_mode=mode,
        wrench_frames=wrench_frames,
        contact_frames=tuple(f for f in contact_frames if f in wrench_frames),
        kinematic_targets=tuple(targets),
        wrench_targets=wrench_targets,
    )
