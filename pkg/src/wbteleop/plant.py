"""Simulated robot plant.

Stands in for the on-robot balance controller and hardware: tracks
commanded joint angles with a first-order lag, synthesizes foot/hand wrench
"sensor" readings from statics (the same cone-constrained distribution the
posture optimizer assumes), hosts scenario objects, and produces the
low-dimensional sensory feature vector consumed by the imitation learner.

Contact-mode switches ramp the departing foot's load out over a cubic
blend so wrench readings stay smooth across transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import apply_left_increment, quat_to_matrix, rotation_log
from .model import Configuration, RobotModel, forward_kinematics
from .posture import contact_cone_rows
from .qp import solve_qp
from .scenario import Scenario

FEATURE_DIM = 12


@dataclass
class PlantConfig:
    track_time: float = 0.1  # s, first-order joint tracking constant
    filter_tau: float = 0.2  # s, force-sensor low-pass
    noise_force: float = 0.0  # N std-dev on sensed forces (0 = off)
    noise_moment: float = 0.0  # N*m
    transition_duration: float = 1.5  # s, contact-switch load blend
    position_scale: float = 1.0  # m, feature normalization
    lift_scale: float = 0.3  # m of box lift mapping to full phase


@dataclass
class PlantEvent:
    kind: str  # clamped | grasp | release | pedal_contact
    data: object = None


@dataclass
class PlantState:
    """Immutable-by-convention snapshot of the simulated robot."""

    t: float
    joints: np.ndarray
    root_position: np.ndarray
    root_quaternion: np.ndarray
    contact_wrenches: dict  # frame -> 6-vector, statics solution (noise-free)
    sensed_wrenches: dict  # frame -> 6-vector, filtered + noise
    hand_loads: dict  # frame -> 6-vector external load on the hand
    attached: dict  # box name -> bool
    box_positions: dict  # box name -> 3-vector
    pedal_depression: float
    stance: tuple
    phase: float  # scenario progress in [0, 1]


class Plant:
    def __init__(
        self,
        model: RobotModel,
        scenario: Scenario | None = None,
        config: PlantConfig | None = None,
        seed: int = 0,
        initial: Configuration | None = None,
    ):
        self.model = model
        self.scenario = scenario or Scenario()
        self.config = config or PlantConfig()
        self.rng = np.random.default_rng(seed)
        cfg = initial if initial is not None else Configuration.neutral(model)
        self.t = 0.0
        self.joints = cfg.joint_angles.copy()
        self.root_position = cfg.root_position.copy()
        self.root_quaternion = cfg.root_quaternion.copy()
        self.stance = tuple(ee.name for ee in model.end_effectors if ee.name.endswith("_foot"))
        self._prev_stance = self.stance
        self._transition_t0 = -np.inf
        self._leaving: tuple = ()
        self.attached = {b.name: False for b in self.scenario.boxes}
        self.box_positions = {b.name: b.position.copy() for b in self.scenario.boxes}
        self._grasp_offsets = {}
        self.pedal_depression = 0.0
        self.contact_wrenches = {f: np.zeros(6) for f in self.stance}
        self.sensed = {}
        self.hand_loads = {}
        self._solve_contact(forward_kinematics(model, self._cfg()))
        for f, w in self.contact_wrenches.items():
            self.sensed[f] = w.copy()

    # ------------------------------------------------------------- helpers

    def _cfg(self) -> Configuration:
        return Configuration(
            root_position=self.root_position,
            root_quaternion=self.root_quaternion,
            joint_angles=self.joints,
        )

    def set_contact(self, stance: tuple) -> None:
        """Contact-mode switch from the footstep machine."""
        if tuple(stance) == self.stance:
            return
        self._leaving = tuple(f for f in self.stance if f not in stance)
        self._prev_stance = self.stance
        self.stance = tuple(stance)
        self._transition_t0 = self.t

    def _blend(self) -> float:
        """Cubic 0->1 progress of the current contact transition."""
        T = self.config.transition_duration
        s = (self.t - self._transition_t0) / T if T > 0 else 1.0
        s = min(max(s, 0.0), 1.0)
        return 3 * s * s - 2 * s * s * s

    # ---------------------------------------------------------------- step

    def step(self, command: Configuration, triggers: dict | None = None, dt: float = 0.01):
        """Advance the simulation by dt toward the commanded pose."""
        events = []
        triggers = triggers or {}
        cmd = command.joint_angles
        clamped = np.clip(cmd, self.model.joint_lower, self.model.joint_upper)
        if not np.array_equal(clamped, cmd):
            events.append(PlantEvent("clamped", [
                self.model.joint_names[i] for i in np.nonzero(clamped != cmd)[0]
            ]))
        a = min(1.0, dt / self.config.track_time) if self.config.track_time > 0 else 1.0
        self.joints = self.joints + (clamped - self.joints) * a
        self.root_position = self.root_position + (command.root_position - self.root_position) * a
        dphi = rotation_log(
            quat_to_matrix(command.root_quaternion) @ quat_to_matrix(self.root_quaternion).T
        )
        self.root_quaternion = apply_left_increment(self.root_quaternion, a * dphi)
        self.t += dt

        fk = forward_kinematics(self.model, self._cfg())
        events += self._update_objects(fk, triggers)
        self._update_pedal(fk, events)
        self._solve_contact(fk)
        self._update_sensors(dt)
        return events

    def _update_objects(self, fk, triggers):
        events = []
        for box in self.scenario.boxes:
            hands = list(box.handles)
            if not self.attached[box.name]:
                near = all(
                    float(np.linalg.norm(fk.frame_pose(h)[1] - self._handle_pos(box, h))) <= box.grasp_radius
                    for h in hands
                )
                pulled = all(triggers.get(h, 0.0) > box.trigger_threshold for h in hands)
                if near and pulled:
                    self.attached[box.name] = True
                    mid = np.mean([fk.frame_pose(h)[1] for h in hands], axis=0)
                    self._grasp_offsets[box.name] = self.box_positions[box.name] - mid
                    events.append(PlantEvent("grasp", box.name))
            else:
                released = any(triggers.get(h, 1.0) < box.release_threshold for h in hands)
                if released:
                    self.attached[box.name] = False
                    events.append(PlantEvent("release", box.name))
                else:
                    mid = np.mean([fk.frame_pose(h)[1] for h in hands], axis=0)
                    self.box_positions[box.name] = mid + self._grasp_offsets[box.name]
        # hand loads: attached boxes pull straight down, split across handles
        self.hand_loads = {}
        g = self.model.gravity
        for box in self.scenario.boxes:
            if self.attached[box.name]:
                share = box.mass * g / len(box.handles)
                for h in box.handles:
                    w = self.hand_loads.setdefault(h, np.zeros(6))
                    w[2] -= share
        return events

    def _handle_pos(self, box, hand):
        offset = box.handles[hand] - box.position
        return self.box_positions[box.name] + offset

    def _update_pedal(self, fk, events):
        pedal = self.scenario.pedal
        prev = self.pedal_depression
        self.pedal_depression = 0.0
        self._pedal_wrench = {}
        if pedal is None:
            return
        for foot in ("l_foot", "r_foot"):
            if foot in self.stance:
                continue
            p = fk.frame_pose(foot)[1]
            horiz = float(np.linalg.norm(p[0:2] - pedal.position[0:2]))
            if horiz <= pedal.radius and p[2] < pedal.position[2]:
                depression = min(pedal.position[2] - p[2], pedal.travel)
                self.pedal_depression = depression
                self._pedal_wrench[foot] = np.array(
                    [0, 0, pedal.spring_k * depression, 0, 0, 0]
                )
                if prev == 0.0 and depression > 0.0:
                    events.append(PlantEvent("pedal_contact", foot))

    def _external_wrenches(self):
        out = {f: w.copy() for f, w in self.hand_loads.items()}
        for f, w in getattr(self, "_pedal_wrench", {}).items():
            out[f] = out.get(f, np.zeros(6)) + w
        return out

    def _solve_contact(self, fk):
        """Distribute the supported load over the stance feet: least-squares
        force/moment balance subject to the contact cone, same structure the
        posture optimizer enforces."""
        model = self.model
        M, g = model.total_mass, model.gravity
        ext = self._external_wrenches()
        root = self.root_position
        b_force = np.array([0.0, 0.0, M * g])
        b_moment = np.cross(com_of(model, fk) - root, np.array([0.0, 0.0, M * g]))
        for f, w in ext.items():
            p = fk.frame_pose(f)[1]
            b_force -= w[0:3]
            b_moment -= np.cross(p - root, w[0:3]) + w[3:6]

        feet = list(self.stance) + [f for f in self._leaving if self._blend() < 1.0]
        feet = list(dict.fromkeys(feet))
        if not feet:
            self.contact_wrenches = {}
            return
        n = 6 * len(feet)
        # force balance is a hard equality (conservation must hold every
        # step); moments are least-squares within the cone, so an
        # unbalanceable pose shows up as moment residual, not lost force
        A_eq = np.zeros((3, n))
        A = np.zeros((3, n))
        for k, f in enumerate(feet):
            p = fk.frame_pose(f)[1]
            A_eq[:, 6 * k : 6 * k + 3] = np.eye(3)
            A[:, 6 * k : 6 * k + 3] = _skew(p - root)
            A[:, 6 * k + 3 : 6 * k + 6] = np.eye(3)
        b = b_moment
        H = A.T @ A + 1e-9 * np.eye(n)
        gvec = -A.T @ b
        cone_A, cone_b = contact_cone_rows(model, 2.0 * (M + self._payload_mass()) * g)
        C_rows, d_rows = [], []
        blend = self._blend()
        for k, f in enumerate(feet):
            R = fk.frame_pose(f)[0]
            Rblk = np.zeros((6, 6))
            Rblk[0:3, 0:3] = R.T
            Rblk[3:6, 3:6] = R.T
            rows = np.zeros((12, n))
            rows[:, 6 * k : 6 * k + 6] = cone_A @ Rblk
            bf = cone_b.copy()
            if f in self._leaving:
                # departing foot: cap its normal force along the blend
                cap = (1.0 - blend) * 2.0 * M * g
                bf = bf.copy()
                bf[1] = -cap
            C_rows.append(rows)
            d_rows.append(bf)
        res = solve_qp(
            H, gvec, np.vstack(C_rows), np.concatenate(d_rows), A_eq=A_eq, b_eq=b_force
        )
        if res.status == "infeasible":
            # degenerate externals: fall back to soft force balance
            H2 = H + 1e4 * A_eq.T @ A_eq
            g2 = gvec - 1e4 * A_eq.T @ b_force
            res = solve_qp(H2, g2, np.vstack(C_rows), np.concatenate(d_rows))
        w = res.x if res.status in ("optimal", "max_iter") else np.zeros(n)
        self.contact_wrenches = {}
        for k, f in enumerate(feet):
            if f in self.stance or blend < 1.0:
                self.contact_wrenches[f] = w[6 * k : 6 * k + 6].copy()
        for f in ("l_foot", "r_foot"):
            if f not in self.contact_wrenches:
                self.contact_wrenches[f] = np.zeros(6)

    def _payload_mass(self):
        return sum(b.mass for b in self.scenario.boxes if self.attached[b.name])

    def _update_sensors(self, dt):
        cf = self.config
        a = min(1.0, dt / cf.filter_tau) if cf.filter_tau > 0 else 1.0
        frames = set(self.contact_wrenches) | set(self._external_wrenches())
        raw = {}
        for f in frames:
            w = self.contact_wrenches.get(f, np.zeros(6)) + self._external_wrenches().get(f, np.zeros(6))
            raw[f] = w
        for f, w in raw.items():
            prev = self.sensed.get(f, w)
            filt = prev + (w - prev) * a
            if cf.noise_force > 0 or cf.noise_moment > 0:
                noise = np.concatenate(
                    [
                        self.rng.normal(0.0, cf.noise_force, 3),
                        self.rng.normal(0.0, cf.noise_moment, 3),
                    ]
                )
                filt = filt + noise
            self.sensed[f] = filt

    # ------------------------------------------------------------ readouts

    def snapshot(self) -> PlantState:
        return PlantState(
            t=self.t,
            joints=self.joints.copy(),
            root_position=self.root_position.copy(),
            root_quaternion=self.root_quaternion.copy(),
            contact_wrenches={k: v.copy() for k, v in self.contact_wrenches.items()},
            sensed_wrenches={k: v.copy() for k, v in self.sensed.items()},
            hand_loads={k: v.copy() for k, v in self.hand_loads.items()},
            attached=dict(self.attached),
            box_positions={k: v.copy() for k, v in self.box_positions.items()},
            pedal_depression=self.pedal_depression,
            stance=self.stance,
            phase=self._phase(),
        )

    def _phase(self) -> float:
        if self.scenario.pedal is not None:
            return float(np.clip(self.pedal_depression / self.scenario.pedal.travel, 0.0, 1.0))
        for box in self.scenario.boxes:
            dz = self.box_positions[box.name][2] - box.position[2]
            return float(np.clip(dz / self.config.lift_scale, 0.0, 1.0))
        return 0.0

    def sense_features(self) -> np.ndarray:
        """12-dim feature vector in [-1, 1]:
        object pose relative to the root (6), hand wrench z (2),
        left-foot load share (1), grasp flags (2), scenario phase (1)."""
        s = np.zeros(FEATURE_DIM)
        cf = self.config
        root_R = quat_to_matrix(self.root_quaternion)
        if self.scenario.boxes:
            box = self.scenario.boxes[0]
            rel = (self.box_positions[box.name] - self.root_position) / cf.position_scale
            s[0:3] = np.clip(rel, -1.0, 1.0)
            s[3:6] = np.clip(rotation_log(root_R.T) / np.pi, -1.0, 1.0)
        elif self.scenario.pedal is not None:
            rel = (self.scenario.pedal.position - self.root_position) / cf.position_scale
            s[0:3] = np.clip(rel, -1.0, 1.0)
            s[3:6] = np.clip(rotation_log(root_R.T) / np.pi, -1.0, 1.0)
        Mg = self.model.total_mass * self.model.gravity
        s[6] = np.clip(self.sensed.get("l_hand", np.zeros(6))[2] / Mg, -1.0, 1.0)
        s[7] = np.clip(self.sensed.get("r_hand", np.zeros(6))[2] / Mg, -1.0, 1.0)
        fl = self.contact_wrenches.get("l_foot", np.zeros(6))[2]
        fr = self.contact_wrenches.get("r_foot", np.zeros(6))[2]
        total = fl + fr
        share = fl / total if total > 1e-9 else 0.5
        s[8] = 2.0 * share - 1.0
        for i, hand in enumerate(("l_hand", "r_hand")):
            held = any(
                self.attached[b.name] and hand in b.handles for b in self.scenario.boxes
            )
            s[9 + i] = 1.0 if held else -1.0
        s[11] = 2.0 * self._phase() - 1.0
        return s


def com_of(model, fk):
    total = np.zeros(3)
    for i, link in enumerate(model.links):
        total += link.mass * (fk.p[i] + fk.R[i] @ link.com)
    return total / model.total_mass


def _skew(v):
    return np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]], dtype=float)
