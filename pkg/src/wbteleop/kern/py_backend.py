"""Pure-NumPy kinematics kernels (fallback backend).

Mirrors the Cython backend function-for-function; keep the two in sync.
All functions take the flat KinArrays fields. Jacobian columns are ordered
(root translation 3, root orientation angle-axis 3, joints), with the root
orientation increment applied on the left.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _rot_axis_angle(axis, angle):
    x, y, z = axis
    c = np.cos(angle)
    s = np.sin(angle)
    C = 1.0 - c
    return np.array(
        [
            [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
            [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
            [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
        ]
    )


def fk(parent, joint_col, origin_pos, origin_rot, axis, root_R, root_p, theta):
    L = parent.shape[0]
    R = np.empty((L, 3, 3))
    p = np.empty((L, 3))
    R[0] = root_R
    p[0] = root_p
    for i in range(1, L):
        pa = parent[i]
        Rpre = R[pa] @ origin_rot[i]
        p[i] = p[pa] + R[pa] @ origin_pos[i]
        R[i] = Rpre @ _rot_axis_angle(axis[i], theta[joint_col[i]])
    return R, p


def point_jacobian(parent, joint_col, axis, R, p, root_p, link, x_world, n_joints):
    J = np.zeros((6, 6 + n_joints))
    J[0:3, 0:3] = np.eye(3)
    r = x_world - root_p
    # linear rows for the root orientation increment: dphi x r
    J[0, 4], J[0, 5] = r[2], -r[1]
    J[1, 3], J[1, 5] = -r[2], r[0]
    J[2, 3], J[2, 4] = r[1], -r[0]
    J[3:6, 3:6] = np.eye(3)
    i = link
    while parent[i] >= 0:
        a = R[i] @ axis[i]
        col = 6 + joint_col[i]
        J[0:3, col] = np.cross(a, x_world - p[i])
        J[3:6, col] = a
        i = parent[i]
    return J


def com_and_jacobian(parent, joint_col, axis, mass, com, R, p, root_p, n_joints):
    L = parent.shape[0]
    M = float(mass.sum())
    J = np.zeros((3, 6 + n_joints))
    c_total = np.zeros(3)
    for l in range(L):
        m = mass[l]
        if m == 0.0:
            continue
        x = p[l] + R[l] @ com[l]
        c_total += m * x
        r = x - root_p
        J[0, 4] += m * r[2]
        J[0, 5] -= m * r[1]
        J[1, 3] -= m * r[2]
        J[1, 5] += m * r[0]
        J[2, 3] += m * r[1]
        J[2, 4] -= m * r[0]
        i = l
        while parent[i] >= 0:
            a = R[i] @ axis[i]
            J[:, 6 + joint_col[i]] += m * np.cross(a, x - p[i])
            i = parent[i]
    J[0:3, 0:3] = M * np.eye(3)
    return c_total / M, J / M


def gravity_torque(parent, joint_col, axis, mass, com, R, p, g, n_joints):
    """tau[j] = sum_l J_com_l[:, j] . (0, 0, -m_l g), joint rows only."""
    L = parent.shape[0]
    tau = np.zeros(n_joints)
    for l in range(L):
        m = mass[l]
        if m == 0.0:
            continue
        x = p[l] + R[l] @ com[l]
        fz = -m * g
        i = l
        while parent[i] >= 0:
            a = R[i] @ axis[i]
            # (a x (x - p_i)) . (0, 0, fz) = fz * (a x (x - p_i))_z
            dx = x - p[i]
            tau[joint_col[i]] += fz * (a[0] * dx[1] - a[1] * dx[0])
            i = parent[i]
    return tau


def contact_torque(parent, joint_col, axis, R, p, frame_links, frame_offsets, wrenches, n_joints):
    """tau = sum_m J_m^T w_m over wrench-bearing frames, joint rows only."""
    tau = np.zeros(n_joints)
    for k in range(frame_links.shape[0]):
        l = frame_links[k]
        x = p[l] + R[l] @ frame_offsets[k]
        f = wrenches[k, 0:3]
        n = wrenches[k, 3:6]
        i = l
        while parent[i] >= 0:
            a = R[i] @ axis[i]
            tau[joint_col[i]] += np.dot(np.cross(a, x - p[i]), f) + np.dot(a, n)
            i = parent[i]
    return tau
