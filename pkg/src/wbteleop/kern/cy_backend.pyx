# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kinematics kernels.

Function-for-function mirror of py_backend; keep the two in sync.
"""

from libc.math cimport cos, sin

import numpy as np

NAME = "cython"


cdef inline void _rot_axis_angle(const double[:] axis, double angle, double[3][3] out) noexcept:
    cdef double x = axis[0], y = axis[1], z = axis[2]
    cdef double c = cos(angle), s = sin(angle), C = 1.0 - c
    out[0][0] = c + x * x * C
    out[0][1] = x * y * C - z * s
    out[0][2] = x * z * C + y * s
    out[1][0] = y * x * C + z * s
    out[1][1] = c + y * y * C
    out[1][2] = y * z * C - x * s
    out[2][0] = z * x * C - y * s
    out[2][1] = z * y * C + x * s
    out[2][2] = c + z * z * C


def fk(const int[:] parent, const int[:] joint_col,
       const double[:, :] origin_pos, const double[:, :, :] origin_rot,
       const double[:, :] axis, const double[:, :] root_R, const double[:] root_p,
       const double[:] theta):
    cdef int L = parent.shape[0]
    R_arr = np.empty((L, 3, 3))
    p_arr = np.empty((L, 3))
    cdef double[:, :, :] R = R_arr
    cdef double[:, :] p = p_arr
    cdef int i, pa, r, c, k
    cdef double rot[3][3]
    cdef double pre[3][3]
    cdef double acc
    for r in range(3):
        p[0, r] = root_p[r]
        for c in range(3):
            R[0, r, c] = root_R[r, c]
    for i in range(1, L):
        pa = parent[i]
        # p_i = p_pa + R_pa @ origin_pos_i ; R_i = R_pa @ origin_rot_i @ rot(axis_i, theta)
        for r in range(3):
            acc = 0.0
            for k in range(3):
                acc += R[pa, r, k] * origin_pos[i, k]
            p[i, r] = p[pa, r] + acc
        for r in range(3):
            for c in range(3):
                acc = 0.0
                for k in range(3):
                    acc += R[pa, r, k] * origin_rot[i, k, c]
                pre[r][c] = acc
        _rot_axis_angle(axis[i], theta[joint_col[i]], rot)
        for r in range(3):
            for c in range(3):
                acc = 0.0
                for k in range(3):
                    acc += pre[r][k] * rot[k][c]
                R[i, r, c] = acc
    return R_arr, p_arr


cdef inline void _axis_world(const double[:, :, :] R, const double[:, :] axis, int i, double* a) noexcept:
    cdef int r, k
    for r in range(3):
        a[r] = 0.0
        for k in range(3):
            a[r] += R[i, r, k] * axis[i, k]


def point_jacobian(const int[:] parent, const int[:] joint_col, const double[:, :] axis,
                   const double[:, :, :] R, const double[:, :] p, const double[:] root_p,
                   int link, const double[:] x_world, int n_joints):
    J_arr = np.zeros((6, 6 + n_joints))
    cdef double[:, :] J = J_arr
    cdef double r0 = x_world[0] - root_p[0]
    cdef double r1 = x_world[1] - root_p[1]
    cdef double r2 = x_world[2] - root_p[2]
    cdef double a[3]
    cdef double d0, d1, d2
    cdef int i = link, col
    J[0, 0] = 1.0
    J[1, 1] = 1.0
    J[2, 2] = 1.0
    J[0, 4] = r2
    J[0, 5] = -r1
    J[1, 3] = -r2
    J[1, 5] = r0
    J[2, 3] = r1
    J[2, 4] = -r0
    J[3, 3] = 1.0
    J[4, 4] = 1.0
    J[5, 5] = 1.0
    while parent[i] >= 0:
        _axis_world(R, axis, i, a)
        col = 6 + joint_col[i]
        d0 = x_world[0] - p[i, 0]
        d1 = x_world[1] - p[i, 1]
        d2 = x_world[2] - p[i, 2]
        J[0, col] = a[1] * d2 - a[2] * d1
        J[1, col] = a[2] * d0 - a[0] * d2
        J[2, col] = a[0] * d1 - a[1] * d0
        J[3, col] = a[0]
        J[4, col] = a[1]
        J[5, col] = a[2]
        i = parent[i]
    return J_arr


def com_and_jacobian(const int[:] parent, const int[:] joint_col, const double[:, :] axis,
                     const double[:] mass, const double[:, :] com,
                     const double[:, :, :] R, const double[:, :] p, const double[:] root_p,
                     int n_joints):
    cdef int L = parent.shape[0]
    J_arr = np.zeros((3, 6 + n_joints))
    cdef double[:, :] J = J_arr
    cdef double M = 0.0
    cdef double c_tot0 = 0.0, c_tot1 = 0.0, c_tot2 = 0.0
    cdef double x0, x1, x2, r0, r1, r2, m, d0, d1, d2
    cdef double a[3]
    cdef int l, i, k, col
    for l in range(L):
        M += mass[l]
    for l in range(L):
        m = mass[l]
        if m == 0.0:
            continue
        x0 = p[l, 0]
        x1 = p[l, 1]
        x2 = p[l, 2]
        for k in range(3):
            x0 += R[l, 0, k] * com[l, k]
            x1 += R[l, 1, k] * com[l, k]
            x2 += R[l, 2, k] * com[l, k]
        c_tot0 += m * x0
        c_tot1 += m * x1
        c_tot2 += m * x2
        r0 = x0 - root_p[0]
        r1 = x1 - root_p[1]
        r2 = x2 - root_p[2]
        J[0, 4] += m * r2
        J[0, 5] -= m * r1
        J[1, 3] -= m * r2
        J[1, 5] += m * r0
        J[2, 3] += m * r1
        J[2, 4] -= m * r0
        i = l
        while parent[i] >= 0:
            _axis_world(R, axis, i, a)
            col = 6 + joint_col[i]
            d0 = x0 - p[i, 0]
            d1 = x1 - p[i, 1]
            d2 = x2 - p[i, 2]
            J[0, col] += m * (a[1] * d2 - a[2] * d1)
            J[1, col] += m * (a[2] * d0 - a[0] * d2)
            J[2, col] += m * (a[0] * d1 - a[1] * d0)
            i = parent[i]
    J[0, 0] = M
    J[1, 1] = M
    J[2, 2] = M
    cdef int rr, cc
    for rr in range(3):
        for cc in range(6 + n_joints):
            J[rr, cc] /= M
    com_arr = np.array([c_tot0 / M, c_tot1 / M, c_tot2 / M])
    return com_arr, J_arr


def gravity_torque(const int[:] parent, const int[:] joint_col, const double[:, :] axis,
                   const double[:] mass, const double[:, :] com,
                   const double[:, :, :] R, const double[:, :] p, double g, int n_joints):
    cdef int L = parent.shape[0]
    tau_arr = np.zeros(n_joints)
    cdef double[:] tau = tau_arr
    cdef double m, x0, x1, x2, fz, d0, d1
    cdef double a[3]
    cdef int l, i, k
    for l in range(L):
        m = mass[l]
        if m == 0.0:
            continue
        x0 = p[l, 0]
        x1 = p[l, 1]
        x2 = p[l, 2]
        for k in range(3):
            x0 += R[l, 0, k] * com[l, k]
            x1 += R[l, 1, k] * com[l, k]
            x2 += R[l, 2, k] * com[l, k]
        fz = -m * g
        i = l
        while parent[i] >= 0:
            _axis_world(R, axis, i, a)
            d0 = x0 - p[i, 0]
            d1 = x1 - p[i, 1]
            tau[joint_col[i]] += fz * (a[0] * d1 - a[1] * d0)
            i = parent[i]
    return tau_arr


def contact_torque(const int[:] parent, const int[:] joint_col, const double[:, :] axis,
                   const double[:, :, :] R, const double[:, :] p,
                   const int[:] frame_links, const double[:, :] frame_offsets,
                   const double[:, :] wrenches, int n_joints):
    tau_arr = np.zeros(n_joints)
    cdef double[:] tau = tau_arr
    cdef int F = frame_links.shape[0]
    cdef double x0, x1, x2, d0, d1, d2
    cdef double a[3]
    cdef int kk, l, i, k
    for kk in range(F):
        l = frame_links[kk]
        x0 = p[l, 0]
        x1 = p[l, 1]
        x2 = p[l, 2]
        for k in range(3):
            x0 += R[l, 0, k] * frame_offsets[kk, k]
            x1 += R[l, 1, k] * frame_offsets[kk, k]
            x2 += R[l, 2, k] * frame_offsets[kk, k]
        i = l
        while parent[i] >= 0:
            _axis_world(R, axis, i, a)
            d0 = x0 - p[i, 0]
            d1 = x1 - p[i, 1]
            d2 = x2 - p[i, 2]
            tau[joint_col[i]] += (
                (a[1] * d2 - a[2] * d1) * wrenches[kk, 0]
                + (a[2] * d0 - a[0] * d2) * wrenches[kk, 1]
                + (a[0] * d1 - a[1] * d0) * wrenches[kk, 2]
                + a[0] * wrenches[kk, 3]
                + a[1] * wrenches[kk, 4]
                + a[2] * wrenches[kk, 5]
            )
            i = parent[i]
    return tau_arr
