#!/usr/bin/env python3
"""Regenerates the reference 20-DOF biped model file (6 per leg, 3 per arm,
1 waist, 1 neck). Run from the repo root:

    python tools/gen_biped.py > src/wbteleop/data/biped20.json
"""

import json
import sys


def joint(name, parent, child, axis, xyz, lower, upper, effort):
    return {
        "name": name,
        "type": "revolute",
        "parent": parent,
        "child": child,
        "axis": axis,
        "origin": {"xyz": xyz},
        "limits": {"lower": lower, "upper": upper},
        "torque": {"effort": effort},
    }


def link(name, mass, com, collision=None):
    out = {"name": name, "mass": mass, "com": com}
    if collision:
        out["collision"] = collision
    return out


def sphere(center, radius):
    return {"type": "sphere", "center": center, "radius": radius}


def capsule(p0, p1, radius):
    return {"type": "capsule", "p0": p0, "p1": p1, "radius": radius}


def build():
    links = [
        link("pelvis", 8.0, [0.0, 0.0, 0.03], [sphere([0.0, 0.0, 0.03], 0.11)]),
        link("torso", 10.0, [0.0, 0.0, 0.15], [capsule([0.0, 0.0, 0.02], [0.0, 0.0, 0.28], 0.10)]),
        link("head", 1.5, [0.0, 0.0, 0.06], [sphere([0.0, 0.0, 0.06], 0.08)]),
    ]
    joints = [
        joint("waist_pitch", "pelvis", "torso", [0, 1, 0], [0.0, 0.0, 0.18], -0.6, 1.0, 180.0),
        joint("neck_pitch", "torso", "head", [0, 1, 0], [0.0, 0.0, 0.36], -0.8, 0.8, 20.0),
    ]

    for side, sgn in (("l", 1.0), ("r", -1.0)):
        links += [
            link(f"{side}_shoulder_link", 0.8, [0.0, 0.0, 0.0]),
            link(
                f"{side}_upperarm",
                1.2,
                [0.0, 0.0, -0.15],
                [capsule([0.0, 0.0, -0.02], [0.0, 0.0, -0.28], 0.045)],
            ),
            link(
                f"{side}_forearm",
                1.0,
                [0.0, 0.0, -0.12],
                [capsule([0.0, 0.0, -0.02], [0.0, 0.0, -0.24], 0.04)],
            ),
        ]
        joints += [
            joint(
                f"{side}_shoulder_pitch", "torso", f"{side}_shoulder_link",
                [0, 1, 0], [0.0, sgn * 0.22, 0.30], -2.6, 2.6, 90.0,
            ),
            joint(
                f"{side}_shoulder_roll", f"{side}_shoulder_link", f"{side}_upperarm",
                [1, 0, 0], [0.0, 0.0, 0.0], -2.4, 2.4, 90.0,
            ),
            joint(
                f"{side}_elbow_pitch", f"{side}_upperarm", f"{side}_forearm",
                [0, 1, 0], [0.0, 0.0, -0.30], -2.4, 0.05, 60.0,
            ),
        ]

    for side, sgn in (("l", 1.0), ("r", -1.0)):
        links += [
            link(f"{side}_hipyaw_link", 0.7, [0.0, 0.0, -0.02]),
            link(f"{side}_hiproll_link", 0.7, [0.0, 0.0, 0.0]),
            link(
                f"{side}_thigh",
                3.0,
                [0.0, 0.0, -0.17],
                [capsule([0.0, 0.0, -0.04], [0.0, 0.0, -0.31], 0.06)],
            ),
            link(
                f"{side}_shank",
                2.0,
                [0.0, 0.0, -0.16],
                [capsule([0.0, 0.0, -0.04], [0.0, 0.0, -0.31], 0.05)],
            ),
            link(f"{side}_anklelink", 0.4, [0.0, 0.0, 0.0]),
            link(f"{side}_foot", 1.0, [0.02, 0.0, -0.05], [sphere([0.02, 0.0, -0.05], 0.04)]),
        ]
        joints += [
            joint(
                f"{side}_hip_yaw", "pelvis", f"{side}_hipyaw_link",
                [0, 0, 1], [0.0, sgn * 0.10, -0.06], -1.0, 1.0, 120.0,
            ),
            joint(
                f"{side}_hip_roll", f"{side}_hipyaw_link", f"{side}_hiproll_link",
                [1, 0, 0], [0.0, 0.0, 0.0], -0.6, 0.6, 150.0,
            ),
            joint(
                f"{side}_hip_pitch", f"{side}_hiproll_link", f"{side}_thigh",
                [0, 1, 0], [0.0, 0.0, 0.0], -1.8, 0.8, 180.0,
            ),
            joint(
                f"{side}_knee_pitch", f"{side}_thigh", f"{side}_shank",
                [0, 1, 0], [0.0, 0.0, -0.35], -0.05, 2.4, 180.0,
            ),
            joint(
                f"{side}_ankle_pitch", f"{side}_shank", f"{side}_anklelink",
                [0, 1, 0], [0.0, 0.0, -0.35], -1.2, 0.8, 120.0,
            ),
            joint(
                f"{side}_ankle_roll", f"{side}_anklelink", f"{side}_foot",
                [1, 0, 0], [0.0, 0.0, 0.0], -0.5, 0.5, 120.0,
            ),
        ]

    end_effectors = [
        {"name": "l_hand", "link": "l_forearm", "origin": {"xyz": [0.0, 0.0, -0.26]}},
        {"name": "r_hand", "link": "r_forearm", "origin": {"xyz": [0.0, 0.0, -0.26]}},
        {"name": "l_foot", "link": "l_foot", "origin": {"xyz": [0.02, 0.0, -0.09]}},
        {"name": "r_foot", "link": "r_foot", "origin": {"xyz": [0.02, 0.0, -0.09]}},
        {"name": "head", "link": "head", "origin": {"xyz": [0.0, 0.0, 0.08]}},
    ]

    total_mass = round(sum(l["mass"] for l in links), 9)
    return {
        "name": "biped20",
        "gravity": 9.80665,
        "root_link": "pelvis",
        "total_mass": total_mass,
        "links": links,
        "joints": joints,
        "end_effectors": end_effectors,
        "feet": {
            "half_extents": [0.11, 0.065],
            "mu": 0.6,
            "mu_z": 0.06,
            "fz_min": 0.0,
        },
    }


if __name__ == "__main__":
    json.dump(build(), sys.stdout, indent=1)
    sys.stdout.write("\n")
