"""Closest points between link collision primitives (spheres and capsules)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import FK, forward_kinematics
from .types import Configuration, RobotModel


@dataclass(frozen=True)
class NearestPoints:
    point_a: np.ndarray
    point_b: np.ndarray
    distance: float  # >= 0
    penetration: float  # > 0 when the primitives overlap
    # witness points on the primitive core segments/centers; these stay
    # distinct under penetration, unlike the surface points
    core_a: np.ndarray = None
    core_b: np.ndarray = None

    @property
    def signed_distance(self) -> float:
        return self.distance - self.penetration


def _segment_closest(p0, p1, q0, q1):
    """Closest points between segments p0p1 and q0q1."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    eps = 1e-14
    if a <= eps and e <= eps:
        return p0, q0
    if a <= eps:
        t = np.clip(f / e, 0.0, 1.0)
        return p0, q0 + t * d2
    c = float(d1 @ r)
    if e <= eps:
        s = np.clip(-c / a, 0.0, 1.0)
        return p0 + s * d1, q0
    b = float(d1 @ d2)
    denom = a * e - b * b
    s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > eps else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = np.clip(-c / a, 0.0, 1.0)
    elif t > 1.0:
        t = 1.0
        s = np.clip((b - c) / a, 0.0, 1.0)
    return p0 + s * d1, q0 + t * d2


def _world_segment(prim, R, p):
    a = p + R @ prim.p0
    b = a if prim.p1 is None else p + R @ prim.p1
    return a, b


def _pair_nearest(prim_a, Ra, pa, prim_b, Rb, pb):
    a0, a1 = _world_segment(prim_a, Ra, pa)
    b0, b1 = _world_segment(prim_b, Rb, pb)
    ca, cb = _segment_closest(a0, a1, b0, b1)
    axis = cb - ca
    d_centers = float(np.linalg.norm(axis))
    if d_centers < 1e-12:
        direction = np.array([0.0, 0.0, 1.0])
    else:
        direction = axis / d_centers
    gap = d_centers - prim_a.radius - prim_b.radius
    point_a = ca + prim_a.radius * direction
    point_b = cb - prim_b.radius * direction
    return NearestPoints(point_a, point_b, max(gap, 0.0), max(-gap, 0.0), ca, cb)


def nearest_points(
    model: RobotModel, cfg: Configuration, link_a: str, link_b: str, fk: FK | None = None
) -> NearestPoints:
    """Closest points between two links' collision primitives.

    Distance is clamped at zero; overlap is reported as `penetration`.
    """
    if link_a == link_b:
        raise ValueError(f"collision pair must name two distinct links, got {link_a!r} twice")
    ia, ib = model.link_index(link_a), model.link_index(link_b)
    prims_a = model.links[ia].primitives
    prims_b = model.links[ib].primitives
    if not prims_a:
        raise ValueError(f"link {link_a!r} has no collision primitives")
    if not prims_b:
        raise ValueError(f"link {link_b!r} has no collision primitives")
    if fk is None:
        fk = forward_kinematics(model, cfg)
    best = None
    for pa in prims_a:
        for pb in prims_b:
            cand = _pair_nearest(pa, fk.R[ia], fk.p[ia], pb, fk.R[ib], fk.p[ib])
            if best is None or cand.signed_distance < best.signed_distance:
                best = cand
    return best
