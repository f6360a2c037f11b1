"""Closed-loop execution of a trained predictor.

Each step feeds the current normalized (s, u) and the chosen bias through
the network, denormalizes the predicted command, sends it to the plant
callback, and reads the new sensory state back. Hidden state persists
across steps (and across scene resets, matching live operation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import NormStats
from .network import PBNet


@dataclass
class Rollout:
    s: np.ndarray = None  # (T, s_dim) raw
    u: np.ndarray = None  # (T, u_dim) raw commands sent
    s_norm: np.ndarray = None
    u_norm: np.ndarray = None


def rollout(
    net: PBNet,
    p: np.ndarray,
    norm: NormStats,
    s0: np.ndarray,
    u0: np.ndarray,
    plant_io,
    steps: int,
    hidden=None,
):
    """Run `steps` closed-loop steps.

    plant_io(u_raw) -> s_raw advances the world by one control period with
    the denormalized command and returns the new sensory features.
    Returns (Rollout, hidden) so rollouts can be chained.
    """
    s_n = norm.normalize_s(np.asarray(s0, float))
    u_n = norm.normalize_u(np.asarray(u0, float))
    p = np.asarray(p, float)
    ss, us, ssn, usn = [], [], [], []
    for _ in range(steps):
        s_pred, u_pred, hidden = net.step_numpy(s_n, u_n, p, hidden)
        u_raw = norm.denormalize_u(u_pred)
        s_raw = plant_io(u_raw)
        ss.append(np.asarray(s_raw, float))
        us.append(u_raw)
        ssn.append(s_pred)
        usn.append(u_pred)
        s_n = norm.normalize_s(np.asarray(s_raw, float))
        u_n = u_pred
    return (
        Rollout(
            s=np.asarray(ss),
            u=np.asarray(us),
            s_norm=np.asarray(ssn),
            u_norm=np.asarray(usn),
        ),
        hidden,
    )
