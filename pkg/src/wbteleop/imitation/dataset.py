"""Demonstration datasets: trials of (sensory features, joint commands).

File format (docs/dataset_format.md) is line-delimited text:

    #WBT-DATASET v1
    {"s_dim": 12, "u_dim": 20, "rate_hz": 30.0, "norm": {...} | null}
    #TRIAL {"index": 0, "label": "slow"}
    <t> <s_0> ... <s_11> <u_0> ... <u_19>
    ...

Floats are written with shortest round-trip repr, so identical recordings
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = "#WBT-DATASET v1"


@dataclass
class NormStats:
    """Per-channel min/max mapping into [lo, hi] (tanh-friendly)."""

    s_min: np.ndarray
    s_max: np.ndarray
    u_min: np.ndarray
    u_max: np.ndarray
    lo: float = -0.9
    hi: float = 0.9

    def _fwd(self, x, mn, mx):
        x = np.asarray(x, dtype=float)
        span = mx - mn
        safe = np.where(span > 0, span, 1.0)
        out = self.lo + (x - mn) * (self.hi - self.lo) / safe
        return np.where(span > 0, out, 0.0)

    def _inv(self, y, mn, mx):
        y = np.asarray(y, dtype=float)
        span = mx - mn
        mid = 0.5 * (mn + mx)
        out = mn + (y - self.lo) * span / (self.hi - self.lo)
        return np.where(span > 0, out, mid)

    def normalize_s(self, s):
        return self._fwd(s, self.s_min, self.s_max)

    def normalize_u(self, u):
        return self._fwd(u, self.u_min, self.u_max)

    def denormalize_s(self, s):
        return self._inv(s, self.s_min, self.s_max)

    def denormalize_u(self, u):
        return self._inv(u, self.u_min, self.u_max)

    def to_dict(self):
        return {
            "s_min": self.s_min.tolist(),
            "s_max": self.s_max.tolist(),
            "u_min": self.u_min.tolist(),
            "u_max": self.u_max.tolist(),
            "lo": self.lo,
            "hi": self.hi,
        }

    @staticmethod
    def from_dict(d):
        return NormStats(
            np.asarray(d["s_min"], float),
            np.asarray(d["s_max"], float),
            np.asarray(d["u_min"], float),
            np.asarray(d["u_max"], float),
            float(d.get("lo", -0.9)),
            float(d.get("hi", 0.9)),
        )


@dataclass
class Trial:
    s: np.ndarray  # (T, s_dim)
    u: np.ndarray  # (T, u_dim)
    t: np.ndarray  # (T,)
    label: str = ""

    def __len__(self):
        return self.s.shape[0]


@dataclass
class Dataset:
    s_dim: int
    u_dim: int
    rate_hz: float
    trials: list = field(default_factory=list)
    norm: NormStats | None = None

    def add_trial(self, s, u, t, label=""):
        s = np.asarray(s, float).reshape(-1, self.s_dim)
        u = np.asarray(u, float).reshape(-1, self.u_dim)
        t = np.asarray(t, float).reshape(-1)
        if not (len(s) == len(u) == len(t)):
            raise ValueError("trial channels disagree on length")
        self.trials.append(Trial(s, u, t, label))

    def compute_norm(self, lo=-0.9, hi=0.9) -> NormStats:
        if not self.trials:
            raise ValueError("dataset has no trials")
        s_all = np.vstack([tr.s for tr in self.trials])
        u_all = np.vstack([tr.u for tr in self.trials])
        self.norm = NormStats(
            s_all.min(axis=0), s_all.max(axis=0), u_all.min(axis=0), u_all.max(axis=0), lo, hi
        )
        return self.norm

    def normalized_trials(self):
        if self.norm is None:
            raise ValueError("call compute_norm() or load stats first")
        out = []
        for tr in self.trials:
            out.append(
                Trial(self.norm.normalize_s(tr.s), self.norm.normalize_u(tr.u), tr.t, tr.label)
            )
        return out

    def labels(self):
        return [tr.label for tr in self.trials]

    # ------------------------------------------------------------------ io

    def save(self, path) -> None:
        lines = [MAGIC]
        header = {
            "s_dim": self.s_dim,
            "u_dim": self.u_dim,
            "rate_hz": self.rate_hz,
            "norm": self.norm.to_dict() if self.norm else None,
        }
        lines.append(json.dumps(header, separators=(",", ":")))
        for k, tr in enumerate(self.trials):
            lines.append("#TRIAL " + json.dumps({"index": k, "label": tr.label}, separators=(",", ":")))
            for i in range(len(tr)):
                vals = [tr.t[i], *tr.s[i], *tr.u[i]]
                lines.append(" ".join(repr(float(v)) for v in vals))
        Path(path).write_text("\n".join(lines) + "\n")

    @staticmethod
    def load(path) -> "Dataset":
        text = Path(path).read_text().splitlines()
        if not text or text[0] != MAGIC:
            raise ValueError(f"{path}: not a dataset file (missing magic line)")
        header = json.loads(text[1])
        ds = Dataset(int(header["s_dim"]), int(header["u_dim"]), float(header["rate_hz"]))
        if header.get("norm"):
            ds.norm = NormStats.from_dict(header["norm"])
        rows, meta = [], None

        def flush():
            if meta is None:
                return
            arr = np.asarray(rows, dtype=float)
            if arr.size == 0:
                arr = np.zeros((0, 1 + ds.s_dim + ds.u_dim))
            ds.add_trial(
                arr[:, 1 : 1 + ds.s_dim], arr[:, 1 + ds.s_dim :], arr[:, 0], meta.get("label", "")
            )

        for line in text[2:]:
            if line.startswith("#TRIAL"):
                flush()
                meta = json.loads(line[len("#TRIAL ") :])
                rows = []
            elif line.strip():
                rows.append([float(x) for x in line.split()])
        flush()
        return ds
