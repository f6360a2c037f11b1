"""Recurrent predictor with per-trial parametric bias.

One step maps (s_t, u_t, p) to a prediction of (s_{t+1}, u_{t+1}). The
stack is ten layers: four fully connected, two LSTM cells, four fully
connected, all with hyperbolic-tangent activations (including the output
head, so predictions live in (-1, 1) like the normalized data). The
parametric bias is a small vector concatenated to every input; training
moves it per trial, embedding the demonstration style.
"""

from __future__ import annotations

import json

import numpy as np
import torch
from torch import nn


class PBNet(nn.Module):
    def __init__(self, s_dim: int, u_dim: int, pb_dim: int = 2, hidden: int = 64, seed: int = 0):
        super().__init__()
        self.s_dim = s_dim
        self.u_dim = u_dim
        self.pb_dim = pb_dim
        self.hidden = hidden
        in_dim = s_dim + u_dim + pb_dim
        out_dim = s_dim + u_dim
        gen = torch.Generator().manual_seed(seed)
        self.fc_in = nn.ModuleList(
            [
                nn.Linear(in_dim, hidden),
                nn.Linear(hidden, hidden),
                nn.Linear(hidden, hidden),
                nn.Linear(hidden, hidden),
            ]
        )
        self.lstm1 = nn.LSTMCell(hidden, hidden)
        self.lstm2 = nn.LSTMCell(hidden, hidden)
        self.fc_out = nn.ModuleList(
            [
                nn.Linear(hidden, hidden),
                nn.Linear(hidden, hidden),
                nn.Linear(hidden, hidden),
                nn.Linear(hidden, out_dim),
            ]
        )
        self.double()
        with torch.no_grad():
            for m in self.modules():
                if isinstance(m, nn.Linear):
                    nn.init.xavier_uniform_(m.weight, generator=gen)
                    nn.init.zeros_(m.bias)
                elif isinstance(m, nn.LSTMCell):
                    for w in (m.weight_ih, m.weight_hh):
                        nn.init.xavier_uniform_(w, generator=gen)
                    nn.init.zeros_(m.bias_ih)
                    nn.init.zeros_(m.bias_hh)

    def init_hidden(self, batch: int = 1):
        z = lambda: torch.zeros(batch, self.hidden, dtype=torch.float64)
        return ((z(), z()), (z(), z()))

    def forward(self, s, u, p, hidden=None):
        """One prediction step.

        s: (B, s_dim), u: (B, u_dim), p: (B, pb_dim) normalized tensors.
        Returns ((s_pred, u_pred), hidden').
        """
        if s.shape[-1] != self.s_dim or u.shape[-1] != self.u_dim or p.shape[-1] != self.pb_dim:
            raise ValueError(
                f"input widths ({s.shape[-1]}, {u.shape[-1]}, {p.shape[-1]}) do not match "
                f"({self.s_dim}, {self.u_dim}, {self.pb_dim})"
            )
        x = torch.cat([s, u, p], dim=-1)
        if hidden is None:
            hidden = self.init_hidden(x.shape[0])
        for layer in self.fc_in:
            x = torch.tanh(layer(x))
        h1, c1 = self.lstm1(x, hidden[0])
        h2, c2 = self.lstm2(h1, hidden[1])
        x = h2
        for layer in self.fc_out:
            x = torch.tanh(layer(x))
        s_pred = x[..., : self.s_dim]
        u_pred = x[..., self.s_dim :]
        return (s_pred, u_pred), ((h1, c1), (h2, c2))

    def step_numpy(self, s, u, p, hidden=None):
        """Convenience single-sample step on numpy arrays (no grad)."""
        with torch.no_grad():
            st = torch.as_tensor(np.asarray(s, float)).reshape(1, -1)
            ut = torch.as_tensor(np.asarray(u, float)).reshape(1, -1)
            pt = torch.as_tensor(np.asarray(p, float)).reshape(1, -1)
            (sp, up), hidden = self.forward(st, ut, pt, hidden)
            return sp.numpy()[0], up.numpy()[0], hidden


# ------------------------------------------------------------------ weights io

WEIGHTS_VERSION = 1


def save_weights(path, net: PBNet, pb: np.ndarray, meta: dict | None = None) -> None:
    """Versioned tensor dump: npz with a JSON manifest and named arrays."""
    manifest = {
        "version": WEIGHTS_VERSION,
        "s_dim": net.s_dim,
        "u_dim": net.u_dim,
        "pb_dim": net.pb_dim,
        "hidden": net.hidden,
        "meta": meta or {},
    }
    arrays = {f"param/{k}": v.detach().numpy() for k, v in net.state_dict().items()}
    arrays["pb"] = np.asarray(pb, float)
    np.savez(path, manifest=json.dumps(manifest), **arrays)


def load_weights(path):
    """Returns (net, pb, meta)."""
    data = np.load(path, allow_pickle=False)
    manifest = json.loads(str(data["manifest"]))
    if manifest["version"] != WEIGHTS_VERSION:
        raise ValueError(f"unsupported weights version {manifest['version']}")
    net = PBNet(manifest["s_dim"], manifest["u_dim"], manifest["pb_dim"], manifest["hidden"])
    state = {}
    for key in data.files:
        if key.startswith("param/"):
            state[key[len("param/") :]] = torch.as_tensor(data[key])
    net.load_state_dict(state)
    return net, data["pb"], manifest["meta"]
