"""Training: joint optimization of network weights and per-trial biases.

Each trial contributes one-step prediction MSE with its own bias vector
concatenated to every input; gradients flow into the weights and into that
trial's bias row. Hidden state is detached on a fixed stride (truncated
backpropagation through time). Trials are accumulated in index order and
the optimizers step once per epoch, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .dataset import Dataset
from .network import PBNet


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 300
    lr_weights: float = 1e-3
    lr_pb: float = 1e-2
    bptt_stride: int = 32
    pb_dim: int = 2
    hidden: int = 64
    seed: int = 0
    log_every: int = 0  # epochs; 0 = silent


@dataclass
class TrainResult:
    net: PBNet
    pb: np.ndarray  # (K, pb_dim)
    losses: list = field(default_factory=list)  # mean loss per epoch
    labels: list = field(default_factory=list)


def _trial_loss(net, s, u, pk, stride):
    """One-step prediction MSE over a trial, truncating BPTT every `stride`."""
    T = s.shape[0]
    hidden = None
    p_row = pk.unsqueeze(0)
    losses = []
    for t in range(T - 1):
        (s_pred, u_pred), hidden = net(s[t : t + 1], u[t : t + 1], p_row, hidden)
        losses.append(
            torch.sum((s_pred[0] - s[t + 1]) ** 2) + torch.sum((u_pred[0] - u[t + 1]) ** 2)
        )
        if (t + 1) % stride == 0:
            hidden = tuple((h.detach(), c.detach()) for h, c in hidden)
    dim = s.shape[1] + u.shape[1]
    return torch.stack(losses).sum() / ((T - 1) * dim)


def train(dataset: Dataset, config: TrainConfig | None = None, net: PBNet | None = None) -> TrainResult:
    cf = config or TrainConfig()
    if not dataset.trials:
        raise ValueError("dataset has no trials")
    if dataset.norm is None:
        dataset.compute_norm()
    trials = dataset.normalized_trials()
    K = len(trials)

    prev_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        torch.manual_seed(cf.seed)
        if net is None:
            net = PBNet(dataset.s_dim, dataset.u_dim, cf.pb_dim, cf.hidden, seed=cf.seed)
        pb = torch.zeros(K, net.pb_dim, dtype=torch.float64, requires_grad=True)
        opt_w = torch.optim.Adam(net.parameters(), lr=cf.lr_weights)
        opt_p = torch.optim.Adam([pb], lr=cf.lr_pb)

        tensors = [
            (torch.as_tensor(tr.s, dtype=torch.float64), torch.as_tensor(tr.u, dtype=torch.float64))
            for tr in trials
        ]
        losses = []
        for epoch in range(cf.epochs):
            opt_w.zero_grad()
            opt_p.zero_grad()
            total = 0.0
            for k in range(K):  # fixed order: deterministic accumulation
                s, u = tensors[k]
                loss_k = _trial_loss(net, s, u, pb[k], cf.bptt_stride)
                (loss_k / K).backward()
                total += float(loss_k.detach())
            mean_loss = total / K
            if not np.isfinite(mean_loss):
                raise TrainingDiverged(
                    f"loss became non-finite at epoch {epoch} "
                    f"(lr_weights={cf.lr_weights}, lr_pb={cf.lr_pb}, trials={K}, "
                    f"lengths={[len(t) for t in trials]})"
                )
            opt_w.step()
            opt_p.step()
            losses.append(mean_loss)
            if cf.log_every and epoch % cf.log_every == 0:
                print(f"epoch {epoch:4d}  loss {mean_loss:.6e}")
        return TrainResult(net=net, pb=pb.detach().numpy().copy(), losses=losses, labels=dataset.labels())
    finally:
        torch.set_num_threads(prev_threads)


# ------------------------------------------------------------- gradient check


def gradient_check(
    s_dim=3, u_dim=2, pb_dim=2, hidden=6, T=5, seed=0, h=1e-6
) -> float:
    """Max relative error between autograd and central finite differences
    over every parameter group including the parametric bias."""
    torch.manual_seed(seed)
    net = PBNet(s_dim, u_dim, pb_dim, hidden, seed=seed)
    rng = np.random.default_rng(seed)
    s = torch.as_tensor(rng.uniform(-0.8, 0.8, (T, s_dim)))
    u = torch.as_tensor(rng.uniform(-0.8, 0.8, (T, u_dim)))
    pb = torch.as_tensor(rng.uniform(-0.5, 0.5, pb_dim)).requires_grad_(True)

    def loss_fn():
        return _trial_loss(net, s, u, pb, stride=10**9)

    loss = loss_fn()
    params = list(net.parameters()) + [pb]
    grads = torch.autograd.grad(loss, params)
    # relative to the gradient's overall scale: coordinates with near-zero
    # gradient would otherwise amplify FD rounding noise into false alarms
    scale = max(float(g.abs().max()) for g in grads)

    worst = 0.0
    for param, grad in zip(params, grads):
        flat = param.detach().reshape(-1)
        gflat = grad.reshape(-1)
        # probe a subset of coordinates on big tensors to keep it quick
        idx = range(flat.numel()) if flat.numel() <= 64 else rng.choice(flat.numel(), 64, replace=False)
        for i in idx:
            with torch.no_grad():
                orig = float(flat[i])
                flat[i] = orig + h
                lp = float(loss_fn())
                flat[i] = orig - h
                lm = float(loss_fn())
                flat[i] = orig
            fd = (lp - lm) / (2 * h)
            denom = max(abs(fd), abs(float(gflat[i])), 1e-3 * scale)
            worst = max(worst, abs(fd - float(gflat[i])) / denom)
    return worst
