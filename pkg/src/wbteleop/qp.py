"""Dense active-set solver for small strictly convex QPs.

    min 0.5 x^T H x + g^T x
    s.t. A_eq x = b_eq,  C x >= d

H must be positive definite (the posture solver guarantees this through
Levenberg damping). Problems here are small (tens of variables), so every
linear solve is a fresh dense factorization; no warm factor reuse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class QPResult:
    x: np.ndarray
    status: str  # "optimal" | "infeasible" | "max_iter"
    iterations: int
    active: list = field(default_factory=list)  # inequality row indices active at x
    multipliers: np.ndarray | None = None  # for active inequality rows, same order
    blocking: list = field(default_factory=list)  # rows proven irreconcilable


def _kkt_solve(H, g, A, b, x):
    """Step p and multipliers for the equality-constrained subproblem at x."""
    n = H.shape[0]
    m = A.shape[0] if A is not None and A.size else 0
    if m == 0:
        p = np.linalg.solve(H, -(g + H @ x))
        return p, np.zeros(0)
    K = np.zeros((n + m, n + m))
    K[:n, :n] = H
    K[:n, n:] = A.T
    K[n:, :n] = A
    rhs = np.concatenate([-(g + H @ x), b - A @ x])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    return sol[:n], sol[n:]


def _repair_start(x, C, d, A_eq, b_eq, tol, max_rounds=20):
    """Project x toward the feasible set by least-squares on violated rows."""
    for _ in range(max_rounds):
        rows = []
        resid = []
        if A_eq is not None and A_eq.size:
            r = A_eq @ x - b_eq
            if np.max(np.abs(r)) > tol:
                rows.append(A_eq)
                resid.append(-r)
        if C is not None and C.size:
            s = C @ x - d
            bad = s < -tol
            if np.any(bad):
                rows.append(C[bad])
                resid.append(-s[bad])
        if not rows:
            return x, True
        Astack = np.vstack(rows)
        rstack = np.concatenate(resid)
        dx, *_ = np.linalg.lstsq(Astack, rstack, rcond=None)
        x = x + dx
    return x, False


def solve_qp(
    H,
    g,
    C=None,
    d=None,
    A_eq=None,
    b_eq=None,
    x0=None,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> QPResult:
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float).reshape(-1)
    n = g.shape[0]
    C = np.zeros((0, n)) if C is None else np.asarray(C, dtype=float).reshape(-1, n)
    d = np.zeros(0) if d is None else np.asarray(d, dtype=float).reshape(-1)
    has_eq = A_eq is not None and np.size(A_eq) > 0
    if has_eq:
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, n)
        b_eq = np.asarray(b_eq, dtype=float).reshape(-1)
    m = C.shape[0]
    if max_iter is None:
        max_iter = 5 * (n + m) + 20

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    feas_tol = max(tol, 1e-9)
    x, ok = _repair_start(x, C, d, A_eq if has_eq else None, b_eq if has_eq else None, feas_tol)
    if not ok:
        s = C @ x - d if m else np.zeros(0)
        blocking = [int(i) for i in np.nonzero(s < -feas_tol)[0]]
        if has_eq and np.max(np.abs(A_eq @ x - b_eq), initial=0.0) > feas_tol:
            blocking = blocking + [-1 - i for i in range(A_eq.shape[0])]
        return QPResult(x, "infeasible", 0, blocking=blocking)

    # Working set starts empty; rows join through the ratio test. Smallest
    # index wins all ties (Bland's rule) so degenerate vertices cannot cycle.
    working: list[int] = []

    def stack_active(ws):
        parts = []
        rhs = []
        if has_eq:
            parts.append(A_eq)
            rhs.append(b_eq)
        if ws:
            parts.append(C[ws])
            rhs.append(d[ws])
        if parts:
            return np.vstack(parts), np.concatenate(rhs)
        return None, None

    for it in range(1, max_iter + 1):
        A, b = stack_active(working)
        p, lam = _kkt_solve(H, g, A, b, x)
        if float(np.linalg.norm(p, ord=np.inf)) < tol:
            n_eq = A_eq.shape[0] if has_eq else 0
            # KKT system is written with +A^T lam; standard >=-constraint
            # multipliers are the negation
            lam_ineq = -lam[n_eq:]
            if lam_ineq.size == 0 or np.min(lam_ineq) >= -tol:
                return QPResult(x, "optimal", it, active=list(working), multipliers=lam_ineq)
            negative = [k for k, v in enumerate(lam_ineq) if v < -tol]
            drop = min(negative, key=lambda k: working[k])
            working = working[:drop] + working[drop + 1 :]
            continue
        # ratio test against rows not in the working set
        alpha = 1.0
        blocker = -1
        if m:
            mask = np.ones(m, dtype=bool)
            mask[working] = False
            idx = np.nonzero(mask)[0]
            Cp = C[idx] @ p
            slack = C[idx] @ x - d[idx]
            closing = Cp < -1e-14
            if np.any(closing):
                ratios = np.maximum(slack[closing], 0.0) / (-Cp[closing])
                best = float(np.min(ratios))
                if best < alpha:
                    alpha = best
                    ties = np.nonzero(ratios <= best + 1e-14)[0]
                    blocker = int(np.min(idx[closing][ties]))
        x = x + alpha * p
        if blocker >= 0:
            trial = working + [blocker]
            A_trial, _ = stack_active(trial)
            if np.linalg.matrix_rank(A_trial, tol=1e-10) == A_trial.shape[0]:
                working = sorted(trial)
            # dependent blocker: step was still taken up to the boundary
    return QPResult(x, "max_iter", max_iter, active=list(working))
