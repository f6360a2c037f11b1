import numpy as np
import pytest

from qp_reference import solve_qp_enumerate
from wbteleop.qp import solve_qp


def random_psd(rng, n, cond=10.0):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    eig = np.linspace(1.0, cond, n)
    return Q @ np.diag(eig) @ Q.T


def test_unconstrained_matches_linear_solve():
    rng = np.random.default_rng(0)
    H = random_psd(rng, 6)
    g = rng.normal(size=6)
    res = solve_qp(H, g)
    assert res.status == "optimal"
    assert np.allclose(res.x, np.linalg.solve(H, -g), atol=1e-10)


def test_simple_bound():
    # min (x-2)^2 subject to x <= 1  →  x* = 1
    H = np.array([[2.0]])
    g = np.array([-4.0])
    C = np.array([[-1.0]])
    d = np.array([-1.0])
    res = solve_qp(H, g, C, d)
    assert res.status == "optimal"
    assert abs(res.x[0] - 1.0) < 1e-10
    assert res.active == [0]


def test_equality_constraint():
    rng = np.random.default_rng(1)
    H = random_psd(rng, 5)
    g = rng.normal(size=5)
    A = rng.normal(size=(2, 5))
    b = rng.normal(size=2)
    res = solve_qp(H, g, A_eq=A, b_eq=b)
    assert res.status == "optimal"
    assert np.allclose(A @ res.x, b, atol=1e-9)
    # KKT: gradient in row space of A
    grad = H @ res.x + g
    lam, *_ = np.linalg.lstsq(A.T, -grad, rcond=None)
    assert np.allclose(A.T @ lam, -grad, atol=1e-8)


def test_infeasible_reports_blocking_rows():
    H = np.eye(2)
    g = np.zeros(2)
    C = np.array([[1.0, 0.0], [-1.0, 0.0]])
    d = np.array([1.0, 0.0])  # x0 >= 1 and x0 <= 0
    res = solve_qp(H, g, C, d)
    assert res.status == "infeasible"
    assert len(res.blocking) >= 1


@pytest.mark.parametrize("seed", range(12))
def test_matches_enumeration_oracle_random_10var(seed):
    rng = np.random.default_rng(100 + seed)
    n = 10
    H = random_psd(rng, n, cond=50.0)
    g = rng.normal(size=n)
    m = 8
    C = rng.normal(size=(m, n))
    # keep the origin feasible so problems are guaranteed solvable
    d = -np.abs(rng.normal(size=m)) - 0.05
    res = solve_qp(H, g, C, d)
    assert res.status == "optimal"
    x_ref, obj_ref = solve_qp_enumerate(H, g, C, d)
    assert x_ref is not None
    obj = 0.5 * res.x @ H @ res.x + g @ res.x
    assert abs(obj - obj_ref) < 1e-8
    assert np.allclose(res.x, x_ref, atol=1e-8)


@pytest.mark.parametrize("seed", range(6))
def test_matches_enumeration_with_equalities(seed):
    rng = np.random.default_rng(300 + seed)
    n = 10
    H = random_psd(rng, n)
    g = rng.normal(size=n)
    C = rng.normal(size=(6, n))
    A = rng.normal(size=(2, n))
    x_feas = rng.normal(size=n) * 0.2
    b = A @ x_feas
    d = C @ x_feas - np.abs(rng.normal(size=6)) - 0.05
    res = solve_qp(H, g, C, d, A_eq=A, b_eq=b)
    assert res.status == "optimal"
    x_ref, obj_ref = solve_qp_enumerate(H, g, C, d, A_eq=A, b_eq=b)
    obj = 0.5 * res.x @ H @ res.x + g @ res.x
    assert abs(obj - obj_ref) < 1e-8


def test_active_set_multipliers_nonnegative():
    rng = np.random.default_rng(4)
    H = random_psd(rng, 4)
    g = rng.normal(size=4) * 3
    C = np.vstack([np.eye(4), -np.eye(4)])
    d = np.concatenate([-0.1 * np.ones(4), -0.1 * np.ones(4)])
    res = solve_qp(H, g, C, d)
    assert res.status == "optimal"
    if res.multipliers is not None and res.multipliers.size:
        assert np.min(res.multipliers) >= -1e-9
    assert np.min(C @ res.x - d) >= -1e-9


def test_warm_start_x0_respected():
    H = np.eye(3)
    g = np.array([-1.0, -1.0, -1.0])
    C = np.eye(3)
    d = np.zeros(3)
    res = solve_qp(H, g, C, d, x0=np.array([0.5, 0.5, 0.5]))
    assert res.status == "optimal"
    assert np.allclose(res.x, [1, 1, 1], atol=1e-10)
