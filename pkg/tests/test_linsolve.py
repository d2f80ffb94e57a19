import numpy as np
import pytest
from scipy.linalg import lu_factor, lu_solve

from skanfem.assembly import BandedSystem, apply_dirichlet, assemble_u_system
from skanfem.linsolve import (
    KrylovConfig,
    KrylovNotConverged,
    ZeroPivotError,
    solve_direct,
    solve_krylov,
    ssor_apply,
)
from skanfem.mesh import uniform_mesh
from skanfem.model import FlowParams, bc_values
from skanfem.picard import initial_guess


def _dominant(rng, n, symmetric=False):
    lower = rng.uniform(-1.0, 1.0, n)
    upper = np.roll(lower, -1) if symmetric else rng.uniform(-1.0, 1.0, n)
    lower[0] = 0.0
    upper[-1] = 0.0
    diag = np.abs(lower) + np.abs(upper) + rng.uniform(0.1, 2.0, n)
    diag *= rng.choice([-1.0, 1.0], n) if not symmetric else 1.0
    return BandedSystem(lower, diag, upper, rng.normal(size=n))


def _dense_oracle(system):
    return lu_solve(lu_factor(system.to_dense()), system.rhs)


def test_direct_identity():
    r = np.array([1.0, -2.0, 3.5])
    sys_ = BandedSystem(np.zeros(3), np.ones(3), np.zeros(3), r)
    np.testing.assert_array_equal(solve_direct(sys_), r)


def test_direct_laplacian():
    lap = BandedSystem(np.array([0.0, -1.0, 0.0]), np.array([1.0, 2.0, 1.0]), np.array([0.0, -1.0, 0.0]),
                       np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(solve_direct(lap), [0.0, 0.5, 1.0])


def test_direct_50_dominant():
    rng = np.random.default_rng(50)
    sys_ = _dominant(rng, 50)
    np.testing.assert_allclose(solve_direct(sys_), _dense_oracle(sys_), rtol=0, atol=1e-10)


def test_direct_100_random_systems():
    rng = np.random.default_rng(100)
    for _ in range(100):
        sys_ = _dominant(rng, int(rng.integers(1, 101)))
        x = solve_direct(sys_)
        ref = _dense_oracle(sys_)
        assert np.abs(x - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


def test_direct_zero_pivot():
    sys_ = BandedSystem(np.zeros(2), np.zeros(2), np.zeros(2), np.ones(2))
    with pytest.raises(ZeroPivotError):
        solve_direct(sys_)


def test_krylov_identity_one_iteration():
    r = np.arange(1.0, 6.0)
    sys_ = BandedSystem(np.zeros(5), np.ones(5), np.zeros(5), r)
    x, its = solve_krylov(sys_)
    np.testing.assert_allclose(x, r)
    assert its <= 1


def test_krylov_spd_matches_direct():
    rng = np.random.default_rng(7)
    sys_ = _dominant(rng, 80, symmetric=True)
    x, _ = solve_krylov(sys_)
    ref = solve_direct(sys_)
    assert np.linalg.norm(x - ref) / np.linalg.norm(ref) <= 1e-8


def test_krylov_u_system_m1():
    params = FlowParams.from_m(1.0)
    mesh = uniform_mesh(0.0, 8.0, 16)
    bc = bc_values(params)
    sys_ = assemble_u_system(mesh, initial_guess(mesh, bc), params.beta)
    sys_ = apply_dirichlet(apply_dirichlet(sys_, 0, bc.u_at_0), 16, bc.u_at_inf)
    x, _ = solve_krylov(sys_)
    ref = solve_direct(sys_)
    assert np.linalg.norm(x - ref) / np.linalg.norm(ref) <= 1e-8


def test_krylov_restart_history_monotone():
    rng = np.random.default_rng(21)
    for _ in range(10):
        sys_ = _dominant(rng, 200)
        hist = []
        solve_krylov(sys_, cfg=KrylovConfig(restart=3), history=hist)
        assert len(hist) >= 2
        assert all(b <= a * (1 + 1e-12) for a, b in zip(hist, hist[1:]))


def test_krylov_not_converged():
    rng = np.random.default_rng(4)
    sys_ = _dominant(rng, 100)
    with pytest.raises(KrylovNotConverged) as err:
        solve_krylov(sys_, cfg=KrylovConfig(max_iters=1, restart=1))
    assert err.value.relres > err.value.tol


def test_krylov_zero_rhs():
    sys_ = BandedSystem(np.zeros(3), np.ones(3), np.zeros(3), np.zeros(3))
    x, its = solve_krylov(sys_, x0=np.ones(3))
    np.testing.assert_array_equal(x, 0.0)
    assert its == 0


@pytest.mark.parametrize("omega", [0.5, 1.0, 1.5])
def test_ssor_linear(omega):
    rng = np.random.default_rng(8)
    for _ in range(20):
        sys_ = _dominant(rng, 30)
        x, y = rng.normal(size=(2, 30))
        a, b = rng.normal(size=2)
        lhs = ssor_apply(sys_, a * x + b * y, omega)
        rhs = a * ssor_apply(sys_, x, omega) + b * ssor_apply(sys_, y, omega)
        assert np.abs(lhs - rhs).max() <= 1e-13 * max(1.0, np.abs(lhs).max())


def test_ssor_omega_one_is_symmetric_gauss_seidel():
    rng = np.random.default_rng(12)
    sys_ = _dominant(rng, 10)
    A = sys_.to_dense()
    D = np.diag(np.diag(A))
    L = np.tril(A, -1)
    U = np.triu(A, 1)
    M = (D + L) @ np.linalg.solve(D, D + U)
    r = rng.normal(size=10)
    np.testing.assert_allclose(ssor_apply(sys_, r, 1.0), np.linalg.solve(M, r), rtol=1e-12)


def test_ssor_zero_diagonal():
    sys_ = BandedSystem(np.zeros(2), np.array([1.0, 0.0]), np.zeros(2), np.ones(2))
    with pytest.raises(ZeroPivotError):
        ssor_apply(sys_, np.ones(2))


@pytest.mark.parametrize("kw", [dict(tol=0.0), dict(restart=0), dict(max_iters=0), dict(relaxation=2.0)])
def test_krylov_config_validated(kw):
    with pytest.raises(ValueError):
        KrylovConfig(**kw)
