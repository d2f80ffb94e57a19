import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skanfem.mesh import (
    Mesh1D,
    NodalField,
    coarsen,
    evaluate,
    refine,
    transfer,
    uniform_mesh,
)


def test_uniform_mesh_table_setup():
    mesh = uniform_mesh(0.0, 8.0, 8)
    np.testing.assert_array_equal(mesh.nodes, np.arange(9.0))


def test_uniform_mesh_minimal():
    np.testing.assert_array_equal(uniform_mesh(0.0, 1.0, 1).nodes, [0.0, 1.0])


def test_uniform_mesh_spacing():
    np.testing.assert_allclose(uniform_mesh(0.0, 8.0, 4).h, 2.0)


@pytest.mark.parametrize("a, b, n", [(1.0, 0.0, 4), (0.0, 0.0, 4), (0.0, 1.0, 0), (0.0, 1.0, 2.5)])
def test_uniform_mesh_errors(a, b, n):
    with pytest.raises(ValueError):
        uniform_mesh(a, b, n)


def test_mesh_invariants_enforced():
    with pytest.raises(ValueError):
        Mesh1D([0.0])
    with pytest.raises(ValueError):
        Mesh1D([0.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        Mesh1D([0.0, 1.0, 1.0])


def test_refine_first_element():
    mesh = refine(uniform_mesh(0.0, 8.0, 8), {0})
    assert mesh.n_elements == 9
    assert mesh.nodes[1] == 0.5


def test_refine_nothing_is_identity():
    mesh = uniform_mesh(0.0, 8.0, 8)
    assert refine(mesh, set()) == mesh


def test_refine_all_halves_everything():
    mesh = uniform_mesh(0.0, 8.0, 8)
    fine = refine(mesh, set(range(8)))
    assert fine.n_elements == 16
    np.testing.assert_allclose(fine.h, 0.5)


def test_refine_rejects_bad_flags():
    with pytest.raises(IndexError):
        refine(uniform_mesh(0.0, 1.0, 2), {2})


def _field(mesh, f=None, u=None):
    f = np.zeros(mesh.n_nodes) if f is None else f
    u = np.zeros(mesh.n_nodes) if u is None else u
    return NodalField(mesh, f, u)


def test_field_length_checked():
    mesh = uniform_mesh(0.0, 1.0, 2)
    with pytest.raises(ValueError):
        NodalField(mesh, np.zeros(2), np.zeros(3))


def test_coarsen_all_above_threshold_is_identity():
    mesh = uniform_mesh(0.0, 8.0, 8)
    new_mesh, _ = coarsen(mesh, _field(mesh), np.ones(8), 0.5)
    assert new_mesh == mesh


@pytest.mark.parametrize("n", [2, 7, 8])
def test_coarsen_tiny_indicators_merges_pairs(n):
    mesh = uniform_mesh(0.0, 8.0, n)
    new_mesh, new_field = coarsen(mesh, _field(mesh), np.full(n, 1e-9), 1.0)
    assert new_mesh.n_elements == -(-n // 2)
    assert new_mesh.a == 0.0 and new_mesh.b == 8.0
    assert new_field.mesh is new_mesh


def test_coarsen_keeps_values_at_surviving_nodes():
    mesh = uniform_mesh(0.0, 4.0, 4)
    u = np.array([0.0, 3.0, 1.0, 7.0, 2.0])
    new_mesh, fld = coarsen(mesh, _field(mesh, u=u), np.zeros(4), 1.0)
    np.testing.assert_array_equal(new_mesh.nodes, [0.0, 2.0, 4.0])
    np.testing.assert_array_equal(fld.u_vals, [0.0, 1.0, 2.0])


def test_coarsen_needs_two_elements():
    mesh = uniform_mesh(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        coarsen(mesh, _field(mesh), np.zeros(1), 1.0)


def test_transfer_same_mesh():
    mesh = uniform_mesh(0.0, 8.0, 8)
    rng = np.random.default_rng(1)
    fld = _field(mesh, rng.normal(size=9), rng.normal(size=9))
    out = transfer(fld, mesh)
    np.testing.assert_array_equal(out.f_vals, fld.f_vals)
    np.testing.assert_array_equal(out.u_vals, fld.u_vals)


def test_transfer_linear_midpoints():
    mesh = uniform_mesh(0.0, 8.0, 8)
    fld = _field(mesh, u=mesh.nodes / 8.0)
    fine = refine(mesh, set(range(8)))
    out = transfer(fld, fine)
    mids = out.u_vals[1::2]
    np.testing.assert_allclose(mids, 0.5 * (fld.u_vals[:-1] + fld.u_vals[1:]), rtol=0, atol=1e-15)
    np.testing.assert_array_equal(out.u_vals[::2], fld.u_vals)


def test_transfer_domain_mismatch():
    fld = _field(uniform_mesh(0.0, 8.0, 8))
    with pytest.raises(ValueError):
        transfer(fld, uniform_mesh(0.0, 9.0, 8))


def test_transfer_error_bound_against_oracle(oracle):
    # interpolation error of f is bounded by h^2/8 max|f''|, f'' = u'
    res = oracle(1.0)
    coarse = uniform_mesh(0.0, 8.0, 16)
    fine = refine(refine(coarse, set(range(16))), set(range(32)))
    fc, uc, _ = res.interpolate(coarse.nodes)
    ff, _, _ = res.interpolate(fine.nodes)
    out = transfer(NodalField(coarse, fc, uc), fine)
    fpp_max = np.abs(res.profile[:, 3]).max()
    bound = coarse.h.max() ** 2 / 8.0 * fpp_max
    assert np.abs(out.f_vals - ff).max() <= bound


def test_evaluate():
    mesh = uniform_mesh(0.0, 8.0, 8)
    fld = _field(mesh, f=mesh.nodes**2, u=np.minimum(mesh.nodes, 1.0))
    assert evaluate(fld, 3.0) == (9.0, 1.0)
    assert evaluate(fld, 2.5) == (0.5 * (4.0 + 9.0), 1.0)
    assert evaluate(fld, 8.0)[1] == 1.0
    with pytest.raises(ValueError):
        evaluate(fld, 8.5)
    with pytest.raises(ValueError):
        evaluate(fld, -1e-9)


flag_lists = st.lists(st.lists(st.floats(0.0, 1.0), min_size=0, max_size=6), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(flag_lists, st.booleans())
def test_refine_coarsen_sequences_keep_mesh_valid(steps, do_coarsen):
    mesh = uniform_mesh(0.0, 8.0, 8)
    for fractions in steps:
        flags = {int(x * (mesh.n_elements - 1)) for x in fractions}
        mesh = refine(mesh, flags)
        if do_coarsen and mesh.n_elements > 1:
            ind = np.linspace(0.0, 1.0, mesh.n_elements)
            mesh, _ = coarsen(mesh, _field(mesh), ind, 0.3)
        assert np.all(np.diff(mesh.nodes) > 0)
        assert mesh.a == 0.0 and mesh.b == 8.0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.data())
def test_refine_then_coarsen_round_trip(n, data):
    base = refine(uniform_mesh(0.0, 8.0, n), set(data.draw(st.sets(st.integers(0, n - 1)))))
    flags = data.draw(st.sets(st.integers(0, base.n_elements - 1)))
    fine = refine(base, flags)
    # children of refined elements get tiny indicators, everything else large
    ind = np.full(fine.n_elements, 10.0)
    child_left = {float(base.nodes[j]) for j in flags}
    child_mid = {0.5 * (base.nodes[j] + base.nodes[j + 1]) for j in flags}
    for k, left in enumerate(fine.nodes[:-1]):
        if left in child_left or left in child_mid:
            ind[k] = 0.0
    back, _ = coarsen(fine, _field(fine), ind, 1.0) if fine.n_elements > 1 else (fine, None)
    np.testing.assert_array_equal(back.nodes, base.nodes)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.data())
def test_transfer_exact_for_submesh_linear(n, data):
    coarse = uniform_mesh(0.0, 8.0, n)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    fld = _field(coarse, rng.normal(size=n + 1), rng.normal(size=n + 1))
    fine = refine(coarse, set(data.draw(st.sets(st.integers(0, n - 1)))))
    fine = refine(fine, set(range(fine.n_elements)))
    out = transfer(fld, fine)
    ref_f = np.interp(fine.nodes, coarse.nodes, fld.f_vals)
    np.testing.assert_allclose(out.f_vals, ref_f, rtol=0, atol=1e-14)
    # common nodes preserved exactly
    common = np.isin(fine.nodes, coarse.nodes)
    np.testing.assert_array_equal(out.u_vals[common], fld.u_vals)
