import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from msplit.errors import DimensionError, DimensionGuardError, NotDensityError, NotHermitianError, SingularLogError
from msplit.tensor_core import (
    TensorSpace,
    adjoint,
    apply_on_factors,
    embed,
    embed_factor,
    hermitian_basis,
    hermitian_eig,
    hs_inner,
    operator_function,
    partial_trace,
    permutation_matrix,
    permute_vector,
    projector,
    tensor_product,
)
from oracles import SIGMA_X, SIGMA_Z

from msplit.ensembles import random_density, random_hermitian


def test_space_invariants():
    sp = TensorSpace((2, 3, 2))
    assert sp.total_dim == 12 and sp.n_factors == 3
    with pytest.raises(DimensionError):
        TensorSpace((2, 0))
    with pytest.raises(DimensionError):
        sp.check_factor(3)


def test_dimension_guard(monkeypatch):
    with pytest.raises(DimensionGuardError):
        TensorSpace((3, 3, 3, 3))
    monkeypatch.setenv("MSPLIT_MAX_DIM", "81")
    assert TensorSpace((3, 3, 3, 3)).total_dim == 81


def test_tensor_product_examples(rng):
    assert_allclose(tensor_product(np.eye(2), np.eye(3)), np.eye(6))
    assert_allclose(tensor_product(SIGMA_Z, np.eye(2)), np.diag([1, 1, -1, -1]))
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    assert np.trace(tensor_product(a, b)) == pytest.approx(np.trace(a) * np.trace(b))


def test_tensor_product_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) for _ in range(4))
    assert_allclose(tensor_product(a, b) @ tensor_product(c, d), tensor_product(a @ c, b @ d))


def test_embed_factor_examples():
    sp = TensorSpace((2, 2))
    assert_allclose(embed_factor(SIGMA_Z, sp, 0), np.diag([1, 1, -1, -1]))
    assert_allclose(embed_factor(np.eye(2), sp, 1), np.eye(4))
    x0, x1 = embed_factor(SIGMA_X, sp, 0), embed_factor(SIGMA_Z, sp, 1)
    assert_allclose(x0 @ x1 - x1 @ x0, 0)
    with pytest.raises(DimensionError):
        embed_factor(np.eye(3), sp, 0)
    with pytest.raises(DimensionError):
        embed_factor(np.eye(2), sp, 2)


def test_embed_matches_kron_in_any_order(rng):
    sp = TensorSpace((2, 3, 2))
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    full = embed(np.kron(a, b), sp, [2, 0])
    assert_allclose(full, embed_factor(b, sp, 0) @ embed_factor(a, sp, 2))


def test_apply_on_factors_matches_embed(rng):
    sp = TensorSpace((2, 3, 2, 2))
    op = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    v = rng.normal(size=sp.total_dim) + 0j
    assert_allclose(apply_on_factors(op, v, sp, [3, 1]), embed(op, sp, [3, 1]) @ v, atol=1e-12)


def test_permutation_matrix_matches_vector_permutation(rng):
    sp = TensorSpace((2, 3, 4))
    v = rng.normal(size=24)
    assert_allclose(permutation_matrix(sp, (2, 0, 1)) @ v, permute_vector(v, sp, (2, 0, 1)))


def test_partial_trace_examples():
    sp = TensorSpace((2, 2))
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert_allclose(partial_trace(projector(bell), sp, [0]), np.eye(2) / 2, atol=1e-12)
    rho, sig = np.diag([0.3, 0.7]), np.diag([0.5, 0.5])
    assert_allclose(partial_trace(np.kron(rho, sig), sp, [0]), rho)
    assert partial_trace(np.kron(rho, sig), sp, [])[0, 0] == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), sp, [2])


def test_partial_trace_composition(rng):
    sp = TensorSpace((2, 3, 2))
    rho = random_density(12, rng)
    inner = partial_trace(rho, sp, [0, 1])
    assert_allclose(partial_trace(inner, TensorSpace((2, 3)), [0]), partial_trace(rho, sp, [0]), atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_partial_trace_over_everything_is_trace(seed):
    rng = np.random.default_rng(seed)
    sp = TensorSpace((2, 3))
    x = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert abs(partial_trace(x, sp, [])[0, 0] - np.trace(x)) <= 1e-10 * max(1, abs(np.trace(x)))


@given(st.integers(0, 2**32 - 1))
def test_tensor_then_trace_second_slot(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    out = partial_trace(tensor_product(a, b), TensorSpace((2, 3)), [0])
    assert_allclose(out, a * np.trace(b), atol=1e-10)


def test_hermitian_eig_examples(rng):
    w, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert_allclose(w, [3, 2, 1])
    plus = np.array([1, 1]) / np.sqrt(2)
    assert_allclose(hermitian_eig(projector(plus))[0], [1, 0], atol=1e-12)
    h = random_hermitian(8, rng)
    w, v = hermitian_eig(h)
    assert np.linalg.norm(v @ np.diag(w) @ adjoint(v) - h) <= 1e-9 * np.linalg.norm(h)
    assert_allclose(adjoint(v) @ v, np.eye(8), atol=1e-12)
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_eigenvalues_sum_to_trace(seed, d):
    h = random_hermitian(d, np.random.default_rng(seed))
    w, _ = hermitian_eig(h)
    assert abs(w.sum() - np.trace(h).real) <= 1e-9 * max(1, np.abs(w).sum())


def test_operator_function_examples(rng):
    assert_allclose(operator_function(np.diag([4.0, 9.0]), "sqrt"), np.diag([2, 3]), atol=1e-12)
    assert_allclose(operator_function(np.eye(3), "ln"), 0, atol=1e-12)
    h = random_density(5, rng, 3)
    r = operator_function(h, "sqrt")
    assert np.linalg.norm(r @ r - h) <= 1e-8
    with pytest.raises(SingularLogError):
        operator_function(np.diag([1.0, 0.0]), "ln")
    with pytest.raises(NotDensityError):
        operator_function(np.diag([1.0, -0.1]), "sqrt")
    # eigenvalues in [-1e-10, 0) are clipped
    assert_allclose(operator_function(np.diag([1.0, -1e-11]), "sqrt"), np.diag([1, 0]))


@given(st.lists(st.floats(0, 10), min_size=3, max_size=3), st.lists(st.floats(0, 10), min_size=3, max_size=3))
def test_sqrt_monotone_on_commuting_pairs(a, b):
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    diff = operator_function(np.diag(hi), "sqrt") - operator_function(np.diag(lo), "sqrt")
    assert np.linalg.eigvalsh(diff).min() >= -1e-12


def test_hs_inner_examples(rng):
    assert hs_inner(np.eye(2), np.eye(2)) == pytest.approx(2)
    assert hs_inner(SIGMA_X, SIGMA_Z) == pytest.approx(0)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert hs_inner(a, b) == pytest.approx(np.conj(hs_inner(b, a)))
    assert hs_inner(a, a).real >= 0
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_hermitian_basis_is_orthonormal(d):
    basis = hermitian_basis(d)
    assert len(basis) == d * d
    gram = np.array([[hs_inner(a, b) for b in basis] for a in basis])
    assert_allclose(gram, np.eye(d * d), atol=1e-12)
    assert all(np.allclose(b, adjoint(b)) for b in basis)
