import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from msplit.bounds import (
    DifferenceDecomposition,
    GramMixingData,
    SeparableDecomposition,
    default_frame,
    gram_mixing_check,
    greedy_partition,
    local_frame_states,
    lower_bounds,
    nonseparable_bound,
    nuclearity_upper,
    separable_bound,
    separable_decompose,
    triangle_check,
)
from msplit.ensembles import (
    bell_pairs_vector,
    haar_vector,
    random_density,
    random_separable,
    symmetric_setup,
)
from msplit.errors import FrameError
from msplit.modular import SplitSetup, max_entangled
from msplit.star_algebra import factor_algebra, full_algebra, scalars
from msplit.tensor_core import TensorSpace, projector
from oracles import (
    BELL_PAIRS_DL,
    BELL_PAIRS_I14,
    CORRELATED_DL,
    LAMBDA1_TWO_UNIT_TERMS,
    LAMBDA1_UNEQUAL,
    LN2,
    equal_weight_bound,
)

P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])


def _bell_projectors():
    phi = projector(np.array([1, 0, 0, 1]) / math.sqrt(2))
    psi = projector(np.array([0, 1, 1, 0]) / math.sqrt(2))
    return phi, psi


def test_separable_bound_examples():
    one = SeparableDecomposition([1.0], [P0], [P0])
    assert separable_bound(one) == 0.0
    for n in (2, 3, 5):
        dec = SeparableDecomposition.from_weights([1 / n] * n, [P0] * n, [P1] * n)
        assert separable_bound(dec) == pytest.approx(equal_weight_bound(n))
    # two-term decomposition of the correlated example's two-group state
    half = SeparableDecomposition.from_weights([0.5, 0.5], [np.eye(2) / 2] * 2, [np.eye(2) / 2] * 2)
    assert separable_bound(half) == pytest.approx(2 * LN2)
    assert CORRELATED_DL <= separable_bound(half)


def test_separable_decomposition_validation():
    with pytest.raises(ValueError):
        SeparableDecomposition([0.5, 0.5], [P0, P1], [P0, P1])
    with pytest.raises(ValueError):
        SeparableDecomposition([1.0, 0.0], [P0, P1], [P0, P1])


def test_nonseparable_bound_examples():
    dec1 = SeparableDecomposition.from_weights([0.3, 0.7], [P0, P1], [P1, P0])
    assert nonseparable_bound(DifferenceDecomposition(0.0, dec1)) == pytest.approx(separable_bound(dec1))
    two_unit = SeparableDecomposition.from_weights([1.0, 1.0], [P0, P1], [P0, P1], total=2.0)
    neg = SeparableDecomposition.from_weights([1.0], [np.eye(2) / 2], [np.eye(2) / 2], total=1.0)
    assert nonseparable_bound(DifferenceDecomposition(1.0, two_unit, neg)) == pytest.approx(LAMBDA1_TWO_UNIT_TERMS)
    unequal = SeparableDecomposition.from_weights([1.5, 0.5], [P0, P1], [P0, P1], total=2.0)
    assert nonseparable_bound(DifferenceDecomposition(1.0, unequal, neg)) == pytest.approx(LAMBDA1_UNEQUAL)
    with pytest.raises(ValueError):
        DifferenceDecomposition(1.0, dec1, neg)


def test_gram_mixing_examples(rng):
    nus = np.sqrt([0.2, 0.3, 0.5])
    ortho = GramMixingData(nus, np.eye(3))
    res = gram_mixing_check(ortho)
    assert res.holds and res.S_R == pytest.approx(res.S_N2)
    v = haar_vector(4, rng)
    same = gram_mixing_check(GramMixingData(nus, np.array([v, v, v])))
    assert same.holds and same.S_R == pytest.approx(0, abs=1e-10)
    assert same.S_N2 > 0


@given(st.integers(0, 2**32 - 1))
def test_gram_mixing_random_families(seed):
    rng = np.random.default_rng(seed)
    dim, k = int(rng.integers(4, 9)), int(rng.integers(2, 7))
    vecs = np.array([haar_vector(dim, rng) for _ in range(k)])
    data = GramMixingData(np.sqrt(rng.dirichlet(np.ones(k))), vecs)
    res = gram_mixing_check(data)
    assert res.holds
    # NGN and R share their nonzero spectrum
    assert res.S_NGN == pytest.approx(res.S_R, abs=1e-9)
    r, basis, c = data.eigendata()
    assert_allclose(c @ c.conj().T, np.eye(k), atol=1e-8)
    assert np.trace(data.R).real == pytest.approx(1)
    assert_allclose((basis * r) @ c[: len(r)], data.weighted, atol=1e-10)


def test_greedy_partition_groups_are_independent(rng):
    v = haar_vector(3, rng)
    w = haar_vector(3, rng)
    vecs = np.array([v, w, v, (v + w) / np.linalg.norm(v + w)])
    groups = greedy_partition(vecs)
    assert sorted(sum(groups, [])) == [0, 1, 2, 3]
    for g in groups:
        assert np.linalg.matrix_rank(vecs[g], tol=1e-8) == len(g)


def test_triangle_examples(rng):
    dims = (2, 2, 3)
    rab, rc = random_density(4, rng), random_density(3, rng)
    res = triangle_check(np.kron(rab, rc), dims)
    assert res.holds and res.S_total == pytest.approx(res.S_ab + res.S_c)
    pure = projector(haar_vector(12, rng))
    res = triangle_check(pure, dims)
    assert res.holds and res.S_ab == pytest.approx(res.S_c, abs=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_triangle_random(seed):
    rng = np.random.default_rng(seed)
    assert triangle_check(random_density(12, rng, int(rng.integers(1, 13))), (2, 3, 2)).holds


def test_lower_bounds_examples(rng):
    r1, r4 = random_density(2, rng), random_density(3, rng)
    lb = lower_bounds(np.kron(r1, r4), 2, 3, measured=0.0)
    assert lb.bound == pytest.approx(0, abs=1e-10) and lb.holds
    bell = projector(max_entangled(2))
    lb = lower_bounds(bell, 2, 2, measured=BELL_PAIRS_DL)
    assert lb.relative_entropy == pytest.approx(BELL_PAIRS_I14, abs=1e-10)
    assert lb.measured - lb.bound == pytest.approx(0, abs=1e-8)
    half = lower_bounds(bell, 2, 2, measured=LN2, dl_exact=False)
    assert half.bound == pytest.approx(LN2, abs=1e-10) and half.holds


def test_lower_bounds_flags_violations():
    assert not lower_bounds(projector(max_entangled(2)), 2, 2, measured=1.0).holds


@given(st.integers(0, 2**32 - 1))
def test_separable_upper_and_lower_bounds_on_dl_algebra(seed):
    rng = np.random.default_rng(seed)
    dec = random_separable(2, 2, rng)
    setup = symmetric_setup(dec.state(), 2, 2)
    s = setup.dl_entropy()
    assert s <= separable_bound(dec) + 1e-8
    assert lower_bounds(setup.rho14(), 2, 2, s).holds


@given(st.integers(0, 2**32 - 1))
def test_lower_bound_on_entangled_states(seed):
    rng = np.random.default_rng(seed)
    setup = SplitSetup.from_vector((2, 2, 2, 2), haar_vector(16, rng))
    assert lower_bounds(setup.rho14(), 2, 2, setup.dl_entropy()).holds


def test_lp_examples():
    prod = np.kron(P0, P1)
    dec = separable_decompose(prod, 2, 2)
    assert dec.n_terms == 1
    diff = separable_decompose(prod, 2, 2, mode="difference")
    assert diff.lam == pytest.approx(0, abs=1e-9)
    corr = (np.kron(P0, P0) + np.kron(P1, P1)) / 2
    dec = separable_decompose(corr, 2, 2)
    assert dec.n_terms == 2
    assert_allclose(dec.state(), corr, atol=1e-6)


def test_lp_entangled_state():
    bell = projector(max_entangled(2))
    assert separable_decompose(bell, 2, 2) is None
    diff = separable_decompose(bell, 2, 2, mode="difference")
    assert diff.lam > 0
    assert np.linalg.norm(diff.state() - bell) <= 1e-6
    setup = SplitSetup.from_vector((2, 2, 2, 2), bell_pairs_vector(), allow_degenerate=True)
    assert nonseparable_bound(diff) >= setup.dl_entropy()


def test_lp_frame_rank_check():
    with pytest.raises(FrameError):
        separable_decompose(np.eye(4) / 4, 2, 2, frame=[(P0, P0), (P1, P1)])


def test_default_frame_size():
    assert len(local_frame_states(2)) == 6
    assert len(default_frame(2, 2)) == 36 + 32


def test_nuclearity_examples(rng):
    sp = TensorSpace((2, 2))
    omega = haar_vector(4, rng)
    est = nuclearity_upper(np.zeros((4, 4)), 1.0, omega, scalars(sp))
    assert est.nu_1 == pytest.approx(1) and est.nu_ln == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        nuclearity_upper(np.zeros((4, 4)), 0.0, omega, scalars(sp))


def test_nuclearity_two_level_large_beta(rng):
    sp = TensorSpace((2,))
    omega = haar_vector(2, rng)
    h = np.diag([0.0, 1.0])
    vals = [nuclearity_upper(h, b, omega, full_algebra(sp)).nu_1 for b in (1.0, 5.0, 40.0)]
    assert vals[0] >= vals[1] >= vals[2]
    # the ground-state functional A -> <0|A omega> has norm ||omega||
    assert vals[2] == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0.05, 5.0))
def test_nuclearity_monotone_in_beta(seed, beta):
    rng = np.random.default_rng(seed)
    sp = TensorSpace((2, 2))
    h = random_density(4, rng) * 4
    omega = haar_vector(4, rng)
    a = factor_algebra(sp, [0])
    lo = nuclearity_upper(h, 2 * beta, omega, a)
    hi = nuclearity_upper(h, beta, omega, a)
    assert lo.nu_1 <= hi.nu_1 + 1e-12
    if np.all(hi.functional_norms <= 1):
        assert hi.nu_ln >= 0


@given(st.integers(0, 2**32 - 1))
def test_nu_p_nonincreasing_in_p(seed):
    rng = np.random.default_rng(seed)
    sp = TensorSpace((2, 2))
    est = nuclearity_upper(random_density(4, rng), 1.0, haar_vector(4, rng), full_algebra(sp))
    ps = [0.5, 1.0, 2.0, 4.0]
    vals = [est.nu_p(p) for p in ps]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
