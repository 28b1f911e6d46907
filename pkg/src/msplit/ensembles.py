"""Seeded random states, algebras and the fixed two-qubit-pair example vectors."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .bounds import SeparableDecomposition
from .modular import SplitSetup, symmetric_purification
from .star_algebra import StarAlgebra, from_blocks
from .tensor_core import TensorSpace


def haar_vector(n: int, rng) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(n: int, rng) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1), dtype=complex)


def random_hermitian(d: int, rng) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_density(n: int, rng, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed density of the given rank (full rank by default)."""
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def exchange_conjugate(v: np.ndarray, dims) -> np.ndarray:
    """Reverse the factor order (1<->4, 2<->3) and conjugate the amplitudes."""
    return np.conj(np.asarray(v).reshape(dims).transpose(3, 2, 1, 0).reshape(-1))


def random_symmetric_vector(d: int, rng) -> np.ndarray:
    """Haar vector on (d, d, d, d) symmetrized under :func:`exchange_conjugate`."""
    dims = (d,) * 4
    x = haar_vector(d**4, rng)
    v = x + exchange_conjugate(x, dims)
    return v / np.linalg.norm(v)


def random_separable(d1: int, d4: int, rng, max_terms: int = 6) -> SeparableDecomposition:
    """Mixture of 1..max_terms random product densities of random local ranks."""
    k = int(rng.integers(1, max_terms + 1))
    w = rng.dirichlet(np.ones(k))
    rho1s = [random_density(d1, rng, int(rng.integers(1, d1 + 1))) for _ in range(k)]
    rho4s = [random_density(d4, rng, int(rng.integers(1, d4 + 1))) for _ in range(k)]
    return SeparableDecomposition.from_weights(w, rho1s, rho4s, total=1.0)


def symmetric_setup(rho14: np.ndarray, d1: int, d4: int) -> SplitSetup:
    """Setup on (d1, d1, d4, d4) whose vector is the symmetric purification of rho14.

    Rank-deficient rho14 is allowed; the conjugation then rests on completed
    Schmidt bases.
    """
    return SplitSetup(TensorSpace((d1, d1, d4, d4)), symmetric_purification(rho14, d1, d4), allow_degenerate=True)


def product_setup(rho1: np.ndarray, rho4: np.ndarray | None = None) -> SplitSetup:
    """Purified product state; by default the second marginal is the conjugate of the first."""
    rho4 = np.conj(rho1) if rho4 is None else rho4
    return symmetric_setup(np.kron(rho1, rho4), rho1.shape[0], rho4.shape[0])


def random_block_algebra(pattern, rng) -> StarAlgebra:
    n = sum(d * m for d, m in pattern)
    return from_blocks(pattern, random_unitary(n, rng))


def _basis_sum(terms, dims=(2, 2, 2, 2)) -> np.ndarray:
    v = np.zeros(dims, dtype=complex)
    for idx in terms:
        v[idx] += 1.0
    v = v.reshape(-1)
    return v / np.linalg.norm(v)


def correlated_pairs_vector() -> np.ndarray:
    """(Phi_14 Phi_23 + Psi_14 Psi_23) on four qubits, with Phi = |00>+|11>, Psi = |01>+|10>.

    Its two-group state is the classically correlated mixture of the two Bell
    projectors, which is separable.
    """
    bits = (0, 1)
    phi = [(a, b, b, a) for a in bits for b in bits]
    psi = [(a, b, 1 - b, 1 - a) for a in bits for b in bits]
    return _basis_sum(phi + psi)


def bell_pairs_vector() -> np.ndarray:
    """Phi_14 (x) Phi_23: groups 1, 4 and groups 2, 3 each in a Bell pair."""
    return _basis_sum([(a, b, b, a) for a in (0, 1) for b in (0, 1)])


def bell_with_fixed_middle_vector() -> np.ndarray:
    """Phi_14 (x) |1>_2 |1>_3."""
    return _basis_sum([(a, 1, 1, a) for a in (0, 1)])
