"""Schmidt data, purifications, modular conjugations and the intermediate type I algebra.

Four-group setups use one tensor factor per group: factor ``k`` carries the
algebra of group ``k + 1``. The modular data are taken for the full algebra of
factors (1, 2) with commutant the full algebra of factors (0, 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .entropy import von_neumann_entropy
from .errors import AlgebraError, DimensionError, NotCyclicSeparatingError
from .star_algebra import StarAlgebra, factor_algebra, factor_decomposition, generate, subalgebra_entropy
from .tensor_core import (
    TensorSpace,
    adjoint,
    check_density,
    embed,
    local_generators,
    partial_trace,
    permutation_matrix,
    projector,
    sqrtm_psd,
)

RANK_TOL = 1e-10
STATE_TOL = 1e-10
FACTORIZATION_TOL = 1e-8

INTERMEDIATE_CUT = ((1, 2), (0, 3))


class Schmidt(NamedTuple):
    """``v = sum_i values[i] * left[:, i] (x) right[:, i]``."""

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.sum(self.values > RANK_TOL))


def _cut_matrix(v: np.ndarray, space: TensorSpace, left: Sequence[int], right: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != space.total_dim:
        raise DimensionError(f"vector of length {v.shape[0]} on a space of dimension {space.total_dim}")
    order = list(left) + list(right)
    if sorted(order) != list(range(space.n_factors)):
        raise DimensionError(f"cut {left}|{right} is not a partition of the factors")
    return v.reshape(space.dims).transpose(order).reshape(space.dim_of(left), space.dim_of(right))


def complement(space: TensorSpace, factors: Sequence[int]) -> tuple[int, ...]:
    return tuple(k for k in range(space.n_factors) if k not in set(factors))


def schmidt(v: np.ndarray, space: TensorSpace, left: Sequence[int], right: Sequence[int] | None = None, complete: bool = False) -> Schmidt:
    """Schmidt decomposition across ``left | right``, values descending.

    With ``complete=True`` both bases are completed to full orthonormal bases
    of their sides (the padding values are zero).
    """
    left = tuple(left)
    right = complement(space, left) if right is None else tuple(right)
    t = _cut_matrix(v, space, left, right)
    u, s, vh = np.linalg.svd(t, full_matrices=complete)
    if complete:
        k = max(t.shape)
        s = np.concatenate([s, np.zeros(k - len(s))])
        return Schmidt(s, u, vh.T)
    return Schmidt(s, u, vh.T)


def purify(rho: np.ndarray) -> np.ndarray:
    """Vector on F (x) mirror(F) whose coefficient matrix is rho^(1/2).

    This representative is fixed by swap-then-conjugate on the doubled space.
    """
    rho = check_density(rho)
    return sqrtm_psd(rho).reshape(-1)


def symmetric_purification(rho14: np.ndarray, d1: int, d4: int) -> np.ndarray:
    """Four-factor vector with dims (d1, d1, d4, d4) purifying ``rho14`` on factors (0, 3).

    Amplitudes are ``(rho14^(1/2))[(x1 x4), (x2 x3)]``: factor 1 mirrors factor 0
    and factor 2 mirrors factor 3.
    """
    rho14 = check_density(rho14, d1 * d4)
    root = sqrtm_psd(rho14).reshape(d1, d4, d1, d4)
    return root.transpose(0, 2, 3, 1).reshape(-1)


@dataclass(frozen=True, eq=False)
class AntiUnitary:
    """``v -> unitary @ conj(v)`` in the computational basis."""

    unitary: np.ndarray

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.unitary @ np.conj(v)

    def conjugate_operator(self, x: np.ndarray) -> np.ndarray:
        """J x J as a matrix."""
        return self.unitary @ np.conj(x) @ adjoint(self.unitary)

    def involution_defect(self) -> float:
        n = self.unitary.shape[0]
        return float(np.linalg.norm(self.unitary @ np.conj(self.unitary) - np.eye(n)))

    def unitarity_defect(self) -> float:
        n = self.unitary.shape[0]
        return float(np.linalg.norm(adjoint(self.unitary) @ self.unitary - np.eye(n)))


@dataclass(frozen=True, eq=False)
class ModularPair:
    """Modular operator and conjugation of B(H_left) (x) 1 for the vector ``omega``."""

    space: TensorSpace
    omega: np.ndarray
    left: tuple
    right: tuple
    delta: np.ndarray
    conjugation: AntiUnitary
    schmidt_values: np.ndarray

    def invariant_defects(self) -> dict:
        j = self.conjugation
        return {
            "J_omega": float(np.linalg.norm(j.apply(self.omega) - self.omega)),
            "delta_omega": float(np.linalg.norm(self.delta @ self.omega - self.omega)),
            "J_squared": j.involution_defect(),
        }

    def left_algebra(self) -> StarAlgebra:
        return factor_algebra(self.space, self.left)

    def commutant_defect(self) -> float:
        """Largest ``||[J b J, c]||`` over basis elements b of the left algebra and generators c of it."""
        left = self.left_algebra()
        worst = 0.0
        for b in left.basis:
            jbj = self.conjugation.conjugate_operator(b)
            for c in left.generators:
                worst = max(worst, float(np.linalg.norm(jbj @ c - c @ jbj)))
        return worst


def modular_pair(
    omega: np.ndarray,
    space: TensorSpace,
    left: Sequence[int],
    right: Sequence[int] | None = None,
    allow_degenerate: bool = False,
) -> ModularPair:
    """Modular data of the full algebra on ``left`` for the vector ``omega``.

    The vector must have full Schmidt rank with equal side dimensions. With
    ``allow_degenerate=True`` a rank-deficient vector is accepted: the Schmidt
    bases are completed and ``rho_right`` is pseudo-inverted, which yields a
    conjugation that still fixes ``omega`` and maps the left algebra onto its
    commutant, but is no longer unique.
    """
    left = tuple(left)
    right = complement(space, left) if right is None else tuple(right)
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(omega) - 1) > STATE_TOL:
        raise DimensionError("reference vector is not normalized")
    dl, dr = space.dim_of(left), space.dim_of(right)
    if dl != dr:
        raise NotCyclicSeparatingError(f"cut sides have dimensions {dl} and {dr}")
    sch = schmidt(omega, space, left, right, complete=True)
    if sch.rank < dl and not allow_degenerate:
        raise NotCyclicSeparatingError(f"Schmidt rank {sch.rank} below side dimension {dl}")
    e, f = sch.left, sch.right
    w = e @ f.T
    # J acts on cut-ordered coefficient matrices as X -> W X^dagger W
    u_cut = np.einsum("cb,ae->ceab", w, w).reshape(dl * dr, dl * dr)
    p = sch.values**2
    rho_l = (e * p) @ adjoint(e)
    inv_p = np.where(p > RANK_TOL**2, 1.0 / np.where(p > 0, p, 1.0), 0.0)
    rho_r_inv = (f * inv_p) @ adjoint(f)
    delta_cut = np.kron(rho_l, rho_r_inv)
    perm = permutation_matrix(space, left + right)
    u_std = perm.T @ u_cut @ perm
    delta = perm.T @ delta_cut @ perm
    return ModularPair(space, omega, left, right, delta, AntiUnitary(u_std), sch.values)


def operator_schmidt_values(x: np.ndarray, space: TensorSpace, side: Sequence[int]) -> np.ndarray:
    """Singular values of ``x`` viewed as a vector in B(H_side) (x) B(H_rest)."""
    side = list(side)
    rest = list(complement(space, side))
    nf = space.n_factors
    t = np.asarray(x).reshape(space.dims * 2)
    t = t.transpose(side + [nf + k for k in side] + rest + [nf + k for k in rest])
    da, db = space.dim_of(side), space.dim_of(rest)
    return np.linalg.svd(t.reshape(da * da, db * db), compute_uv=False)


def conjugation_factorization_check(pair: ModularPair, side: Sequence[int] = (0, 1)) -> bool:
    """True iff the unitary part of J is a tensor product across ``side | rest`` (up to phase)."""
    s = operator_schmidt_values(pair.conjugation.unitary, pair.space, side)
    return bool(s[1] <= FACTORIZATION_TOL * s[0]) if len(s) > 1 else True


@dataclass(frozen=True, eq=False)
class SplitSetup:
    """Pure state on four factors, one per group.

    The vector must be cyclic and separating for the full algebra of factors
    (1, 2); ``allow_degenerate`` relaxes this as described in
    :func:`modular_pair`.
    """

    space: TensorSpace
    omega: np.ndarray
    allow_degenerate: bool = False

    def __post_init__(self):
        if self.space.n_factors != 4:
            raise DimensionError("a split setup needs exactly four factors")
        omega = np.asarray(self.omega, dtype=complex).reshape(-1)
        if omega.shape[0] != self.space.total_dim:
            raise DimensionError("vector length does not match the space")
        if abs(np.linalg.norm(omega) - 1) > STATE_TOL:
            raise DimensionError("reference vector is not normalized")
        object.__setattr__(self, "omega", omega)
        # validates the cut eagerly
        _ = self.pair

    @classmethod
    def from_vector(cls, dims: Sequence[int], omega: np.ndarray, allow_degenerate: bool = False, normalize: bool = False) -> "SplitSetup":
        omega = np.asarray(omega, dtype=complex).reshape(-1)
        if normalize:
            omega = omega / np.linalg.norm(omega)
        return cls(TensorSpace(tuple(dims)), omega, allow_degenerate)

    @cached_property
    def pair(self) -> ModularPair:
        left, right = INTERMEDIATE_CUT
        return modular_pair(self.omega, self.space, left, right, allow_degenerate=self.allow_degenerate)

    @property
    def conjugation(self) -> AntiUnitary:
        return self.pair.conjugation

    def is_cyclic_separating(self) -> bool:
        return int(np.sum(self.pair.schmidt_values > RANK_TOL)) == self.space.dim_of(INTERMEDIATE_CUT[0])

    def rho14(self) -> np.ndarray:
        t = _cut_matrix(self.omega, self.space, (0, 3), (1, 2))
        return t @ adjoint(t)

    def group_generators(self, k: int) -> list[np.ndarray]:
        return [embed(g, self.space, [k]) for g in local_generators(self.space.dims[k])]

    @cached_property
    def mirrored_generators(self) -> list[np.ndarray]:
        """J a J for the generators a of group 1."""
        return [self.conjugation.conjugate_operator(g) for g in self.group_generators(0)]

    @cached_property
    def dl_algebra(self) -> StarAlgebra:
        return dl_intermediate(self)

    @cached_property
    def dl_blocks(self):
        return factor_decomposition(self.dl_algebra, seed=0)

    def dl_entropy(self) -> float:
        return subalgebra_entropy(self.omega, self.dl_algebra, blocks=self.dl_blocks)


def dl_intermediate(setup: SplitSetup, tol: float = 1e-8) -> StarAlgebra:
    """Algebra generated by group 1 and its mirror image under the conjugation of groups 2, 3."""
    a1 = setup.group_generators(0)
    a2 = setup.mirrored_generators
    alg = generate(setup.space, a1 + a2)
    for c in setup.group_generators(3):
        for g in a1 + a2:
            if np.linalg.norm(g @ c - c @ g) > tol * max(1.0, np.linalg.norm(g)):
                raise AlgebraError("intermediate algebra fails to commute with group 4")
    if any(alg.span_defect(g) > tol for g in a1):
        raise AlgebraError("intermediate algebra does not contain group 1")
    return alg


def intermediate_entropy(setup: SplitSetup, factors: Sequence[int] = (0, 1)) -> float:
    """Entropy of the state on the full algebra of ``factors`` (a fixed product intermediate algebra)."""
    return von_neumann_entropy(partial_trace(projector(setup.omega), setup.space, factors))


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over phases of ||a - e^{i t} b||."""
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def tomita_defect(pair: ModularPair, x: np.ndarray) -> float:
    """``|| J Delta^(1/2) x Omega - x^dagger Omega ||`` for x in the left algebra."""
    w, v = np.linalg.eigh((pair.delta + adjoint(pair.delta)) / 2)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ adjoint(v)
    lhs = pair.conjugation.apply(root @ x @ pair.omega)
    return float(np.linalg.norm(lhs - adjoint(x) @ pair.omega))


def max_entangled(d: int) -> np.ndarray:
    return np.eye(d).reshape(-1) / math.sqrt(d)
