"""Finite-dimensional *-subalgebras of a full matrix algebra.

An algebra is stored as an HS-orthonormal operator basis. Generated algebras,
commutants and centers are linear-algebra problems on the vectorized operator
space; the Artin-Wedderburn split into factor blocks uses generic elements
drawn from a seeded RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .entropy import shannon_entropy, von_neumann_entropy
from .errors import AlgebraError, DimensionError
from .tensor_core import (
    EIG_CLIP,
    TensorSpace,
    adjoint,
    check_density,
    embed,
    local_generators,
    matrix_units,
)

SPAN_TOL = 1e-8
PATTERN_TOL = 1e-7
MAX_RESAMPLES = 16
# commutant by nullspace above this ambient size would build an n^2 x n^2 system
NULLSPACE_MAX_N = 32


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """Unital *-subalgebra of B(H) given by an HS-orthonormal basis.

    ``basis`` has shape ``(dim, n, n)``. ``generators`` is the generating set
    the algebra was built from (empty when the basis itself is the only
    description); algorithms that only need a generating set use it because it
    is much smaller than the basis.
    """

    space: TensorSpace
    basis: np.ndarray
    generators: tuple = field(default=())

    def __post_init__(self):
        n = self.space.total_dim
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (n, n):
            raise DimensionError(f"basis shape {b.shape} does not fit dimension {n}")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "generators", tuple(np.asarray(g, dtype=complex) for g in self.generators))

    @property
    def n(self) -> int:
        return self.space.total_dim

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rows(self) -> np.ndarray:
        """Basis as orthonormal rows of length n^2."""
        return self.basis.reshape(self.dim, -1)

    def generating_set(self) -> list[np.ndarray]:
        return list(self.generators) if self.generators else list(self.basis)

    def project(self, x: np.ndarray) -> np.ndarray:
        """HS-orthogonal projection onto the algebra (the trace-preserving conditional expectation)."""
        v = np.asarray(x, dtype=complex).reshape(-1)
        coeffs = self.rows.conj() @ v
        return (coeffs @ self.rows).reshape(self.n, self.n)

    def span_defect(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=complex)
        nrm = np.linalg.norm(x)
        if nrm == 0:
            return 0.0
        return float(np.linalg.norm(x - self.project(x)) / nrm)

    def contains(self, x: np.ndarray, tol: float = SPAN_TOL) -> bool:
        return self.span_defect(x) <= tol

    def contains_algebra(self, other: "StarAlgebra", tol: float = SPAN_TOL) -> bool:
        return all(self.span_defect(b) <= tol for b in other.basis)


def _extend_orthonormal(q: np.ndarray, cands: np.ndarray, tol: float = SPAN_TOL) -> np.ndarray:
    """Orthonormal rows spanning the part of ``cands`` outside the row space of ``q``."""
    if cands.size == 0:
        return np.zeros((0, q.shape[1]), dtype=complex)
    scale = max(float(np.max(np.linalg.norm(cands, axis=1))), 1.0)
    r = cands
    for _ in range(2):
        if q.shape[0]:
            r = r - (r @ q.conj().T) @ q
    _, s, vh = np.linalg.svd(r, full_matrices=False)
    new = vh[s > tol * scale]
    if q.shape[0] and new.shape[0]:
        new = new - (new @ q.conj().T) @ q
        new, _ = np.linalg.qr(new.T)
        new = new.T
    return new


def _null_space(m: np.ndarray, rcond: float = SPAN_TOL) -> np.ndarray:
    """Orthonormal columns spanning the right nullspace, via a thin SVD when m is tall."""
    _, s, vh = np.linalg.svd(m, full_matrices=m.shape[0] < m.shape[1])
    # absolute floor: an all-zero commutator matrix has no rank
    cut = rcond * max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T


def _from_rows(space: TensorSpace, rows: np.ndarray, generators=()) -> StarAlgebra:
    n = space.total_dim
    return StarAlgebra(space, rows.reshape(-1, n, n), tuple(generators))


def generate(space: TensorSpace, generators: Sequence[np.ndarray], tol: float = SPAN_TOL) -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    The span is grown by left multiplication with the generators and their
    adjoints until it stops growing; since the seed span contains the identity
    the fixed point is the span of all words.
    """
    n = space.total_dim
    gens = []
    for g in generators:
        g = np.asarray(g, dtype=complex)
        if g.shape != (n, n):
            raise DimensionError(f"generator shape {g.shape} does not fit dimension {n}")
        nrm = np.linalg.norm(g)
        if nrm == 0:
            continue
        gens.append(g / nrm)
        if np.linalg.norm(g - adjoint(g)) > tol * nrm:
            gens.append(adjoint(g) / nrm)
    q = (np.eye(n, dtype=complex) / math.sqrt(n)).reshape(1, -1)
    frontier = _extend_orthonormal(q, np.array([g.reshape(-1) for g in gens]).reshape(-1, n * n), tol)
    q = np.vstack([q, frontier])
    while frontier.shape[0]:
        mats = frontier.reshape(-1, n, n)
        cands = np.concatenate([(g @ mats).reshape(-1, n * n) for g in gens]) if gens else frontier[:0]
        frontier = _extend_orthonormal(q, cands, tol)
        q = np.vstack([q, frontier])
        if q.shape[0] > n * n:
            raise AlgebraError("generated span exceeds n^2: numerical rank failure")
    return _from_rows(space, q, generators)


def scalars(space: TensorSpace) -> StarAlgebra:
    n = space.total_dim
    return StarAlgebra(space, (np.eye(n) / math.sqrt(n))[None], (np.eye(n),))


def factor_algebra(space: TensorSpace, factors: Sequence[int]) -> StarAlgebra:
    """B(H_F) x 1 for the factor set ``factors``."""
    factors = sorted(set(factors))
    if not factors:
        return scalars(space)
    sub = space.sub(factors)
    scale = math.sqrt(space.total_dim / sub.total_dim)
    basis = np.array([embed(e, space, factors) / scale for e in matrix_units(sub.total_dim)])
    gens = tuple(
        embed(g, space, [k]) for k in factors for g in local_generators(space.dims[k])
    )
    return StarAlgebra(space, basis, gens)


def full_algebra(space: TensorSpace) -> StarAlgebra:
    return factor_algebra(space, range(space.n_factors))


def from_blocks(
    pattern: Sequence[tuple[int, int]], unitary: np.ndarray | None = None
) -> StarAlgebra:
    """Algebra ``U (sum_k M_{d_k} x 1_{m_k}) U^dagger`` on a single factor of size sum d_k m_k."""
    n = sum(d * m for d, m in pattern)
    space = TensorSpace((n,))
    basis = []
    offset = 0
    for d, m in pattern:
        for e in matrix_units(d):
            x = np.zeros((n, n), dtype=complex)
            x[offset : offset + d * m, offset : offset + d * m] = np.kron(e, np.eye(m)) / math.sqrt(m)
            basis.append(x)
        offset += d * m
    basis = np.array(basis)
    if unitary is not None:
        basis = unitary @ basis @ adjoint(unitary)
    return StarAlgebra(space, basis)


def closure_defect(a: StarAlgebra, max_pairs: int = 400, seed: int = 0) -> float:
    """Largest span defect of adjoints and (sampled) pairwise products of basis elements."""
    rng = np.random.default_rng(seed)
    worst = max(a.span_defect(adjoint(b)) for b in a.basis)
    pairs = [(i, j) for i in range(a.dim) for j in range(a.dim)]
    if len(pairs) > max_pairs:
        pairs = [pairs[k] for k in rng.choice(len(pairs), max_pairs, replace=False)]
    for i, j in pairs:
        worst = max(worst, a.span_defect(a.basis[i] @ a.basis[j]))
    return worst


def _commutant_nullspace(a: StarAlgebra) -> StarAlgebra:
    n = a.n
    eye = np.eye(n)
    blocks = [np.kron(g, eye) - np.kron(eye, g.T) for g in a.generating_set()]
    null = _null_space(np.vstack(blocks))
    return _from_rows(a.space, null.T)


def _commutant_blocks(a: StarAlgebra, seed: int) -> StarAlgebra:
    rows = []
    for blk in factor_decomposition(a, seed=seed):
        w = blk.isometry
        for e in matrix_units(blk.m):
            x = adjoint(w) @ np.kron(np.eye(blk.d), e) @ w / math.sqrt(blk.d)
            rows.append(x.reshape(-1))
    return _from_rows(a.space, np.array(rows))


def commutant(a: StarAlgebra, method: str = "auto", seed: int = 0) -> StarAlgebra:
    """Commutant of ``a`` inside B(H).

    ``method="nullspace"`` solves ``[x, g] = 0`` for the generators directly;
    ``"blocks"`` reads it off the factor decomposition (1 x M_m per block).
    ``"auto"`` uses the nullspace up to ambient dimension 32.
    """
    if method == "auto":
        method = "nullspace" if a.n <= NULLSPACE_MAX_N else "blocks"
    if method == "nullspace":
        return _commutant_nullspace(a)
    if method == "blocks":
        return _commutant_blocks(a, seed)
    raise ValueError(f"unknown commutant method {method!r}")


def center(a: StarAlgebra) -> StarAlgebra:
    """Elements of ``a`` commuting with a generating set of ``a``, i.e. a intersected with a'."""
    gens = a.generating_set()
    cols = np.vstack([(a.basis @ g - g @ a.basis).reshape(a.dim, -1).T for g in gens])
    coeffs = _null_space(cols)
    rows = coeffs.T @ a.rows
    return _from_rows(a.space, rows)


@dataclass(frozen=True, eq=False)
class FactorBlock:
    """One Wedderburn block ``z_k a = M_d x 1_m``.

    ``isometry`` is a ``(d*m, n)`` matrix with orthonormal rows; it maps the
    range of the central projection onto C^d x C^m so that every algebra
    element becomes ``X x 1_m``.
    """

    central_projection: np.ndarray
    d: int
    m: int
    isometry: np.ndarray

    def block_component(self, x: np.ndarray) -> np.ndarray:
        y = (self.isometry @ x @ adjoint(self.isometry)).reshape(self.d, self.m, self.d, self.m)
        return np.einsum("itjt->ij", y) / self.m

    def pattern_defect(self, x: np.ndarray) -> float:
        y = self.isometry @ x @ adjoint(self.isometry)
        xb = self.block_component(x)
        scale = max(np.linalg.norm(x), 1.0)
        return float(np.linalg.norm(y - np.kron(xb, np.eye(self.m))) / scale)


def _clusters(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted (ascending) eigenvalues into runs separated by gaps > tol."""
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _hermitian_parts(mats: np.ndarray) -> np.ndarray:
    h = (mats + np.conj(np.swapaxes(mats, 1, 2))) / 2
    k = (mats - np.conj(np.swapaxes(mats, 1, 2))) / 2j
    return np.concatenate([h, k])


def _split_block(a: StarAlgebra, q: np.ndarray, herm: np.ndarray, rng) -> FactorBlock | None:
    r = q.shape[1]
    comp = adjoint(q)[None] @ a.basis @ q[None]
    s = np.linalg.svd(comp.reshape(a.dim, -1), compute_uv=False)
    dim_k = int(np.sum(s > SPAN_TOL * max(1.0, s[0])))
    d = math.isqrt(dim_k)
    if d * d != dim_k or r % d:
        raise AlgebraError(f"block of rank {r} carries a {dim_k}-dimensional algebra: not a factor pattern")
    m = r // d
    hb = np.tensordot(rng.normal(size=len(herm)), herm, axes=1)
    hb = adjoint(q) @ hb @ q
    hb = (hb + adjoint(hb)) / 2
    w, v = np.linalg.eigh(hb)
    spread = max(w[-1] - w[0], 1.0)
    groups = _clusters(w, 1e-6 * spread)
    if len(groups) != d or any(len(g) != m for g in groups):
        return None
    coeffs = rng.normal(size=a.dim) + 1j * rng.normal(size=a.dim)
    x = adjoint(q) @ np.tensordot(coeffs, a.basis, axes=1) @ q
    e1 = v[:, groups[0]]
    cols = [e1]
    xnorm = np.linalg.norm(x)
    for g in groups[1:]:
        ej = v[:, g]
        mj = adjoint(ej) @ x @ e1
        cj = np.linalg.norm(mj) / math.sqrt(m)
        if cj < 1e-6 * xnorm:
            return None
        cols.append(ej @ mj / cj)
    iso = adjoint(q @ np.hstack(cols))
    z = q @ adjoint(q)
    blk = FactorBlock(z, d, m, iso)
    if max(blk.pattern_defect(b) for b in a.basis) > PATTERN_TOL:
        return None
    return blk


def factor_decomposition(a: StarAlgebra, seed: int = 0) -> list[FactorBlock]:
    """Artin-Wedderburn decomposition of a unital algebra into factor blocks."""
    if a.span_defect(np.eye(a.n)) > SPAN_TOL:
        raise AlgebraError("algebra is not unital")
    rng = np.random.default_rng(seed)
    z_alg = center(a)
    z_herm = _hermitian_parts(z_alg.basis)
    herm = _hermitian_parts(a.basis)
    for _ in range(MAX_RESAMPLES):
        h = np.tensordot(rng.normal(size=len(z_herm)), z_herm, axes=1)
        w, v = np.linalg.eigh((h + adjoint(h)) / 2)
        spread = max(w[-1] - w[0], 1.0)
        groups = _clusters(w, 1e-6 * spread)
        if len(groups) != z_alg.dim:
            continue
        blocks = []
        for g in groups:
            blk = None
            for _ in range(MAX_RESAMPLES):
                blk = _split_block(a, v[:, g], herm, rng)
                if blk is not None:
                    break
            if blk is None:
                raise AlgebraError("could not split a central block into matrix units")
            blocks.append(blk)
        if sum(b.d**2 for b in blocks) != a.dim or sum(b.d * b.m for b in blocks) != a.n:
            raise AlgebraError("Wedderburn accounting failed")
        return blocks
    raise AlgebraError("failed to separate the central spectrum")


@dataclass(frozen=True, eq=False)
class BlockState:
    """A state on ``a`` written as weights and reduced densities per factor block.

    ``densities[k]`` is ``None`` for blocks whose weight is below 1e-12.
    """

    weights: np.ndarray
    densities: list
    blocks: list

    def expectation(self, x: np.ndarray) -> complex:
        """omega(x) = sum_k lambda_k tr(sigma_k X_k) for x in the algebra."""
        val = 0j
        for lam, sig, blk in zip(self.weights, self.densities, self.blocks):
            if sig is not None:
                val += lam * np.trace(sig @ blk.block_component(x))
        return complex(val)


def restrict_state(rho: np.ndarray, a: StarAlgebra, blocks=None, seed: int = 0) -> BlockState:
    """Restrict a density matrix (or a pure state vector) to ``a``.

    A 1-d input is treated as the pure state it spans; this avoids forming
    the n x n projector on the hot path.
    """
    blocks = blocks if blocks is not None else factor_decomposition(a, seed=seed)
    rho = np.asarray(rho, dtype=complex)
    pure = rho.ndim == 1
    if pure:
        if rho.shape[0] != a.n or abs(np.linalg.norm(rho) - 1) > 1e-9:
            raise DimensionError("state vector must be normalized and match the ambient dimension")
    else:
        rho = check_density(rho, a.n)
    weights, dens = [], []
    for blk in blocks:
        if pure:
            y = (blk.isometry @ rho).reshape(blk.d, blk.m)
            red = y @ adjoint(y)
        else:
            y = (blk.isometry @ rho @ adjoint(blk.isometry)).reshape(blk.d, blk.m, blk.d, blk.m)
            red = np.einsum("itjt->ij", y)
        lam = float(np.real(np.trace(red)))
        weights.append(lam)
        dens.append(red / lam if lam > EIG_CLIP else None)
    return BlockState(np.array(weights), dens, list(blocks))


def block_state_entropy(state: BlockState) -> float:
    s = 0.0
    for lam, sig in zip(state.weights, state.densities):
        if sig is not None:
            s += -lam * math.log(lam) + lam * von_neumann_entropy(sig)
    return s


def subalgebra_entropy(rho: np.ndarray, a: StarAlgebra, blocks=None, seed: int = 0) -> float:
    """Entropy of the restriction: sum_k (-lambda_k ln lambda_k + lambda_k S(sigma_k))."""
    return block_state_entropy(restrict_state(rho, a, blocks=blocks, seed=seed))


class CenterPurity(NamedTuple):
    is_pure: bool
    max_central_weight: float


def center_purity_check(rho: np.ndarray, a: StarAlgebra, blocks=None, seed: int = 0, tol: float = 1e-8) -> CenterPurity:
    state = restrict_state(rho, a, blocks=blocks, seed=seed)
    w = float(np.max(state.weights))
    return CenterPurity(w >= 1 - tol, w)


def weight_entropy(state: BlockState) -> float:
    """Entropy of the central distribution alone."""
    return shannon_entropy(state.weights)
