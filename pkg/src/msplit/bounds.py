"""Upper and lower entropy bounds for intermediate algebras, and the data that feed them.

Upper bounds come from separable (or difference-of-separable) decompositions
of the two-group state; lower bounds from its mutual information. The
decompositions can be searched with a linear program over a finite frame of
product states, which makes any result frame-relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .entropy import relative_entropy, shannon_entropy, von_neumann_entropy
from .errors import DimensionError, FrameError, LPError
from .star_algebra import StarAlgebra
from .tensor_core import (
    EIG_CLIP,
    TensorSpace,
    adjoint,
    check_density,
    hermitian_basis,
    hermitian_eig,
    partial_trace,
)

WEIGHT_TOL = 1e-9
LP_RESIDUAL_TOL = 1e-6
LP_DROP = 1e-10


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """``sum_j nu_j^2 rho1_j (x) rho4_j`` with ``sum_j nu_j^2 = total``."""

    nus: np.ndarray
    rho1s: list
    rho4s: list
    total: float = 1.0

    def __post_init__(self):
        nus = np.asarray(self.nus, dtype=float).reshape(-1)
        if len(nus) != len(self.rho1s) or len(nus) != len(self.rho4s):
            raise DimensionError("term lists have different lengths")
        if np.any(nus <= 0):
            raise ValueError("weight amplitudes must be positive")
        if abs(float(np.sum(nus**2)) - self.total) > WEIGHT_TOL * max(1.0, self.total):
            raise ValueError(f"sum of nu^2 is {np.sum(nus**2):.12g}, expected {self.total}")
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "rho1s", [check_density(r) for r in self.rho1s])
        object.__setattr__(self, "rho4s", [check_density(r) for r in self.rho4s])

    @classmethod
    def from_weights(cls, weights, rho1s, rho4s, total: float | None = None) -> "SeparableDecomposition":
        w = np.asarray(weights, dtype=float)
        return cls(np.sqrt(w), list(rho1s), list(rho4s), float(np.sum(w)) if total is None else total)

    @property
    def weights(self) -> np.ndarray:
        return self.nus**2

    @property
    def n_terms(self) -> int:
        return len(self.nus)

    def state(self) -> np.ndarray:
        return sum(w * np.kron(a, b) for w, a, b in zip(self.weights, self.rho1s, self.rho4s))


@dataclass(frozen=True, eq=False)
class DifferenceDecomposition:
    """``rho14 = dec1.state() - dec2.state()`` with totals lambda + 1 and lambda."""

    lam: float
    dec1: SeparableDecomposition
    dec2: SeparableDecomposition | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if abs(self.dec1.total - (self.lam + 1)) > WEIGHT_TOL * (self.lam + 1):
            raise ValueError("dec1 must carry total weight lambda + 1")
        total2 = 0.0 if self.dec2 is None else self.dec2.total
        if abs(total2 - self.lam) > WEIGHT_TOL * max(1.0, self.lam):
            raise ValueError("dec2 must carry total weight lambda")

    def state(self) -> np.ndarray:
        out = self.dec1.state()
        if self.dec2 is not None:
            out = out - self.dec2.state()
        return out


def separable_bound(dec: SeparableDecomposition) -> float:
    """-4 sum nu^2 ln nu, i.e. twice the Shannon entropy of the weights."""
    return float(-4 * np.sum(dec.nus**2 * np.log(dec.nus)))


def nonseparable_bound(dec: DifferenceDecomposition) -> float:
    """-4 (lambda + 1) sum nu_1^2 ln nu_1 with sum nu_1^2 = lambda + 1, taken literally."""
    nus = dec.dec1.nus
    return float(-4 * (dec.lam + 1) * np.sum(nus**2 * np.log(nus)))


@dataclass(frozen=True, eq=False)
class GramMixingData:
    """Weighted family of normalized, possibly non-orthogonal vectors (rows of ``vectors``)."""

    nus: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        nus = np.asarray(self.nus, dtype=float).reshape(-1)
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if vecs.shape[0] != len(nus):
            raise DimensionError("one weight per vector required")
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(np.abs(norms - 1) > 1e-9):
            raise ValueError("vectors must be normalized")
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "vectors", vecs)

    @property
    def weighted(self) -> np.ndarray:
        """Columns nu_j v_j."""
        return (self.vectors * self.nus[:, None]).T

    @property
    def R(self) -> np.ndarray:
        v = self.weighted
        return v @ adjoint(v)

    @property
    def N(self) -> np.ndarray:
        return np.diag(self.nus)

    @property
    def G(self) -> np.ndarray:
        """G[k, l] = <v_l | v_k>."""
        return self.vectors.conj() @ self.vectors.T

    def eigendata(self):
        """(r, R_vectors, C) with ``nu_j v_j = sum_k r_k R_k C[k, j]``; C is unitary."""
        u, s, vh = np.linalg.svd(self.weighted, full_matrices=True)
        return s, u[:, : len(s)], vh


class GramMixingResult(NamedTuple):
    S_R: float
    S_N2: float
    holds: bool
    S_NGN: float


def gram_mixing_check(data: GramMixingData, tol: float = 1e-9) -> GramMixingResult:
    s_r = von_neumann_entropy(data.R)
    s_n2 = shannon_entropy(data.nus**2)
    ngn = data.N @ data.G @ data.N
    return GramMixingResult(s_r, s_n2, bool(s_r <= s_n2 + tol), von_neumann_entropy(ngn))


def greedy_partition(vectors: np.ndarray, tol: float = 1e-8) -> list[list[int]]:
    """Split vectors into groups that are each linearly independent.

    A vector joins the first group that stays independent with it; otherwise
    it opens a new group.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    groups: list[list[int]] = []
    for j, v in enumerate(vectors):
        for g in groups:
            s = np.linalg.svd(vectors[g + [j]], compute_uv=False)
            if s[-1] > tol * s[0]:
                g.append(j)
                break
        else:
            groups.append([j])
    return groups


class TriangleResult(NamedTuple):
    S_total: float
    S_ab: float
    S_c: float
    holds: bool


def triangle_check(rho: np.ndarray, dims: Sequence[int], tol: float = 1e-9) -> TriangleResult:
    """S(ABC) >= S(AB) - S(C) on a three-factor density."""
    space = TensorSpace(tuple(dims))
    if space.n_factors != 3:
        raise DimensionError("triangle check needs three factors")
    rho = check_density(rho, space.total_dim)
    s = von_neumann_entropy(rho)
    s_ab = von_neumann_entropy(partial_trace(rho, space, [0, 1]))
    s_c = von_neumann_entropy(partial_trace(rho, space, [2]))
    return TriangleResult(s, s_ab, s_c, bool(s >= s_ab - s_c - tol))


class LowerBound(NamedTuple):
    relative_entropy: float
    bound: float
    measured: float
    holds: bool


def lower_bounds(rho14: np.ndarray, d1: int, d4: int, measured: float, dl_exact: bool = True, tol: float = 1e-8) -> LowerBound:
    """Relative entropy of rho14 to the product of its marginals, as a bound on ``measured``.

    The bound is the full relative entropy when the second group is the mirror
    of the first under the modular conjugation (``dl_exact``), else half of it.
    """
    space = TensorSpace((d1, d4))
    rho14 = check_density(rho14, space.total_dim)
    prod = np.kron(partial_trace(rho14, space, [0]), partial_trace(rho14, space, [1]))
    rel = relative_entropy(rho14, prod)
    bound = rel if dl_exact else rel / 2
    return LowerBound(rel, bound, float(measured), bool(measured >= bound - tol))


def local_frame_states(d: int) -> list[np.ndarray]:
    """Pure states |k>, (|j> +- |k>)/sqrt2 and (|j> +- i|k>)/sqrt2 as projectors."""
    vecs = [np.eye(d)[k].astype(complex) for k in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            for phase in (1, -1, 1j, -1j):
                v = np.zeros(d, dtype=complex)
                v[j], v[k] = 1 / math.sqrt(2), phase / math.sqrt(2)
                vecs.append(v)
    return [np.outer(v, v.conj()) for v in vecs]


def _random_pure(d: int, rng) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def default_frame(d1: int, d4: int, n_random: int | None = None, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """All products of local frame states, plus seeded random pure products."""
    rng = np.random.default_rng(seed)
    frame = [(a, b) for a in local_frame_states(d1) for b in local_frame_states(d4)]
    n_random = 2 * (d1 * d4) ** 2 if n_random is None else n_random
    frame += [(_random_pure(d1, rng), _random_pure(d4, rng)) for _ in range(n_random)]
    return frame


def _coordinates(x: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    return np.array([np.real(np.trace(b @ x)) for b in basis])


def separable_decompose(
    rho14: np.ndarray,
    d1: int,
    d4: int,
    frame: list | None = None,
    mode: str = "separable_only",
    seed: int = 0,
    max_iter: int = 100_000,
):
    """Fit rho14 by a nonnegative (or signed, least-negative) combination of frame products.

    ``mode="separable_only"`` returns a :class:`SeparableDecomposition`, or
    ``None`` if no nonnegative combination over the frame exists.
    ``mode="difference"`` minimizes the total negative weight lambda and
    returns a :class:`DifferenceDecomposition`; lambda is frame-relative.
    """
    n = d1 * d4
    rho14 = check_density(rho14, n)
    frame = default_frame(d1, d4, seed=seed) if frame is None else list(frame)
    prods = [np.kron(a, b) for a, b in frame]
    basis = hermitian_basis(n)
    a_eq = np.array([_coordinates(p, basis) for p in prods]).T
    b_eq = _coordinates(rho14, basis)
    if np.linalg.matrix_rank(a_eq, tol=1e-8) < n * n:
        raise FrameError(f"frame spans {np.linalg.matrix_rank(a_eq, tol=1e-8)} of {n * n} Hermitian directions")
    k = len(prods)
    opts = {"maxiter": max_iter}
    if mode == "separable_only":
        res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=opts)
        if res.status == 2:
            return None
        if res.status != 0:
            raise LPError(f"LP failed: {res.message}")
        plus, minus = res.x, np.zeros(k)
    elif mode == "difference":
        res = linprog(
            np.concatenate([np.zeros(k), np.ones(k)]),
            A_eq=np.hstack([a_eq, -a_eq]),
            b_eq=b_eq,
            bounds=(0, None),
            method="highs",
            options=opts,
        )
        if res.status != 0:
            raise LPError(f"LP failed: {res.message}")
        plus, minus = res.x[:k], res.x[k:]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    plus = np.where(plus > LP_DROP, plus, 0.0)
    minus = np.where(minus > LP_DROP, minus, 0.0)
    fit = a_eq @ (plus - minus)
    if np.linalg.norm(fit - b_eq) > LP_RESIDUAL_TOL:
        raise LPError(f"reproduction residual {np.linalg.norm(fit - b_eq):.2e} above tolerance")

    def terms(c, total):
        idx = np.flatnonzero(c)
        if idx.size == 0:
            return None
        return SeparableDecomposition(np.sqrt(c[idx]), [frame[i][0] for i in idx], [frame[i][1] for i in idx], total)

    if mode == "separable_only":
        return terms(plus / plus.sum(), 1.0)
    lam = float(minus.sum())
    return DifferenceDecomposition(lam, terms(plus, float(plus.sum())), terms(minus, lam) if lam > 0 else None)


def nuclearity_upper(h: np.ndarray, beta: float, omega: np.ndarray, a: StarAlgebra, degeneracy_tol: float = 1e-9):
    """Norms of the functionals in one explicit expansion of ``A -> e^{-beta H} A omega``.

    Each eigenspace of ``h`` contributes the functionals ``A -> e^{-beta E} <psi|A omega>``
    for an orthonormal basis ``psi`` of its image, chosen from the SVD of the
    restricted map. The norm of such a functional on ``a`` equals the trace
    norm of the HS projection of ``|omega><psi|`` onto ``a``. The sums are
    upper estimates for the infimum over all expansions.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    w, v = hermitian_eig(h)
    w, v = w[::-1], v[:, ::-1]
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > degeneracy_tol * max(1.0, abs(w[i - 1])):
            groups.append(np.arange(start, i))
            start = i
    images = a.basis @ omega  # (dim a, n)
    norms, energies = [], []
    for g in groups:
        q = v[:, g]
        m = adjoint(q) @ images.T
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        for i in np.flatnonzero(s > EIG_CLIP):
            psi = q @ u[:, i]
            x = a.project(np.outer(omega, psi.conj()))
            norms.append(math.exp(-beta * w[g[0]]) * float(np.sum(np.linalg.svd(x, compute_uv=False))))
            energies.append(float(w[g[0]]))
    return NuclearityEstimate(beta, np.array(norms), np.array(energies))


@dataclass(frozen=True, eq=False)
class NuclearityEstimate:
    beta: float
    functional_norms: np.ndarray
    energies: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def nu_1(self) -> float:
        return float(np.sum(self.functional_norms))

    @property
    def nu_ln(self) -> float:
        return shannon_entropy(self.functional_norms)

    def nu_p(self, p: float) -> float:
        if p <= 0:
            raise ValueError("p must be positive")
        return float(np.sum(self.functional_norms**p) ** (1 / p))
