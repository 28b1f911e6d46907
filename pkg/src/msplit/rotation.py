"""Entropy of intermediate algebras rotated by unitaries of groups 2 and 3.

Rotating the mirrored generators by ``U`` in the algebra of groups 2, 3 gives
the algebra ``A_1 v U^dagger A_2 U``; since ``U`` commutes with group 1, the
state on it has the same entropy as ``U omega`` on the unrotated algebra. We
evaluate entropies that way, which reuses one factor decomposition for the
whole landscape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from .errors import DimensionError, NotHermitianError
from .modular import SplitSetup, global_phase_distance
from .star_algebra import block_state_entropy, restrict_state
from .tensor_core import (
    adjoint,
    apply_on_factors,
    embed,
    hermitian_basis,
    hermitian_defect,
    permutation_matrix,
    sqrtm_psd,
)

MIDDLE = (1, 2)
STATIONARITY_TOL = 1e-5
DEFAULT_STEP = 1e-4
SYMMETRY_TOL = 1e-8


def _check_hermitian(x: np.ndarray, d: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (d, d):
        raise DimensionError(f"{name} must be {d}x{d}, got {x.shape}")
    if hermitian_defect(x) > 1e-9:
        raise NotHermitianError(f"{name} is not Hermitian")
    return x


def middle_unitary(setup: SplitSetup, b2: np.ndarray, b3: np.ndarray, alpha: float) -> np.ndarray:
    """exp(i alpha b2 (x) b3) on factors (1, 2)."""
    d2, d3 = setup.space.dims[1], setup.space.dims[2]
    b2 = _check_hermitian(b2, d2, "b2")
    b3 = _check_hermitian(b3, d3, "b3")
    return sla.expm(1j * alpha * np.kron(b2, b3))


def rotated_state(setup: SplitSetup, u23: np.ndarray) -> np.ndarray:
    return apply_on_factors(u23, setup.omega, setup.space, MIDDLE)


def entropy_for_middle_unitary(setup: SplitSetup, u23: np.ndarray) -> float:
    state = restrict_state(rotated_state(setup, u23), setup.dl_algebra, blocks=setup.dl_blocks)
    return block_state_entropy(state)


def rotate_and_measure(setup: SplitSetup, b2: np.ndarray, b3: np.ndarray, alpha: float) -> float:
    """Entropy of the state on A_1 v U^dagger A_2 U with U = exp(i alpha b2 (x) b3)."""
    if alpha == 0:
        return setup.dl_entropy()
    return entropy_for_middle_unitary(setup, middle_unitary(setup, b2, b3, alpha))


def block_density(setup: SplitSetup, u23: np.ndarray | None = None) -> np.ndarray:
    """Reduced density of the (single-block) intermediate algebra, optionally after rotation."""
    if len(setup.dl_blocks) != 1:
        raise DimensionError("intermediate algebra is not a factor")
    vec = setup.omega if u23 is None else rotated_state(setup, u23)
    return restrict_state(vec, setup.dl_algebra, blocks=setup.dl_blocks).densities[0]


def first_order_density(rho: np.ndarray, b2: np.ndarray, b3: np.ndarray, alpha: float) -> np.ndarray:
    """rho + i alpha [b2, rho^(1/2) b3 rho^(1/2)]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != np.shape(b2) or rho.shape != np.shape(b3):
        raise DimensionError("rho, b2 and b3 must share one carrier")
    root = sqrtm_psd(rho)
    k = root @ b3 @ root
    return rho + 1j * alpha * (b2 @ k - k @ b2)


def carrier_operators(setup: SplitSetup, b2: np.ndarray, b3: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Express embedded b2 and b3 on the carrier of the block density.

    ``b2`` (group 2) must lie in the intermediate algebra and ``b3`` (group 3)
    in its commutant; this holds when the mirror of group 1 is group 2 itself,
    as for symmetric purifications. ``b3`` is moved through the polar part of
    the reshaped reference vector so that the returned pair can be fed to
    :func:`first_order_density`.
    """
    (blk,) = setup.dl_blocks
    w = blk.isometry
    g2 = embed(b2, setup.space, [1])
    g3 = embed(b3, setup.space, [2])
    y2 = (w @ g2 @ adjoint(w)).reshape(blk.d, blk.m, blk.d, blk.m)
    y3 = (w @ g3 @ adjoint(w)).reshape(blk.d, blk.m, blk.d, blk.m)
    x = np.einsum("itjt->ij", y2) / blk.m
    y = np.einsum("titj->ij", y3) / blk.d
    if blk.pattern_defect(g2) > 1e-7:
        raise DimensionError("b2 does not lie in the intermediate algebra")
    if np.linalg.norm(y3 - np.einsum("ab,ij->aibj", np.eye(blk.d), y)) > 1e-7 * max(1.0, np.linalg.norm(g3)):
        raise DimensionError("b3 does not lie in the commutant of the intermediate algebra")
    y_om = (w @ setup.omega).reshape(blk.d, blk.m)
    u, _, vh = np.linalg.svd(y_om, full_matrices=False)
    polar = u @ vh
    return x, polar @ y.T @ adjoint(polar)


@dataclass(frozen=True, eq=False)
class SymmetryWitness:
    """Exchange of factors 0<->3 and 1<->2 composed with complex conjugation."""

    swap_isometry: np.ndarray
    passes: bool
    defect: float


def symmetry_witness(setup: SplitSetup, tol: float = SYMMETRY_TOL) -> SymmetryWitness:
    dims = setup.space.dims
    if dims[0] != dims[3] or dims[1] != dims[2]:
        return SymmetryWitness(np.zeros((0, 0)), False, math.inf)
    swap = permutation_matrix(setup.space, (3, 2, 1, 0))
    image = np.conj(swap @ setup.omega)
    defect = global_phase_distance(image, setup.omega)
    return SymmetryWitness(swap, bool(defect <= tol), defect)


def random_direction(setup: SplitSetup, rng, compatible: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Random Hermitian pair (b2, b3); ``compatible`` sets b3 = conj(b2)."""
    d2, d3 = setup.space.dims[1], setup.space.dims[2]

    def herm(d):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return (a + a.conj().T) / 2

    b2 = herm(d2)
    if compatible:
        if d2 != d3:
            raise DimensionError("compatible directions need equal middle dimensions")
        return b2, np.conj(b2)
    return b2, herm(d3)


class DirectionResult(NamedTuple):
    derivative: float
    tolerance: float
    passed: bool


@dataclass
class StationarityReport:
    premise_met: bool
    witness_defect: float
    step: float
    results: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.premise_met:
            return "premise unmet"
        return "pass" if all(r.passed for r in self.results) else "fail"

    @property
    def max_ratio(self) -> float:
        return max((abs(r.derivative) / r.tolerance * STATIONARITY_TOL for r in self.results), default=0.0)


def central_derivative(setup: SplitSetup, b2: np.ndarray, b3: np.ndarray, step: float = DEFAULT_STEP) -> float:
    return (rotate_and_measure(setup, b2, b3, step) - rotate_and_measure(setup, b2, b3, -step)) / (2 * step)


def stationarity_check(
    setup: SplitSetup,
    directions: Sequence[tuple[np.ndarray, np.ndarray]],
    step: float = DEFAULT_STEP,
    witness: SymmetryWitness | None = None,
    tol: float = STATIONARITY_TOL,
) -> StationarityReport:
    """Central differences of the entropy along each direction.

    A direction passes if ``|dS/dalpha| <= tol * ||b2|| * ||b3||`` (spectral
    norms). Setups without the exchange symmetry are reported as premise unmet.
    """
    witness = symmetry_witness(setup) if witness is None else witness
    report = StationarityReport(witness.passes, witness.defect, step)
    for b2, b3 in directions:
        der = central_derivative(setup, b2, b3, step)
        scale = tol * np.linalg.norm(b2, 2) * np.linalg.norm(b3, 2)
        report.results.append(DirectionResult(der, scale, bool(abs(der) <= scale)))
    return report


class FlowRow(NamedTuple):
    n: int
    deviation: float
    bound: float
    passed: bool
    splits_cluster: bool


CLUSTER_TOL = 1e-8


def eigenvalue_flow_check(setup: SplitSetup, b2: np.ndarray, b3: np.ndarray, count: int | None = None, step: float = DEFAULT_STEP) -> list[FlowRow]:
    """Tr sigma_n rho_alpha for fixed top-n projectors sigma_n of the unrotated density.

    The change over one step must be second order: ``|f(h) - f(0)|`` at most
    ``2 (||b2|| ||b3||)^2 h^2`` (plus 1e-12 rounding slack). When the n-th and
    (n+1)-th eigenvalues coincide, sigma_n is not determined by rho and the
    eigenvalues inside the cluster may split at first order; such rows are
    flagged with ``splits_cluster`` and ignored by :func:`flow_passes`.
    """
    rho = block_density(setup)
    w, v = np.linalg.eigh(rho)
    w, v = w[::-1], v[:, ::-1]
    rho_h = block_density(setup, middle_unitary(setup, b2, b3, step))
    count = rho.shape[0] if count is None else count
    scale = 2 * (np.linalg.norm(b2, 2) * np.linalg.norm(b3, 2)) ** 2 * step**2 + 1e-12
    rows = []
    for n in range(1, count + 1):
        p = v[:, :n]
        dev = float(abs(np.trace(adjoint(p) @ (rho_h - rho) @ p)))
        split = n < len(w) and w[n - 1] - w[n] <= CLUSTER_TOL
        rows.append(FlowRow(n, dev, scale, dev <= scale, bool(split)))
    return rows


def flow_passes(rows: Sequence[FlowRow]) -> bool:
    return all(r.passed for r in rows if not r.splits_cluster)


def middle_generators(setup: SplitSetup) -> list[np.ndarray]:
    """Products b2_t (x) b3_t of HS-orthonormal Hermitian bases, identity excluded."""
    d2, d3 = setup.space.dims[1], setup.space.dims[2]
    gens = [np.kron(a, b) for a in hermitian_basis(d2) for b in hermitian_basis(d3)]
    return gens[1:]


@dataclass
class MinimizeResult:
    params: np.ndarray
    s_min: float
    s_dl: float
    trace: list
    evaluations: int
    exhausted: bool
    unitary: np.ndarray | None = None


class _Budget(Exception):
    pass


def minimize_entropy(setup: SplitSetup, budget: int = 4000, seed: int = 0, restarts: int = 6, scale: float = 1.0) -> MinimizeResult:
    """Derivative-free search over exp(i sum_t theta_t g_t) on groups 2, 3.

    Restart 0 starts at the unrotated point theta = 0; the others start from
    normal draws with per-restart generators seeded by (seed, restart). Each
    restart runs Powell's method (coordinate line searches with Brent steps)
    until the shared evaluation budget runs out.
    """
    gens = np.array(middle_generators(setup))
    s_dl = setup.dl_entropy()
    best = {"s": s_dl, "theta": np.zeros(len(gens))}
    trace = [s_dl]
    count = [0]

    def f(theta):
        if count[0] >= budget:
            raise _Budget
        count[0] += 1
        u = sla.expm(1j * np.tensordot(theta, gens, axes=1))
        s = entropy_for_middle_unitary(setup, u)
        if s < best["s"]:
            best["s"], best["theta"] = s, np.array(theta, dtype=float)
        trace.append(best["s"])
        return s

    exhausted = False
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x0 = np.zeros(len(gens)) if r == 0 else rng.normal(scale=scale, size=len(gens))
        try:
            minimize(f, x0, method="Powell", options={"xtol": 1e-6, "ftol": 1e-10, "maxfev": budget})
        except _Budget:
            exhausted = True
            break
    theta = best["theta"]
    u = sla.expm(1j * np.tensordot(theta, gens, axes=1))
    return MinimizeResult(theta, best["s"], s_dl, trace, count[0], exhausted, u)
