"""Dense linear algebra over a Hilbert space factored as an ordered tensor product.

Operators and state vectors are plain complex ``numpy`` arrays; the factor
structure travels alongside them as a :class:`TensorSpace`. The computational
basis is the lexicographic product basis over factor indices (factor 0 is the
most significant digit), which is also the order used by every file format in
the package.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    DimensionGuardError,
    NotDensityError,
    NotHermitianError,
    SingularLogError,
)

DEFAULT_MAX_DIM = 64
EIG_CLIP = 1e-12
HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10


def max_total_dim() -> int:
    """Total-dimension guard, overridable through ``MSPLIT_MAX_DIM``."""
    raw = os.environ.get("MSPLIT_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise DimensionError(f"MSPLIT_MAX_DIM must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DimensionError("MSPLIT_MAX_DIM must be positive")
    return value


@dataclass(frozen=True)
class TensorSpace:
    """Ordered tensor product of finite-dimensional factors."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise DimensionError("a tensor space needs at least one factor")
        if any(d < 1 for d in dims):
            raise DimensionError(f"factor dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)
        limit = max_total_dim()
        if math.prod(dims) > limit:
            raise DimensionGuardError(
                f"total dimension {math.prod(dims)} exceeds guard {limit} (set MSPLIT_MAX_DIM)"
            )

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def check_factor(self, k: int) -> int:
        if not 0 <= k < len(self.dims):
            raise DimensionError(f"factor index {k} out of range for {len(self.dims)} factors")
        return k

    def sub(self, factors: Iterable[int]) -> "TensorSpace":
        return TensorSpace(tuple(self.dims[self.check_factor(k)] for k in factors))

    def dim_of(self, factors: Iterable[int]) -> int:
        return math.prod(self.dims[self.check_factor(k)] for k in factors)

    def concat(self, other: "TensorSpace") -> "TensorSpace":
        return TensorSpace(self.dims + other.dims)


def _check_square(op: np.ndarray, n: int | None = None) -> np.ndarray:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {op.shape}")
    if n is not None and op.shape[0] != n:
        raise DimensionError(f"expected a {n}x{n} matrix, got {op.shape}")
    return op


def adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(x)).T


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; ``a`` occupies the leading factors."""
    return np.kron(a, b)


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def embed_factor(op: np.ndarray, space: TensorSpace, k: int) -> np.ndarray:
    """Return ``1 x ... x op x ... x 1`` with ``op`` on factor ``k``."""
    space.check_factor(k)
    op = _check_square(op, space.dims[k])
    ops = [np.eye(d) for d in space.dims]
    ops[k] = op
    return kron_all(ops)


def embed(op: np.ndarray, space: TensorSpace, factors: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on ``factors`` (in the given order) into ``space``."""
    factors = [space.check_factor(k) for k in factors]
    if len(set(factors)) != len(factors):
        raise DimensionError(f"repeated factor in {factors}")
    rest = [k for k in range(space.n_factors) if k not in factors]
    op = _check_square(op, space.dim_of(factors))
    full = np.kron(op, np.eye(space.dim_of(rest)))
    order = factors + rest
    # axes of `full` are in `order`; bring them back to 0..n-1
    nf = space.n_factors
    shape = [space.dims[k] for k in order]
    t = full.reshape(shape + shape)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [nf + i for i in inv])
    return t.reshape(space.total_dim, space.total_dim)


def permute_vector(v: np.ndarray, space: TensorSpace, order: Sequence[int]) -> np.ndarray:
    """Reorder the factors of a vector so that new factor ``i`` is old factor ``order[i]``."""
    return np.asarray(v).reshape(space.dims).transpose(list(order)).reshape(-1)


def permutation_matrix(space: TensorSpace, order: Sequence[int]) -> np.ndarray:
    """Real permutation ``P`` with ``P @ v == permute_vector(v, space, order)``."""
    n = space.total_dim
    idx = np.arange(n).reshape(space.dims).transpose(list(order)).reshape(-1)
    p = np.zeros((n, n))
    p[np.arange(n), idx] = 1.0
    return p


def partial_trace(rho: np.ndarray, space: TensorSpace, keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor not in ``keep``; kept factors stay in ascending order."""
    rho = _check_square(rho, space.total_dim)
    keep = sorted({space.check_factor(k) for k in keep})
    nf = space.n_factors
    traced = [k for k in range(nf) if k not in keep]
    dk = space.dim_of(keep)
    dt = space.dim_of(traced)
    t = rho.reshape(space.dims * 2)
    t = t.transpose(keep + traced + [nf + k for k in keep] + [nf + k for k in traced])
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def hermitian_defect(h: np.ndarray) -> float:
    h = np.asarray(h)
    scale = max(np.linalg.norm(h), 1.0)
    return float(np.linalg.norm(h - adjoint(h)) / scale)


def hermitian_eig(h: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order."""
    h = _check_square(h)
    if hermitian_defect(h) > tol:
        raise NotHermitianError(f"matrix is not Hermitian (defect {hermitian_defect(h):.2e})")
    w, v = np.linalg.eigh((h + adjoint(h)) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def operator_function(h: np.ndarray, f: str | Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` on the spectrum of a positive semidefinite matrix.

    ``f`` is ``"sqrt"``, ``"ln"`` or a vectorized callable. Eigenvalues in
    ``[-1e-10, 0)`` are clipped to zero; ``"ln"`` refuses singular input.
    """
    w, v = hermitian_eig(h)
    if w.size and w.min() < -PSD_TOL:
        raise NotDensityError(f"negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    if f == "sqrt":
        fw = np.sqrt(w)
    elif f == "ln":
        if w.size and w.min() < EIG_CLIP:
            raise SingularLogError("logarithm of a singular operator")
        fw = np.log(w)
    elif callable(f):
        fw = f(w)
    else:
        raise ValueError(f"unknown operator function {f!r}")
    return (v * fw) @ adjoint(v)


def sqrtm_psd(h: np.ndarray) -> np.ndarray:
    return operator_function(h, "sqrt")


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def check_density(rho: np.ndarray, n: int | None = None, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a density matrix and return its Hermitian symmetrization."""
    try:
        rho = _check_square(np.asarray(rho, dtype=complex), n)
    except DimensionError as exc:
        raise NotDensityError(str(exc)) from exc
    if hermitian_defect(rho) > tol:
        raise NotDensityError("density matrix is not Hermitian")
    rho = (rho + adjoint(rho)) / 2
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise NotDensityError(f"density matrix has trace {tr:.12g}")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -tol:
        raise NotDensityError(f"density matrix has negative eigenvalue {w.min():.3e}")
    return rho


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / nrm


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v).reshape(-1)
    return np.outer(v, np.conj(v))


def matrix_units(d: int) -> list[np.ndarray]:
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            units.append(e)
    return units


def hermitian_basis(d: int) -> list[np.ndarray]:
    """HS-orthonormal basis of Hermitian d x d matrices (generalized Gell-Mann, plus 1/sqrt(d))."""
    basis = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / math.sqrt(2)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / math.sqrt(2)
            a[k, j] = 1j / math.sqrt(2)
            basis += [s, a]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / math.sqrt(l * (l + 1))).astype(complex))
    return basis


def local_generators(d: int) -> list[np.ndarray]:
    """Two real Hermitian matrices generating the full algebra M_d."""
    if d == 1:
        return [np.eye(1, dtype=complex)]
    shift = np.roll(np.eye(d), 1, axis=0)
    return [np.diag(np.arange(d, dtype=float)).astype(complex), (shift + shift.T).astype(complex) / 2]


def apply_on_factors(op: np.ndarray, v: np.ndarray, space: TensorSpace, factors: Sequence[int]) -> np.ndarray:
    """``embed(op, space, factors) @ v`` without forming the embedded matrix."""
    factors = [space.check_factor(k) for k in factors]
    op = _check_square(op, space.dim_of(factors))
    t = np.asarray(v).reshape(space.dims)
    sub = [space.dims[k] for k in factors]
    t = np.moveaxis(t, factors, list(range(len(factors))))
    shape = t.shape
    t = (op @ t.reshape(math.prod(sub), -1)).reshape(shape)
    return np.moveaxis(t, list(range(len(factors))), factors).reshape(-1)
