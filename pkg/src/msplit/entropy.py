"""Von Neumann and relative entropies in nats."""

from __future__ import annotations

import numpy as np

from .errors import SupportError
from .tensor_core import EIG_CLIP, TensorSpace, check_density, hermitian_eig, partial_trace


def shannon_entropy(p) -> float:
    """-sum p ln p with the 0 ln 0 = 0 convention (entries <= 1e-12 dropped)."""
    p = np.asarray(p, dtype=float).reshape(-1)
    p = p[p > EIG_CLIP]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    w, _ = hermitian_eig(rho)
    return shannon_entropy(np.clip(w, 0.0, None))


def relative_entropy(rho: np.ndarray, sigma: np.ndarray, tol: float = 1e-10) -> float:
    """``tr rho (ln rho - ln sigma)``.

    Raises :class:`SupportError` when ``rho`` has weight outside the support
    of ``sigma`` instead of returning infinity.
    """
    wr, vr = hermitian_eig(rho)
    ws, vs = hermitian_eig(sigma)
    keep = ws > EIG_CLIP
    ps = vs[:, keep]
    leak = float(np.real(np.trace(rho)) - np.real(np.trace(ps.conj().T @ rho @ ps)))
    if leak > tol:
        raise SupportError(f"support of rho not contained in support of sigma (leak {leak:.3e})")
    # tr rho ln sigma restricted to supp(sigma)
    rho_in = ps.conj().T @ rho @ ps
    cross = float(np.real(np.sum(np.diag(rho_in) * np.log(ws[keep]))))
    return -shannon_entropy(np.clip(wr, 0.0, None)) - cross


def mutual_information(rho: np.ndarray, space: TensorSpace, a, b) -> float:
    """S(A) + S(B) - S(AB) for disjoint factor sets ``a`` and ``b`` of ``space``."""
    a, b = sorted(a), sorted(b)
    rho = check_density(rho, space.total_dim)
    s_a = von_neumann_entropy(partial_trace(rho, space, a))
    s_b = von_neumann_entropy(partial_trace(rho, space, b))
    s_ab = von_neumann_entropy(partial_trace(rho, space, a + b))
    return s_a + s_b - s_ab
