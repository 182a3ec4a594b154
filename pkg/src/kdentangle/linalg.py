"""Dense complex linear algebra for small operators.

Everything here works on plain ``numpy`` complex arrays. Matrices are kept
dense; the package targets total dimensions well below ~64, where LAPACK's
dense routines are both the fastest and the most robust option.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-10
PSD_CLIP = 1e-10


class HermitianEigen(NamedTuple):
    """Spectral decomposition with ascending eigenvalues and orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite, 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.isfinite(m.real).all() or not np.isfinite(m.imag).all():
        raise ValueError("matrix entries must be finite")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def _phase_fix_columns(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significantly nonzero entry is real positive."""
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-8 * max(np.abs(col).max(), 1e-300))
        if idx.size:
            pivot = col[idx[0]]
            v[:, k] = col * (np.conj(pivot) / abs(pivot))
    return v


def _canonical_degenerate_order(w: np.ndarray, v: np.ndarray):
    """Reorder columns inside degenerate eigenvalue clusters deterministically.

    Ties are broken by the lexicographic order of the (real, imag) parts of the
    phase-fixed eigenvector entries, rounded to suppress last-bit noise.
    """
    scale = max(np.abs(w).max(), 1.0)
    tie_tol = 1e-12 * scale
    order = np.arange(w.size)
    start = 0
    while start < w.size:
        stop = start + 1
        while stop < w.size and w[stop] - w[start] <= tie_tol:
            stop += 1
        if stop - start > 1:
            block = list(range(start, stop))
            keys = {
                j: tuple(
                    np.round(
                        np.column_stack([v[:, j].real, v[:, j].imag]).ravel(), 12
                    )
                )
                for j in block
            }
            block.sort(key=lambda j: keys[j])
            order[start:stop] = block
        start = stop
    return w[order], v[:, order]


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues come back ascending; eigenvector columns are orthonormal,
    phase-fixed, and deterministically ordered inside degenerate clusters.

    Raises
    ------
    NotHermitian
        If ``||a - a^dag||_inf > tol * ||a||_inf`` (operator norms).
    NoConvergence
        If the underlying factorization does not converge.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {m.shape}")
    scale = np.linalg.norm(m, 2) if m.size else 0.0
    if scale > 0 and np.linalg.norm(m - dagger(m), 2) > tol * scale:
        raise NotHermitian(
            f"symmetry violation {np.linalg.norm(m - dagger(m), 2):.3e} exceeds "
            f"{tol:g} * ||a||"
        )
    try:
        w, v = np.linalg.eigh((m + dagger(m)) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    v = _phase_fix_columns(v)
    w, v = _canonical_degenerate_order(w, v)
    return HermitianEigen(w, v)


def svd(a):
    """Singular value decomposition ``a = u @ diag(s) @ v^dag``.

    Returns ``(u, s, v)`` with descending ``s >= 0`` and orthonormal columns
    in both ``u`` and ``v``.
    """
    m = as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    k = min(m.shape)
    return u[:, :k], s[:k], dagger(vh)[:, :k]


def singular_values(a) -> np.ndarray:
    m = as_matrix(a)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def trace_norm(a) -> float:
    """Sum of singular values (Schatten-1 norm)."""
    return float(singular_values(a).sum())


def operator_norm(a) -> float:
    """Largest singular value (Schatten-infinity norm)."""
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def hermitian_trace_norm(h) -> float:
    """Trace norm of a Hermitian matrix via its eigenvalues (fast path)."""
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def commutator_trace_norm(x, rho) -> float:
    """``||[x, rho]||_1`` for Hermitian ``x`` and ``rho``.

    The commutator of two Hermitian matrices is skew-Hermitian, so ``i[x, rho]``
    is Hermitian and the trace norm reduces to a sum of real eigenvalue moduli.
    """
    c = x @ rho - rho @ x
    return hermitian_trace_norm(1j * c)


def psd_sqrt(a, clip: float = PSD_CLIP) -> np.ndarray:
    """Matrix square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clip, 0)`` are treated as roundoff and clipped to zero;
    anything below ``-clip`` raises ``NotPSD``.
    """
    w, v = hermitian_eig(a)
    if w.size and w[0] < -clip:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{clip:g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first factor acting on the leading subsystem."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(a, dims, keep: str = "A") -> np.ndarray:
    """Trace out one tensor factor of a ``(da*db) x (da*db)`` matrix.

    ``dims`` is ``(da, db)`` with the composite index convention
    ``i = i_a * db + i_b``; ``keep`` selects the surviving subsystem.
    """
    da, db = int(dims[0]), int(dims[1])
    m = as_matrix(a)
    if m.shape != (da * db, da * db):
        raise DimensionMismatch(
            f"matrix shape {m.shape} incompatible with dims ({da}, {db})"
        )
    r = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ibjb->ij", r)
    if keep == "B":
        return np.einsum("aiaj->ij", r)
    raise ValueError("keep must be 'A' or 'B'")


def projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, np.conj(ket))
