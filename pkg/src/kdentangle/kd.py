"""Kirkwood-Dirac quasiprobability tables over a basis pair, nonreality
functionals, and state reconstruction from a complete table.

The table value at cell ``(x, y)`` is ``<y| P_x rho |y>`` where ``P_x`` is the
projector onto the x-th first-basis vector. For the bipartite forms the first
basis is either a local basis of subsystem A (marginal form, projectors
``P_x (x) I_B``) or a full product basis of both subsystems (full form).
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadSpec, BasisPairSingular, DimensionMismatch
from .states import BipartiteDims, DensityOperator, require_basis

MARGINAL_TOL = 1e-10
RECONSTRUCT_CUTOFF = 1e-8

FORM_FULL = "full"
FORM_MARGINAL = "marginal"


@dataclass(frozen=True)
class KDDistribution:
    """Complex table indexed ``(x, y)`` plus the defining bases.

    ``first_basis`` holds the local A basis for the marginal form and the full
    product basis for the full form; ``second_basis`` is always a basis of the
    composite space.
    """

    values: np.ndarray
    first_basis: np.ndarray
    second_basis: np.ndarray
    form: str
    dims: BipartiteDims


def born_probabilities(rho_mat: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Born probabilities of the rank-1 PVM given by basis columns."""
    return np.einsum("iy,ij,jy->y", np.conj(basis), rho_mat, basis).real


def _check_table(values: np.ndarray, p_first: np.ndarray, p_second: np.ndarray,
                 tol: float = MARGINAL_TOL):
    total = values.sum()
    if abs(total.real - 1.0) > tol or abs(total.imag) > tol:
        raise BadSpec(f"table normalization {total!r} deviates from 1 beyond {tol:g}")
    dev_first = np.abs(values.sum(axis=1) - p_first).max()
    dev_second = np.abs(values.sum(axis=0) - p_second).max()
    if dev_first > tol or dev_second > tol:
        raise BadSpec(
            f"table marginals deviate from Born probabilities by "
            f"{max(dev_first, dev_second):.3e}"
        )


def kd_marginal(rho: DensityOperator, basis_a, basis_y) -> KDDistribution:
    """Table ``values[x, y] = <y| (P_x (x) I_B) rho |y>`` over a local A basis
    and a composite second basis."""
    dims = rho.dims
    a = require_basis(basis_a, dims.da)
    y = require_basis(basis_y, dims.total)
    eye_b = np.eye(dims.db)
    rho_y = rho.matrix @ y
    values = np.empty((dims.da, dims.total), dtype=complex)
    p_first = np.empty(dims.da)
    for x in range(dims.da):
        proj = np.kron(linalg.projector(a[:, x]), eye_b)
        values[x, :] = np.einsum("iy,ij,jy->y", np.conj(y), proj, rho_y)
        p_first[x] = np.trace(proj @ rho.matrix).real
    _check_table(values, p_first, born_probabilities(rho.matrix, y))
    return KDDistribution(values, a, y, FORM_MARGINAL, dims)


def _product_columns(basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    """Product-basis columns ordered by ``x = x_a * db + x_b``."""
    da, db = basis_a.shape[0], basis_b.shape[0]
    cols = np.empty((da * db, da * db), dtype=complex)
    for xa in range(da):
        for xb in range(db):
            cols[:, xa * db + xb] = np.kron(basis_a[:, xa], basis_b[:, xb])
    return cols


def kd_full(rho: DensityOperator, basis_a, basis_b, basis_y) -> KDDistribution:
    """Table over the full product first basis ``{|x_a, x_b>}`` and a composite
    second basis."""
    dims = rho.dims
    a = require_basis(basis_a, dims.da)
    b = require_basis(basis_b, dims.db)
    y = require_basis(basis_y, dims.total)
    cols = _product_columns(a, b)
    ovl = linalg.dagger(y) @ cols                    # ovl[y, x] = <y|x>
    xr = linalg.dagger(cols) @ rho.matrix @ y        # xr[x, y] = <x| rho |y>
    values = ovl.T * xr
    p_first = np.einsum("ix,ij,jx->x", np.conj(cols), rho.matrix, cols).real
    _check_table(values, p_first, born_probabilities(rho.matrix, y))
    return KDDistribution(values, cols, y, FORM_FULL, dims)


def marginalize_over_b(dist: KDDistribution) -> np.ndarray:
    """Sum a full-form table over the B index of the first basis."""
    if dist.form != FORM_FULL:
        raise BadSpec("marginalization requires the full-form table")
    da, db = dist.dims.da, dist.dims.db
    return dist.values.reshape(da, db, -1).sum(axis=1)


def nonreality(dist: KDDistribution) -> float:
    """l1 mass of the imaginary parts of the table."""
    return float(np.abs(dist.values.imag).sum())


def max_nonreality(rho: DensityOperator, basis_a) -> float:
    """Largest nonreality achievable by any second basis, summed over the
    first-basis outcomes.

    For each first-basis projector the supremum over second bases equals half
    the trace norm of its commutator with the state, attained at the eigenbasis
    of ``i [P_x (x) I_B, rho]``; no numeric search is involved.
    """
    dims = rho.dims
    a = require_basis(basis_a, dims.da)
    return _max_nonreality_mat(rho.matrix, dims.as_tuple(), a)


def _max_nonreality_mat(rho_mat: np.ndarray, dims, basis_a: np.ndarray) -> float:
    da, db = dims
    eye_b = np.eye(db)
    total = 0.0
    for x in range(da):
        proj = np.kron(linalg.projector(basis_a[:, x]), eye_b)
        total += linalg.commutator_trace_norm(proj, rho_mat) / 2.0
    return total


def optimal_second_basis(rho_mat: np.ndarray, proj: np.ndarray) -> np.ndarray:
    """Second basis attaining the per-projector nonreality supremum: the
    eigenbasis of the Hermitian matrix ``i [proj, rho]``."""
    h = 1j * (proj @ rho_mat - rho_mat @ proj)
    _, vecs = np.linalg.eigh(h)
    return vecs


def kd_coherence(rho_local, basis) -> float:
    """Single-system coherence functional: half trace norms of the commutators
    of the state with each basis projector, summed."""
    m = linalg.as_matrix(rho_local)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"density must be square, got {m.shape}")
    b = require_basis(basis, m.shape[0])
    total = 0.0
    for x in range(m.shape[0]):
        total += linalg.commutator_trace_norm(linalg.projector(b[:, x]), m) / 2.0
    return total


def reconstruct_state(dist: KDDistribution, cutoff: float = RECONSTRUCT_CUTOFF) -> np.ndarray:
    """Invert a full-form table back into the density matrix.

    Each cell divides by the overlap ``<y|x>``; a pair with overlap magnitude
    at or below ``cutoff`` makes the inversion ill-posed and raises
    ``BasisPairSingular`` naming the offending pair.
    """
    if dist.form != FORM_FULL:
        raise BadSpec("reconstruction requires the full-form table")
    x_cols = dist.first_basis
    y_cols = dist.second_basis
    ovl = linalg.dagger(y_cols) @ x_cols  # ovl[y, x] = <y|x>
    mags = np.abs(ovl)
    if mags.min() <= cutoff:
        y_bad, x_bad = np.unravel_index(np.argmin(mags), mags.shape)
        raise BasisPairSingular(
            f"overlap |<y={y_bad}|x={x_bad}>| = {mags[y_bad, x_bad]:.3e} "
            f"at or below cutoff {cutoff:g}"
        )
    weights = dist.values / ovl.T
    return x_cols @ weights @ linalg.dagger(y_cols)


def kd_to_csv(dist: KDDistribution, fh) -> None:
    """Write the table as ``x, y, re, im`` rows in x-major order."""
    writer = csv.writer(fh)
    writer.writerow(["x", "y", "re", "im"])
    nx, ny = dist.values.shape
    for x in range(nx):
        for y in range(ny):
            v = dist.values[x, y]
            writer.writerow([x, y, f"{v.real:.12g}", f"{v.imag:.12g}"])
