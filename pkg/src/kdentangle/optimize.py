"""Search over orthonormal bases and over pure-state decomposition isometries.

Both searches run a seeded multistart of derivative-free simplex descent over
an angle parametrization of the unitary group: ``n(n-1)/2`` two-index rotations
(rotation angle plus relative phase each) followed by ``n`` diagonal phases,
``n^2`` real parameters in total. Zero angles materialize the identity.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import linalg
from .errors import BadParamCount, BadSpec, OptimizerFailed
from .states import BipartitePureState, DensityOperator

RANK_TOL = 1e-12
TERM_WEIGHT_FLOOR = 1e-12
ROOF_CAP = 16


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    tol: float = 1e-6
    seed: int = 0
    simplex_scale: float = 0.3

    def __post_init__(self):
        if self.restarts < 1:
            raise BadSpec(f"restarts must be >= 1, got {self.restarts}")
        if self.tol <= 0:
            raise BadSpec(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class SearchDiagnostics:
    restarts: int
    best_start: str
    iterations: int
    converged: bool


@dataclass(frozen=True)
class BasisParams:
    """Angle vector for a ``dim x dim`` unitary; length must be ``dim**2``."""

    dim: int
    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).reshape(-1)
        if a.size != angle_count(self.dim):
            raise BadParamCount(
                f"expected {angle_count(self.dim)} angles for dim {self.dim}, "
                f"got {a.size}"
            )
        object.__setattr__(self, "angles", a)


def angle_count(dim: int) -> int:
    return dim * dim


def unitary_from_angles(angles, dim: int) -> np.ndarray:
    """Materialize the angle vector as a unitary matrix."""
    a = np.asarray(angles, dtype=float).reshape(-1)
    if a.size != angle_count(dim):
        raise BadParamCount(
            f"expected {angle_count(dim)} angles for dim {dim}, got {a.size}"
        )
    u = np.eye(dim, dtype=complex)
    k = 0
    for i in range(dim):
        for j in range(i + 1, dim):
            th, ph = a[2 * k], a[2 * k + 1]
            c, s = np.cos(th), np.sin(th) * np.exp(1j * ph)
            gi, gj = u[i, :].copy(), u[j, :].copy()
            u[i, :] = c * gi - np.conj(s) * gj
            u[j, :] = s * gi + c * gj
            k += 1
    u *= np.exp(1j * a[2 * k:])[:, None]
    return u


def materialize_basis(params: BasisParams) -> np.ndarray:
    return unitary_from_angles(params.angles, params.dim)


def _simplex(x0: np.ndarray, scale: float) -> np.ndarray:
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    simplex[1:, :] += np.eye(n) * scale
    return simplex


def _multistart(objective, nang: int, config: OptimizerConfig, extra_starts):
    """Seeded multistart simplex descent.

    ``extra_starts`` is a list of ``(label, x0)`` evaluated before the seeded
    uniform restarts; the zero vector ("identity") is always included. Ties in
    the best value break toward the lexicographically smallest angle vector.
    """
    starts = [("identity", np.zeros(nang))]
    starts.extend(extra_starts)
    for i in range(config.restarts):
        rng = np.random.default_rng([config.seed, i])
        starts.append((f"restart{i}", rng.uniform(-np.pi, np.pi, nang)))
    best = None
    iterations = 0
    converged = False
    for label, x0 in starts:
        res = _scipy_minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options=dict(
                maxiter=config.max_iters,
                xatol=1e-7,
                fatol=1e-9,
                adaptive=True,
                initial_simplex=_simplex(x0, config.simplex_scale),
            ),
        )
        iterations += int(res.nit)
        converged = converged or bool(res.success)
        for val, vec in ((float(res.fun), np.asarray(res.x)), (float(objective(x0)), x0)):
            key = (val, tuple(vec))
            if best is None or key < best[0]:
                best = (key, vec, label)
    (best_val, _), best_x, best_label = best
    diag = SearchDiagnostics(
        restarts=config.restarts,
        best_start=best_label,
        iterations=iterations,
        converged=converged,
    )
    return best_x, best_val, diag


def minimize_over_bases(objective, dim: int, config: OptimizerConfig | None = None,
                        warm_starts=()):
    """Minimize ``objective(basis)`` over orthonormal bases of dimension ``dim``.

    ``warm_starts`` are unitary matrices used as additional start points; each
    start searches angles relative to its own reference unitary, so zero angles
    reproduce the warm start exactly. Returns ``(basis, value, diagnostics)``.

    The result never exceeds the objective at the identity basis or at any
    start point, and is bit-reproducible for a fixed config.
    """
    config = config or OptimizerConfig()
    nang = angle_count(dim)
    refs = {"identity": np.eye(dim, dtype=complex)}
    extra = []
    for w_idx, w in enumerate(warm_starts):
        label = f"warm{w_idx}"
        refs[label] = np.asarray(w, dtype=complex)
        extra.append((label, np.zeros(nang)))

    best = None
    iterations = 0
    converged = False

    def run(label, ref, x0):
        nonlocal best, iterations, converged
        wrapped = lambda a: objective(ref @ unitary_from_angles(a, dim))
        res = _scipy_minimize(
            wrapped,
            x0,
            method="Nelder-Mead",
            options=dict(
                maxiter=config.max_iters,
                xatol=1e-7,
                fatol=1e-9,
                adaptive=True,
                initial_simplex=_simplex(x0, config.simplex_scale),
            ),
        )
        iterations += int(res.nit)
        converged = converged or bool(res.success)
        for val, vec in ((float(res.fun), np.asarray(res.x)), (float(wrapped(x0)), x0)):
            key = (val, tuple(vec))
            if best is None or key < best[0]:
                best = (key, ref, vec, label)

    run("identity", refs["identity"], np.zeros(nang))
    for label, x0 in extra:
        run(label, refs[label], x0)
    for i in range(config.restarts):
        rng = np.random.default_rng([config.seed, i])
        run(f"restart{i}", refs["identity"], rng.uniform(-np.pi, np.pi, nang))

    (best_val, _), best_ref, best_x, best_label = best
    basis = best_ref @ unitary_from_angles(best_x, dim)
    diag = SearchDiagnostics(
        restarts=config.restarts,
        best_start=best_label,
        iterations=iterations,
        converged=converged,
    )
    return basis, best_val, diag


@dataclass(frozen=True)
class ConvexRoofResult:
    """Minimal decomposition average found, with the achieving decomposition."""

    value: float
    probabilities: np.ndarray
    pure_states: list
    diagnostics: SearchDiagnostics


def _decomposition(angles, weighted_vecs, terms: int, rank: int):
    """Decomposition vectors ``psi_tilde[:, k] = sum_j W[k, j] sqrt(q_j) e_j``
    for the isometry given by the first ``rank`` columns of the angle unitary."""
    w = unitary_from_angles(angles, terms)[:, :rank]
    return weighted_vecs @ w.T


def minimize_convex_roof(rho: DensityOperator, pure_functional,
                         config: OptimizerConfig | None = None,
                         terms: int | None = None) -> ConvexRoofResult:
    """Minimize the decomposition average of a pure-state functional.

    ``pure_functional`` maps a unit-norm amplitude vector to a real number.
    Decompositions of size ``terms`` are parametrized through isometries
    applied to the square-root eigenvectors, which reaches every decomposition
    of that size. Zero angles reproduce the eigendecomposition, so the result
    never exceeds its average.

    The default size is ``min(2 * rank, 16)``: the simplex search runs over
    ``terms**2`` angles, which stops converging within the iteration budget
    well before the ``rank**2`` purification bound is reached, so larger
    decompositions must be requested explicitly.
    """
    config = config or OptimizerConfig()
    q, evecs = np.linalg.eigh(rho.matrix)
    keep = q > RANK_TOL
    q, evecs = q[keep], evecs[:, keep]
    rank = int(q.size)
    k_terms = int(terms) if terms is not None else min(2 * rank, ROOF_CAP)
    if k_terms < rank:
        raise BadSpec(f"terms {k_terms} below state rank {rank}")
    weighted = evecs * np.sqrt(q)[None, :]

    def objective(angles):
        psi = _decomposition(angles, weighted, k_terms, rank)
        total = 0.0
        for k in range(k_terms):
            col = psi[:, k]
            p = float(np.vdot(col, col).real)
            if p < TERM_WEIGHT_FLOOR:
                continue
            total += p * pure_functional(col / np.sqrt(p))
        return total

    best_x, best_val, diag = _multistart(objective, angle_count(k_terms), config, [])

    psi = _decomposition(best_x, weighted, k_terms, rank)
    probs, pure_states = [], []
    dims = rho.dims
    reassembled = np.zeros_like(rho.matrix)
    for k in range(k_terms):
        col = psi[:, k]
        p = float(np.vdot(col, col).real)
        reassembled = reassembled + np.outer(col, np.conj(col))
        if p < TERM_WEIGHT_FLOOR:
            continue
        probs.append(p)
        pure_states.append(BipartitePureState(dims, col / np.linalg.norm(col)))
    probs = np.asarray(probs)
    if abs(probs.sum() - 1.0) > 1e-9:
        raise OptimizerFailed(f"decomposition weights sum to {probs.sum()!r}")
    if linalg.trace_norm(reassembled - rho.matrix) > 1e-8:
        raise OptimizerFailed("decomposition does not reassemble the input state")
    return ConvexRoofResult(best_val, probs, pure_states, diag)
