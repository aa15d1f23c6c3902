"""Spectral calculus for real symmetric operators.

Everything downstream rests on four primitives built here:

* a deterministic eigendecomposition of symmetric matrices (cyclic Jacobi
  rotations, fixed sweep order, fixed sign convention),
* square roots and pseudo-inverse square roots of positive semidefinite
  operators, with a shared notion of numerical rank,
* orthogonal projectors onto ranges, row spaces and null spaces,
* an invertible completion U of a square map T with U T equal to the
  orthogonal projector onto the row space of T.

Numerical rank is decided by a single threshold,
``rank_tol_scale * n * max|lambda| * machine_eps``, so that all operators
derived from one decomposition agree on which directions count as null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimError, InvalidInput, NotInjective, NotPositive

EPS = float(np.finfo(float).eps)

# Default multiplier for the numerical rank threshold. Overridable per call.
DEFAULT_RANK_TOL_SCALE = 100.0

# Jacobi iteration stops when the off-diagonal Frobenius norm falls below
# JACOBI_OFF_TOL times the Frobenius norm of the input, or after
# JACOBI_SWEEP_LIMIT full sweeps, whichever comes first.
JACOBI_OFF_TOL = 1e-14
JACOBI_SWEEP_LIMIT = 50

# Construction-time validation thresholds.
ORTHONORMALITY_TOL = 1e-12          # scaled by n
EIG_RESIDUAL_TOL = 1e-10            # scaled by 1 + max|lambda|
PROJECTOR_SYM_TOL = 1e-12
PROJECTOR_IDEMPOTENT_TOL = 1e-10
PROJECTOR_TRACE_TOL = 1e-8
LEFT_FACTOR_TOL = 1e-9              # scaled by 1 + ||T||
LU_PIVOT_TOL = 1e-12                # scaled by ||U||


def frob(a) -> float:
    """Frobenius norm, the package-wide scale for tolerance factors."""
    return float(np.linalg.norm(np.asarray(a, dtype=float)))


def maxabs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _as_matrix(a, name: str) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if out.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-d matrix, got ndim={out.ndim}")
    if out.size and not np.all(np.isfinite(out)):
        raise InvalidInput(f"{name} has non-finite entries")
    return out


@dataclass(frozen=True, eq=False)
class SymOperator:
    """Real symmetric operator on R^n with cached eigendecompositions.

    Entries are symmetrized by averaging at construction and frozen
    read-only afterwards. Decompositions are cached per rank_tol_scale so
    repeated use of the same operator never repeats the Jacobi iteration.
    """

    entries: np.ndarray
    dim: int = field(init=False)
    _decomp_cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        a = _as_matrix(self.entries, "SymOperator entries")
        if a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInput(f"SymOperator must be square with dim >= 1, got shape {a.shape}")
        a = (a + a.T) / 2.0
        if not np.array_equal(a, a.T):
            raise InvalidInput("symmetrization failed to produce a symmetric matrix")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "dim", a.shape[0])

    def decomposition(self, rank_tol_scale: float | None = None) -> "SpectralDecomposition":
        key = float(DEFAULT_RANK_TOL_SCALE if rank_tol_scale is None else rank_tol_scale)
        if key <= 0.0:
            raise InvalidInput(f"rank_tol_scale must be positive, got {key}")
        cached = self._decomp_cache.get(key)
        if cached is None:
            cached = eig_sym(self, rank_tol_scale=key)
            self._decomp_cache[key] = cached
        return cached

    def min_eigenvalue(self, rank_tol_scale: float | None = None) -> float:
        return float(self.decomposition(rank_tol_scale).eigenvalues[-1])

    def norm(self) -> float:
        return frob(self.entries)


def as_sym_operator(a) -> SymOperator:
    if isinstance(a, SymOperator):
        return a
    if isinstance(a, Projector):
        return SymOperator(a.entries)
    return SymOperator(np.asarray(a, dtype=float))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Dense real matrix viewed as a map R^cols -> R^rows.

    rows may be zero (a map into the trivial space); cols may not.
    """

    entries: np.ndarray
    rows: int = field(init=False)
    cols: int = field(init=False)

    def __post_init__(self):
        a = _as_matrix(self.entries, "LinearMap entries")
        if a.shape[1] < 1:
            raise InvalidInput(f"LinearMap needs a domain of dim >= 1, got shape {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "rows", a.shape[0])
        object.__setattr__(self, "cols", a.shape[1])

    def norm(self) -> float:
        return frob(self.entries)


def as_linear_map(a) -> LinearMap:
    if isinstance(a, LinearMap):
        return a
    if isinstance(a, (SymOperator, Projector)):
        return LinearMap(a.entries)
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return LinearMap(arr)


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector: symmetric, idempotent, integer trace.

    All three properties are asserted at construction, so holding a
    Projector is itself a certificate that the matrix behaves like one.
    """

    entries: np.ndarray
    subspace_rank: int
    dim: int = field(init=False)

    def __post_init__(self):
        p = _as_matrix(self.entries, "Projector entries")
        if p.shape[0] != p.shape[1]:
            raise InvalidInput(f"Projector must be square, got shape {p.shape}")
        if maxabs(p - p.T) > PROJECTOR_SYM_TOL:
            raise InvalidInput("projector is not symmetric within 1e-12")
        if maxabs(p @ p - p) > PROJECTOR_IDEMPOTENT_TOL:
            raise InvalidInput("projector is not idempotent within 1e-10")
        trace = float(np.trace(p))
        if abs(trace - self.subspace_rank) > PROJECTOR_TRACE_TOL:
            raise InvalidInput(
                f"projector trace {trace} is not within 1e-8 of rank {self.subspace_rank}"
            )
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "entries", p)
        object.__setattr__(self, "dim", p.shape[0])

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.entries, self.dim - self.subspace_rank)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a symmetric operator plus its numerical rank split.

    eigenvalues are sorted descending; column j of eigenvectors pairs with
    eigenvalues[j]. rank counts the eigenvalues above rank_tolerance, and
    for positive semidefinite inputs those occupy exactly the leading
    columns, so the split into signal and null directions is an index cut.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    rank_tolerance: float

    def __post_init__(self):
        for name in ("eigenvalues", "eigenvectors"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def _synthesize(self, diag: np.ndarray) -> np.ndarray:
        v = self.eigenvectors
        out = (v * diag) @ v.T
        return (out + out.T) / 2.0

    def reconstruct(self) -> np.ndarray:
        return self._synthesize(self.eigenvalues)

    def sqrt_matrix(self) -> np.ndarray:
        # Eigenvalues at or below the rank cut are exact zeros here, so the
        # square root has the same range as the positive part. Negatives
        # within tolerance are clamped by the same rule.
        vals = np.where(self.eigenvalues > self.rank_tolerance, self.eigenvalues, 0.0)
        return self._synthesize(np.sqrt(vals))

    def pinv_sqrt_matrix(self) -> np.ndarray:
        vals = np.zeros_like(self.eigenvalues)
        pos = self.eigenvalues > self.rank_tolerance
        vals[pos] = 1.0 / np.sqrt(self.eigenvalues[pos])
        return self._synthesize(vals)

    def pinv_matrix(self) -> np.ndarray:
        vals = np.zeros_like(self.eigenvalues)
        pos = self.eigenvalues > self.rank_tolerance
        vals[pos] = 1.0 / self.eigenvalues[pos]
        return self._synthesize(vals)

    def range_projector_matrix(self) -> np.ndarray:
        v = self.eigenvectors[:, : self.rank]
        out = v @ v.T
        return (out + out.T) / 2.0

    def null_projector_matrix(self) -> np.ndarray:
        return np.eye(self.dim) - self.range_projector_matrix()


def _jacobi_rotate(work: np.ndarray, vecs: np.ndarray, p: int, q: int) -> None:
    # One two-sided rotation in the (p, q) plane annihilating work[p, q].
    apq = work[p, q]
    app = work[p, p]
    aqq = work[q, q]
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e100 or not math.isfinite(theta):
        t = 0.0 if not math.isfinite(theta) else 1.0 / (2.0 * theta)
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    colp = work[:, p].copy()
    colq = work[:, q].copy()
    work[:, p] = c * colp - s * colq
    work[:, q] = s * colp + c * colq
    rowp = work[p, :].copy()
    rowq = work[q, :].copy()
    work[p, :] = c * rowp - s * rowq
    work[q, :] = s * rowp + c * rowq
    # Stable closed forms for the rotated 2x2 block.
    work[p, p] = app - t * apq
    work[q, q] = aqq + t * apq
    work[p, q] = 0.0
    work[q, p] = 0.0

    vp = vecs[:, p].copy()
    vq = vecs[:, q].copy()
    vecs[:, p] = c * vp - s * vq
    vecs[:, q] = s * vp + c * vq


def _jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi iteration. Returns unsorted (eigenvalues, eigenvectors)."""
    n = a.shape[0]
    work = a.astype(float, copy=True)
    vecs = np.eye(n)
    norm_a = frob(a)
    if n == 1 or norm_a == 0.0:
        return np.diag(work).copy(), vecs
    stop = JACOBI_OFF_TOL * norm_a
    for _sweep in range(JACOBI_SWEEP_LIMIT):
        off = frob(work - np.diag(np.diag(work)))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if work[p, q] != 0.0:
                    _jacobi_rotate(work, vecs, p, q)
    return np.diag(work).copy(), vecs


def eig_sym(a, rank_tol_scale: float | None = None) -> SpectralDecomposition:
    """Deterministic eigendecomposition of a symmetric operator.

    Output order is descending by eigenvalue (stable under ties). Each
    eigenvector is signed so its largest-magnitude component is positive,
    ties broken by the lowest index, which makes the result a function of
    the input alone.
    """
    op = as_sym_operator(a)
    scale = DEFAULT_RANK_TOL_SCALE if rank_tol_scale is None else float(rank_tol_scale)
    if scale <= 0.0:
        raise InvalidInput(f"rank_tol_scale must be positive, got {scale}")

    vals, vecs = _jacobi_eigh(op.entries)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        lead = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[lead, j] < 0.0:
            vecs[:, j] = -vecs[:, j]

    largest = maxabs(vals)
    tol = scale * op.dim * largest * EPS
    rank = int(np.count_nonzero(vals > tol))

    # Cheap convergence certificate; failure here means the iteration did
    # not reach its advertised accuracy, which callers must not paper over.
    gram = maxabs(vecs.T @ vecs - np.eye(op.dim))
    if gram > ORTHONORMALITY_TOL * op.dim:
        raise InvalidInput(f"eigenvector columns lost orthonormality: {gram:.3e}")
    resid = np.linalg.norm(op.entries @ vecs - vecs * vals, axis=0)
    limit = EIG_RESIDUAL_TOL * (1.0 + largest)
    worst = float(np.max(resid)) if resid.size else 0.0
    if worst > limit:
        raise InvalidInput(f"eigenpair residual {worst:.3e} exceeds {limit:.3e}")

    return SpectralDecomposition(vals, vecs, rank, tol)


def sqrt_psd(a, rank_tol_scale: float | None = None) -> SymOperator:
    """Unique positive square root of a positive semidefinite operator."""
    op = as_sym_operator(a)
    dec = op.decomposition(rank_tol_scale)
    if dec.eigenvalues[-1] < -dec.rank_tolerance:
        raise NotPositive(
            f"operator has eigenvalue {dec.eigenvalues[-1]:.3e} below -rank_tolerance"
        )
    return SymOperator(dec.sqrt_matrix())


def pinv_sqrt_psd(a, rank_tol_scale: float | None = None) -> SymOperator:
    """Pseudo-inverse square root: 1/sqrt(lambda) on the positive part, 0 on the rest."""
    op = as_sym_operator(a)
    dec = op.decomposition(rank_tol_scale)
    if dec.eigenvalues[-1] < -dec.rank_tolerance:
        raise NotPositive(
            f"operator has eigenvalue {dec.eigenvalues[-1]:.3e} below -rank_tolerance"
        )
    return SymOperator(dec.pinv_sqrt_matrix())


def range_projector(a, rank_tol_scale: float | None = None) -> Projector:
    """Orthogonal projector onto the range of a symmetric operator.

    The range is spanned by the eigenvectors whose eigenvalues clear the
    rank tolerance; for a PSD operator this is exactly the orthogonal
    complement of the null space.
    """
    op = as_sym_operator(a)
    dec = op.decomposition(rank_tol_scale)
    return Projector(dec.range_projector_matrix(), dec.rank)


def row_space_projector(t, rank_tol_scale: float | None = None) -> Projector:
    """Orthogonal projector onto the row space of a (possibly rectangular) map.

    Built from the eigenvectors of T^T T: the positive-eigenvalue columns
    span the row space, and the eigenvalue of each equals the squared norm
    of its image under T.
    """
    tm = as_linear_map(t)
    gram = SymOperator(tm.entries.T @ tm.entries)
    dec = gram.decomposition(rank_tol_scale)
    return Projector(dec.range_projector_matrix(), dec.rank)


def null_space_projector(t, rank_tol_scale: float | None = None) -> Projector:
    """Orthogonal projector onto the null space of a map: I minus its row-space projector."""
    tm = as_linear_map(t)
    gram = SymOperator(tm.entries.T @ tm.entries)
    dec = gram.decomposition(rank_tol_scale)
    return Projector(dec.null_projector_matrix(), tm.cols - dec.rank)


def orthonormal_columns(
    candidates: np.ndarray, drop_tol: float | None = None, scale: float | None = None
) -> np.ndarray:
    """Orthonormal basis for the span of the given columns.

    Modified Gram-Schmidt with column pivoting: at each step the remaining
    column of largest residual norm is taken (ties to the lowest index),
    and columns whose residual falls below drop_tol times scale are
    discarded as dependent. scale defaults to the largest initial column
    norm; pass it explicitly when the columns themselves may be pure noise
    (e.g. a residual of projectors). Deterministic.
    """
    c = np.asarray(candidates, dtype=float).copy()
    if c.ndim != 2:
        raise InvalidInput("orthonormal_columns expects a matrix of column vectors")
    n, k = c.shape
    if k == 0:
        return np.zeros((n, 0))
    scale0 = float(np.max(np.linalg.norm(c, axis=0))) if scale is None else float(scale)
    if scale0 == 0.0:
        return np.zeros((n, 0))
    cut = (1e-12 if drop_tol is None else drop_tol) * scale0
    picked = []
    remaining = list(range(k))
    while remaining:
        norms = np.linalg.norm(c[:, remaining], axis=0)
        best = int(np.argmax(norms))
        if norms[best] <= cut:
            break
        j = remaining.pop(best)
        q = c[:, j] / np.linalg.norm(c[:, j])
        picked.append(q)
        for i in remaining:
            c[:, i] -= q * float(q @ c[:, i])
    if not picked:
        return np.zeros((n, 0))
    basis = np.column_stack(picked)
    # One full re-orthogonalization pass tightens Q^T Q to machine precision.
    for j in range(basis.shape[1]):
        v = basis[:, j]
        for i in range(j):
            v = v - basis[:, i] * float(basis[:, i] @ v)
        nv = float(np.linalg.norm(v))
        if nv > 0.0:
            basis[:, j] = v / nv
    return basis


def orthonormal_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis columns)."""
    b = np.asarray(basis, dtype=float)
    if b.ndim != 2:
        raise InvalidInput("orthonormal_complement expects a matrix of column vectors")
    n = b.shape[0]
    q = orthonormal_columns(b)
    resid = np.eye(n) - q @ q.T
    # The identity's unit columns set the scale; the residual's own largest
    # column must not, or pure roundoff would be promoted to directions.
    comp = orthonormal_columns(resid, drop_tol=1e-8, scale=1.0)
    expect = n - q.shape[1]
    if comp.shape[1] != expect:
        raise InvalidInput(
            f"complement rank {comp.shape[1]} does not match expected {expect}"
        )
    return comp


def lu_min_pivot(a) -> float:
    """Smallest absolute pivot met during a partial-pivoting LU factorization."""
    m = np.asarray(a, dtype=float).copy()
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput("lu_min_pivot expects a square matrix")
    n = m.shape[0]
    smallest = math.inf
    for k in range(n):
        i = k + int(np.argmax(np.abs(m[k:, k])))
        if i != k:
            m[[k, i]] = m[[i, k]]
        piv = m[k, k]
        smallest = min(smallest, abs(piv))
        if piv == 0.0:
            return 0.0
        if k + 1 < n:
            m[k + 1:, k] /= piv
            m[k + 1:, k + 1:] -= np.outer(m[k + 1:, k], m[k, k + 1:])
    return float(smallest)


def extend_to_invertible(basis_in: Sequence, images: Sequence) -> np.ndarray:
    """Extend a map given on independent vectors to an invertible matrix.

    Given k independent vectors w_j and k independent images u_j in R^n,
    returns an n x n invertible U with U w_j = u_j. The extension carries
    an orthonormal basis of span(w)^perp onto an orthonormal basis of
    span(u)^perp, so the completion is as well-conditioned as the data
    allows. With k = 0 the result is the identity.
    """
    b_list = [np.asarray(v, dtype=float).reshape(-1) for v in basis_in]
    u_list = [np.asarray(v, dtype=float).reshape(-1) for v in images]
    if len(b_list) != len(u_list):
        raise DimError(f"{len(b_list)} basis vectors but {len(u_list)} images")
    if not b_list:
        # Nothing is pinned down; the identity is the canonical completion.
        raise InvalidInput("cannot infer the space dimension from empty input")
    n = b_list[0].size
    for v in b_list + u_list:
        if v.size != n:
            raise DimError("all vectors must share one dimension")
        if not np.all(np.isfinite(v)):
            raise InvalidInput("vectors must be finite")
    k = len(b_list)
    if k > n:
        raise NotInjective(f"{k} vectors cannot be independent in dimension {n}")

    b = np.column_stack(b_list)
    u = np.column_stack(u_list)
    if orthonormal_columns(b).shape[1] != k:
        raise NotInjective("basis_in vectors are not linearly independent")
    if orthonormal_columns(u).shape[1] != k:
        raise NotInjective("image vectors are not linearly independent")

    b_full = np.hstack([b, orthonormal_complement(b)])
    u_full = np.hstack([u, orthonormal_complement(u)])
    # U b_full = u_full, so U = u_full b_full^{-1}.
    out = np.linalg.solve(b_full.T, u_full.T).T

    worst = 0.0
    for w, img in zip(b_list, u_list):
        worst = max(worst, maxabs(out @ w - img))
    limit = 1e-9 * (1.0 + max(maxabs(u), maxabs(b)))
    if worst > limit:
        raise InvalidInput(f"extension residual {worst:.3e} exceeds {limit:.3e}")
    return out


def invertible_left_factor(t, rank_tol_scale: float | None = None) -> np.ndarray:
    """Invertible U with U T equal to the projector onto the row space of T.

    T must be square. The factor sends each image T f_j of a positive-
    eigenvalue eigenvector of T^T T back to f_j and extends that map to an
    invertible one. A zero map yields the identity.
    """
    tm = as_linear_map(t)
    if tm.rows != tm.cols:
        raise DimError(f"map must be square, got {tm.rows} x {tm.cols}")
    n = tm.cols
    gram = SymOperator(tm.entries.T @ tm.entries)
    dec = gram.decomposition(rank_tol_scale)
    if dec.rank == 0:
        return np.eye(n)
    basis_in = [tm.entries @ dec.eigenvectors[:, j] for j in range(dec.rank)]
    images = [dec.eigenvectors[:, j] for j in range(dec.rank)]
    out = extend_to_invertible(basis_in, images)

    resid = maxabs(out @ tm.entries - dec.range_projector_matrix())
    limit = LEFT_FACTOR_TOL * (1.0 + tm.norm())
    if resid > limit:
        raise InvalidInput(
            f"left factor residual {resid:.3e} exceeds {limit:.3e}; "
            "the map is too ill-conditioned for this construction"
        )
    pivot = lu_min_pivot(out)
    if pivot <= LU_PIVOT_TOL * frob(out):
        raise InvalidInput(f"left factor is numerically singular (min pivot {pivot:.3e})")
    return out
