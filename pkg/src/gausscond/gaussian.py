"""Multivariate normal vectors with possibly singular covariance.

A Gaussian here is a mean vector plus a positive semidefinite SymOperator;
no density ever appears, so rank-deficient covariance is a first-class
citizen. The law is pinned down by its characteristic function, pushed
forward through linear maps, and sampled by whitening: mu + D^(1/2) Z with
Z standard normal.

Sampling is reproducible across platforms: uniforms come from numpy's
PCG64 stream for the given seed and are turned into normals with the
Box-Muller transform, so identical (seed, count, model) gives identical
rows everywhere.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimError, InvalidInput, NotPositive
from .spectral import (
    DEFAULT_RANK_TOL_SCALE,
    EPS,
    SymOperator,
    as_linear_map,
    as_sym_operator,
    frob,
    maxabs,
)

INDEPENDENCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Gaussian:
    """Normal law N(mean, cov) on R^n; cov may be singular."""

    mean: np.ndarray
    cov: SymOperator

    def __post_init__(self):
        mu = np.asarray(self.mean, dtype=float).reshape(-1)
        if mu.size < 1:
            raise InvalidInput("mean must have at least one coordinate")
        if not np.all(np.isfinite(mu)):
            raise InvalidInput("mean has non-finite entries")
        cov = as_sym_operator(self.cov)
        if cov.dim != mu.size:
            raise DimError(f"mean has dim {mu.size} but cov has dim {cov.dim}")
        dec = cov.decomposition()
        if dec.eigenvalues[-1] < -dec.rank_tolerance:
            raise NotPositive(
                f"covariance has eigenvalue {dec.eigenvalues[-1]:.3e} below -rank_tolerance"
            )
        mu = mu.copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True, eq=False)
class JointGaussian:
    """Joint law of (S Y, T Y) on R^(m+p), with the block boundary recorded.

    Positive semidefiniteness is validated by joint(), which knows the
    magnitude of the products that built the covariance; the type itself
    only enforces shapes. Entries may carry eigenvalues negative at
    roundoff scale and are never rewritten, so the diagonal blocks stay
    bit-identical to the marginal covariances they came from.
    """

    mean: np.ndarray
    cov: SymOperator
    block_split: int

    def __post_init__(self):
        mu = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = as_sym_operator(self.cov)
        if cov.dim != mu.size:
            raise DimError(f"mean has dim {mu.size} but cov has dim {cov.dim}")
        if not 0 <= self.block_split <= mu.size:
            raise DimError(f"block_split {self.block_split} outside [0, {mu.size}]")
        mu = mu.copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size

    def marginal_first(self) -> Gaussian:
        m = self.block_split
        if m < 1:
            raise DimError("first block is empty")
        return Gaussian(self.mean[:m], SymOperator(self.cov.entries[:m, :m]))

    def marginal_second(self) -> Gaussian:
        m = self.block_split
        if m >= self.dim:
            raise DimError("second block is empty")
        return Gaussian(self.mean[m:], SymOperator(self.cov.entries[m:, m:]))


class IndependenceResult(NamedTuple):
    independent: bool
    residual: float


def char_fn(g: Gaussian, t) -> complex:
    """Characteristic function exp(i <t, mu> - <t, D t>/2) at the point t."""
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.size != g.dim:
        raise DimError(f"argument has dim {t.size} but the law lives on R^{g.dim}")
    if not np.all(np.isfinite(t)):
        raise InvalidInput("argument has non-finite entries")
    quad = float(t @ g.cov.entries @ t)
    lin = float(t @ g.mean)
    return cmath.exp(complex(-0.5 * quad, lin))


def _psd_clamped(
    entries: np.ndarray, rank_tol_scale: float | None, ref: float = 0.0
) -> SymOperator:
    # Keep entries untouched when the spectrum is already nonnegative;
    # clamp eigenvalues in (-tol, 0) introduced by round-off otherwise.
    # ref is the magnitude of the computation that produced the matrix: a
    # product of O(ref) factors may be zero up to roundoff scaled by ref,
    # which the matrix's own (vanishing) spectrum cannot reveal.
    op = SymOperator(entries)
    dec = op.decomposition(rank_tol_scale)
    low = float(dec.eigenvalues[-1])
    if low >= 0.0:
        return op
    scale = DEFAULT_RANK_TOL_SCALE if rank_tol_scale is None else float(rank_tol_scale)
    tol = max(dec.rank_tolerance, scale * op.dim * EPS * ref)
    if low < -tol:
        raise NotPositive(f"matrix has eigenvalue {low:.3e} below -{tol:.3e}")
    return SymOperator(dec._synthesize(np.maximum(dec.eigenvalues, 0.0)))


def pushforward(g: Gaussian, s, rank_tol_scale: float | None = None) -> Gaussian:
    """Law of S Y for Y ~ g: mean S mu, covariance S D S^T."""
    sm = as_linear_map(s)
    if sm.cols != g.dim:
        raise DimError(f"map expects dim {sm.cols} but the law lives on R^{g.dim}")
    if sm.rows < 1:
        raise DimError("map has an empty output space")
    cov = sm.entries @ g.cov.entries @ sm.entries.T
    cov = (cov + cov.T) / 2.0
    ref = frob(sm.entries) ** 2 * frob(g.cov.entries)
    return Gaussian(sm.entries @ g.mean, _psd_clamped(cov, rank_tol_scale, ref))


def joint(g: Gaussian, s, t, rank_tol_scale: float | None = None) -> JointGaussian:
    """Joint law of (S Y, T Y): block mean and block covariance of the pair.

    Diagonal blocks are taken verbatim from pushforward, so the marginals
    of the result reproduce pushforward(g, s) and pushforward(g, t) entry
    for entry. The assembled matrix is validated as positive semidefinite
    up to roundoff of the producing products but never rewritten.
    """
    sm = as_linear_map(s)
    tm = as_linear_map(t)
    if sm.cols != g.dim or tm.cols != g.dim:
        raise DimError(
            f"maps expect dims {sm.cols} and {tm.cols} but the law lives on R^{g.dim}"
        )
    m, p = sm.rows, tm.rows
    if m + p < 1:
        raise DimError("both maps have empty output spaces")
    d = g.cov.entries
    big = np.empty((m + p, m + p))
    big[:m, m:] = sm.entries @ d @ tm.entries.T
    big[m:, :m] = tm.entries @ d @ sm.entries.T
    if m:
        big[:m, :m] = pushforward(g, sm, rank_tol_scale).cov.entries
    if p:
        big[m:, m:] = pushforward(g, tm, rank_tol_scale).cov.entries
    # Exactly symmetric diagonal blocks pass through this average unchanged.
    big = (big + big.T) / 2.0

    op = SymOperator(big)
    dec = op.decomposition(rank_tol_scale)
    low = float(dec.eigenvalues[-1])
    scale = DEFAULT_RANK_TOL_SCALE if rank_tol_scale is None else float(rank_tol_scale)
    ref = (frob(sm.entries) + frob(tm.entries)) ** 2 * frob(d)
    tol = max(dec.rank_tolerance, scale * op.dim * EPS * ref)
    if low < -tol:
        raise NotPositive(f"joint covariance has eigenvalue {low:.3e} below -{tol:.3e}")

    mean = np.concatenate([sm.entries @ g.mean, tm.entries @ g.mean])
    return JointGaussian(mean, op, m)


def independence_test(g: Gaussian, s, t) -> IndependenceResult:
    """Whether S Y and T Y are independent under g.

    For jointly normal vectors independence is exactly the vanishing of the
    cross-covariance S D T^T; the residual reported is its largest entry in
    magnitude, compared against 1e-10 times (1 + ||S|| ||D|| ||T||).
    """
    sm = as_linear_map(s)
    tm = as_linear_map(t)
    if sm.cols != g.dim or tm.cols != g.dim:
        raise DimError(
            f"maps expect dims {sm.cols} and {tm.cols} but the law lives on R^{g.dim}"
        )
    cross = sm.entries @ g.cov.entries @ tm.entries.T
    residual = maxabs(cross)
    limit = INDEPENDENCE_TOL * (1.0 + sm.norm() * g.cov.norm() * tm.norm())
    return IndependenceResult(residual <= limit, residual)


def standard_normal_rows(count: int, dim: int, seed: int) -> np.ndarray:
    """count x dim standard normals, reproducible for a given seed.

    Uniform deviates come from PCG64; pairs (u1, u2) with u1 shifted into
    (0, 1] are mapped through Box-Muller, r cos(a) and r sin(a) filling
    consecutive slots.
    """
    total = count * dim
    pairs = (total + 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:total].reshape(count, dim)


def sample(g: Gaussian, count: int, seed: int, rank_tol_scale: float | None = None) -> np.ndarray:
    """Draw count rows from g as mu + D^(1/2) Z.

    Rows always lie in the support mu + range(D): null directions of the
    covariance get an exact zero factor, not a rounded one.
    """
    if count < 1:
        raise InvalidInput(f"count must be positive, got {count}")
    root = g.cov.decomposition(rank_tol_scale).sqrt_matrix()
    z = standard_normal_rows(count, g.dim, seed)
    return g.mean + z @ root
