"""Simulation designs: Gaussian panels, mean shifts, and SBM network series.

Covariances are sampled in O(p) per row: AR(rho) through the stationary
recursion across the coordinate index, compound symmetry through one shared
scalar per row.  Network series are stochastic block models whose adjacency
matrices are flattened by ``vech`` (strict lower triangle, column-major).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datamodel import DataMatrix
from .errors import (
    BadLocationError,
    DimensionMismatchError,
    InvalidCovarianceError,
    MeanOutOfRangeError,
    NonZeroDiagonalError,
    NotSymmetricError,
)

COV_IDENTITY = "identity"
COV_AR = "ar"
COV_CS = "cs"


@dataclass(frozen=True)
class CovarianceSpec:
    """Row covariance: identity, AR(rho) (sigma_ij = rho^|i-j|), or compound
    symmetry (1 on the diagonal, rho off it)."""

    kind: str = COV_IDENTITY
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in (COV_IDENTITY, COV_AR, COV_CS):
            raise InvalidCovarianceError(f"unknown covariance kind {self.kind!r}")
        if self.kind == COV_AR and not abs(self.rho) < 1:
            raise InvalidCovarianceError(f"AR needs |rho| < 1, got {self.rho}")
        if self.kind == COV_CS and not 0 <= self.rho < 1:
            # the O(p) shared-scalar construction needs rho >= 0
            raise InvalidCovarianceError(f"CS needs rho in [0, 1), got {self.rho}")


def gen_gaussian(n: int, p: int, cov: CovarianceSpec = CovarianceSpec(),
                 seed: int = 0) -> DataMatrix:
    """n i.i.d. rows of N(0, Sigma) for the given covariance spec."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, p))
    if cov.kind == COV_IDENTITY:
        out = z
    elif cov.kind == COV_AR:
        rho = cov.rho
        out = np.empty_like(z)
        out[:, 0] = z[:, 0]
        scale = math.sqrt(1.0 - rho * rho)
        for j in range(1, p):
            out[:, j] = rho * out[:, j - 1] + scale * z[:, j]
    else:
        w = rng.standard_normal((n, 1))
        out = math.sqrt(1.0 - cov.rho) * z + math.sqrt(cov.rho) * w
    return DataMatrix(out)


@dataclass(frozen=True)
class MeanShiftSpec:
    """Shifts (k, delta): delta is added to the mean of every row t > k."""

    shifts: tuple[tuple[int, np.ndarray], ...]

    def __post_init__(self):
        locs = [k for k, _ in self.shifts]
        if any(l2 <= l1 for l1, l2 in zip(locs, locs[1:])):
            raise BadLocationError(f"shift locations must be strictly increasing: {locs}")
        canon = tuple((int(k), np.asarray(d, dtype=np.float64)) for k, d in self.shifts)
        for _, d in canon:
            d.setflags(write=False)
        object.__setattr__(self, "shifts", canon)


def apply_mean_shifts(X: DataMatrix, spec: MeanShiftSpec) -> DataMatrix:
    """Add each shift to all rows after its location (shifts accumulate)."""
    out = X.values.copy()
    for k, delta in spec.shifts:
        if not (1 <= k <= X.n - 1):
            raise BadLocationError(f"shift location {k} outside 1..{X.n - 1}")
        if delta.shape != (X.p,):
            raise DimensionMismatchError(
                f"shift has shape {delta.shape}, data has p={X.p}"
            )
        out[k:] += delta
    return DataMatrix(out, names=X.names)


def sparse_dense_shift(p: int, d: int, delta: float) -> np.ndarray:
    """The power-study shift sqrt(delta/d) on the first d coordinates."""
    if not (1 <= d <= p):
        raise DimensionMismatchError(f"support size d={d} outside 1..{p}")
    out = np.zeros(p)
    out[:d] = math.sqrt(delta / d)
    return out


def three_break_shifts(p: int, k1: float, d1: int, k2: float, d2: int,
                       locations: tuple[int, int, int] = (30, 60, 90)) -> MeanShiftSpec:
    """The three-break design: theta1 = -theta2 = 2 sqrt(k1/d1) on the first
    d1 coordinates, theta3 = 2 sqrt(k2/d2) on the first d2 coordinates."""
    theta1 = np.zeros(p)
    theta1[:d1] = 2.0 * math.sqrt(k1 / d1)
    theta3 = np.zeros(p)
    theta3[:d2] = 2.0 * math.sqrt(k2 / d2)
    l1, l2, l3 = locations
    return MeanShiftSpec(((l1, theta1), (l2, -2.0 * theta1), (l3, theta3 + theta1)))


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic block model: mean matrix mu_t Z Q Z^T minus its diagonal."""

    m: int
    memberships: np.ndarray  # m x r 0/1, each row sums to at most 1
    connectivity: np.ndarray  # r x r in [0, 1]

    def __post_init__(self):
        z = np.asarray(self.memberships, dtype=np.float64)
        qmat = np.asarray(self.connectivity, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] != self.m:
            raise DimensionMismatchError(f"memberships must be {self.m} x r")
        if not np.all((z == 0) | (z == 1)) or np.any(z.sum(axis=1) > 1):
            raise ValueError("each node belongs to at most one block")
        r = z.shape[1]
        if qmat.shape != (r, r):
            raise DimensionMismatchError(f"connectivity must be {r} x {r}")
        if np.any(qmat < 0) or np.any(qmat > 1):
            raise MeanOutOfRangeError("connectivity entries must be in [0, 1]")
        z.setflags(write=False)
        qmat.setflags(write=False)
        object.__setattr__(self, "memberships", z)
        object.__setattr__(self, "connectivity", qmat)

    def base_means(self) -> np.ndarray:
        """Z Q Z^T with the diagonal zeroed (unit intensity)."""
        theta = self.memberships @ self.connectivity @ self.memberships.T
        np.fill_diagonal(theta, 0.0)
        return theta


def first_block_sbm(m: int, c: float) -> SbmSpec:
    """Single-community design: r = c*m nodes form singleton blocks (the rest
    are isolated) and Q is all ones, so base edge probability is 1 inside the
    first r nodes."""
    r = int(round(c * m))
    if not (1 <= r <= m):
        raise DimensionMismatchError(f"r = c*m = {r} outside 1..{m}")
    z = np.zeros((m, r))
    z[:r] = np.eye(r)
    return SbmSpec(m=m, memberships=z, connectivity=np.ones((r, r)))


def gen_sbm_series(n: int, spec: SbmSpec, intensity, seed: int = 0) -> DataMatrix:
    """n vech'd adjacency matrices with edge means mu_t * (Z Q Z^T - diag).

    ``intensity`` is a scalar, a length-n array, or a callable t -> mu_t
    (t is 1-based).  Every induced Bernoulli mean must lie in [0, 1].
    """
    base = spec.base_means()
    rows, cols = np.triu_indices(spec.m, 1)
    base_v = base[rows, cols]
    if callable(intensity):
        mus = np.array([float(intensity(t)) for t in range(1, n + 1)])
    else:
        mus = np.broadcast_to(np.asarray(intensity, dtype=np.float64), (n,)).copy()
    means = mus[:, None] * base_v[None, :]
    if np.any(means < 0) or np.any(means > 1):
        raise MeanOutOfRangeError("some Bernoulli means fall outside [0, 1]")
    rng = np.random.default_rng(seed)
    data = (rng.random((n, base_v.size)) < means).astype(np.float64)
    return DataMatrix(data)


def vech(adjacency: np.ndarray) -> np.ndarray:
    """Strict lower triangle of a symmetric zero-diagonal matrix, column-major.

    Entry (i, j) with j < i appears at the position ordered by (j, i); for a
    symmetric matrix this equals the strict upper triangle read row-major.
    """
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"adjacency must be square, got {a.shape}")
    if not np.array_equal(a, a.T):
        raise NotSymmetricError("adjacency matrix is not symmetric")
    if np.any(np.diag(a) != 0):
        raise NonZeroDiagonalError("adjacency diagonal must be zero")
    rows, cols = np.triu_indices(a.shape[0], 1)
    return a[rows, cols].astype(np.float64)


def vech_inverse(values: np.ndarray, m: int) -> np.ndarray:
    """Rebuild the symmetric zero-diagonal matrix from its vech vector."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (m * (m - 1) // 2,):
        raise DimensionMismatchError(
            f"expected {m * (m - 1) // 2} entries for m={m}, got {values.shape}"
        )
    out = np.zeros((m, m))
    rows, cols = np.triu_indices(m, 1)
    out[rows, cols] = values
    out[cols, rows] = values
    return out
