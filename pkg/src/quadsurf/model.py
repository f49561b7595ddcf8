"""Quadratic separating surfaces and the smooth part of the training objective.

A classifier is the sign of ``h(x) = 0.5 * x'Wx + b'x + c`` with ``W``
symmetric.  Everything here works in the reduced parameter vector
``theta = (wtri, b, c)`` of dimension ``d = m(m+1)/2 + m + 1``, where
``wtri`` stacks the diagonal of ``W`` first and then the strict upper
triangle in row-major order.  In that coordinate system the per-sample
margin terms ``F_i(theta) = 1 - y_i * h(x_i)`` are affine and the smooth
regularizer ``f(theta) = sum_i 0.5 * ||W x_i + b||^2`` is a homogeneous
quadratic with constant Hessian ``G``.
"""

from dataclasses import dataclass, field

import numpy as np


class InputError(ValueError):
    """Raised for malformed user-supplied data (bad CSV, non-finite features...)."""


def tri_dim(m: int) -> int:
    """Length of the packed symmetric-matrix vector for an m-by-m matrix."""
    return m * (m + 1) // 2


def param_dim(m: int) -> int:
    """Total dimension d of theta = (wtri, b, c) for m features."""
    return tri_dim(m) + m + 1


@dataclass(frozen=True)
class Dataset:
    """Labeled sample set: feature rows `points` (n, m), labels in {-1, +1}."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        lbl = np.asarray(self.labels, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"points must be a nonempty 2-d array, got shape {pts.shape}")
        if lbl.shape != (pts.shape[0],):
            raise InputError(f"labels shape {lbl.shape} does not match {pts.shape[0]} points")
        if not np.all(np.isfinite(pts)):
            raise InputError("non-finite feature values")
        if not np.all(np.abs(lbl) == 1.0):
            raise InputError("labels must be -1 or +1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lbl)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SurfaceParams:
    """Reduced surface parameters (wtri, b, c).

    `wtri` holds the m diagonal entries of W followed by the strict upper
    triangle (row-major), so the quadratic form is
    ``0.5 x'Wx = sum_j 0.5*w_jj*x_j^2 + sum_{j<k} w_jk*x_j*x_k``.
    """

    wtri: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        wtri = np.asarray(self.wtri, dtype=np.float64).ravel()
        b = np.asarray(self.b, dtype=np.float64).ravel()
        m = b.shape[0]
        if wtri.shape[0] != tri_dim(m):
            raise InputError(f"wtri has length {wtri.shape[0]}, expected {tri_dim(m)} for m={m}")
        if not (np.all(np.isfinite(wtri)) and np.all(np.isfinite(b)) and np.isfinite(self.c)):
            raise InputError("non-finite surface parameters")
        object.__setattr__(self, "wtri", wtri)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def dim(self) -> int:
        return param_dim(self.m)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.wtri, self.b, [self.c]])

    @staticmethod
    def from_vector(theta: np.ndarray, m: int) -> "SurfaceParams":
        theta = np.asarray(theta, dtype=np.float64).ravel()
        if theta.shape[0] != param_dim(m):
            raise InputError(f"theta has length {theta.shape[0]}, expected {param_dim(m)}")
        p = tri_dim(m)
        return SurfaceParams(theta[:p], theta[p:p + m], float(theta[-1]))

    @staticmethod
    def zeros(m: int) -> "SurfaceParams":
        return SurfaceParams(np.zeros(tri_dim(m)), np.zeros(m), 0.0)

    def matrix(self) -> np.ndarray:
        """Assemble the full symmetric W from the packed wtri."""
        m = self.m
        W = np.zeros((m, m))
        W[np.diag_indices(m)] = self.wtri[:m]
        iu, ju = np.triu_indices(m, k=1)
        W[iu, ju] = self.wtri[m:]
        W[ju, iu] = self.wtri[m:]
        return W

    def decision_values(self, points: np.ndarray) -> np.ndarray:
        """h(x) = 0.5 x'Wx + b'x + c for each row x of `points`."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[1] != self.m:
            raise InputError(f"points have {pts.shape[1]} features, surface expects {self.m}")
        W = self.matrix()
        quad = 0.5 * np.einsum("ij,ij->i", pts @ W, pts)
        return quad + pts @ self.b + self.c


def _packed_features(pts: np.ndarray) -> np.ndarray:
    """Rows s(x) with 0.5*x_j^2 in the diagonal slots and x_j*x_k off-diagonal."""
    n, m = pts.shape
    iu, ju = np.triu_indices(m, k=1)
    s = np.empty((n, tri_dim(m)))
    s[:, :m] = 0.5 * pts**2
    s[:, m:] = pts[:, iu] * pts[:, ju]
    return s


def _per_sample_maps(pts: np.ndarray) -> np.ndarray:
    """Stack of the linear maps M_i with M_i @ wtri = W x_i, shape (n, m, p)."""
    n, m = pts.shape
    p = tri_dim(m)
    M = np.zeros((n, m, p))
    rows = np.arange(m)
    M[:, rows, rows] = pts  # diagonal slot j feeds row j with x_j
    iu, ju = np.triu_indices(m, k=1)
    for col, (j, k) in enumerate(zip(iu, ju)):
        M[:, j, m + col] = pts[:, k]
        M[:, k, m + col] = pts[:, j]
    return M


@dataclass(frozen=True)
class DesignCache:
    """Precomputed affine/quadratic structure of a dataset.

    a : (n, d)  row i is the gradient of F_i, namely -y_i * (s(x_i); x_i; 1)
    M : (n, m, p)  per-sample maps wtri -> W x_i
    G : (d, d)  constant Hessian of the smooth part; the c row/column is zero
    """

    a: np.ndarray
    M: np.ndarray
    G: np.ndarray
    m: int = field(default=0)
    n: int = field(default=0)
    d: int = field(default=0)


def build_design(data: Dataset) -> DesignCache:
    """Precompute margins' gradient rows, per-sample maps and the smooth Hessian."""
    pts, y = data.points, data.labels
    n, m = pts.shape
    p = tri_dim(m)
    d = param_dim(m)

    s = _packed_features(pts)
    a = np.empty((n, d))
    a[:, :p] = s
    a[:, p:p + m] = pts
    a[:, p + m] = 1.0
    a *= -y[:, None]

    M = _per_sample_maps(pts)

    # G = sum_i J_i' J_i with J_i = [M_i, I_m, 0]; the c block stays zero.
    G = np.zeros((d, d))
    G[:p, :p] = np.einsum("irj,irk->jk", M, M)
    Msum = M.sum(axis=0)  # (m, p)
    G[:p, p:p + m] = Msum.T
    G[p:p + m, :p] = Msum
    G[p:p + m, p:p + m] = n * np.eye(m)
    G = 0.5 * (G + G.T)  # exact symmetry against accumulation order

    return DesignCache(a=a, M=M, G=G, m=m, n=n, d=d)


def _check_theta(theta: SurfaceParams, cache: DesignCache) -> np.ndarray:
    if theta.m != cache.m:
        raise InputError(f"surface has m={theta.m}, cache has m={cache.m}")
    return theta.to_vector()


def margins(theta: SurfaceParams, cache: DesignCache) -> np.ndarray:
    """Margin terms F_i(theta) = 1 - y_i h(x_i) = 1 + a_i . theta."""
    v = _check_theta(theta, cache)
    return 1.0 + cache.a @ v


def smooth_value(theta: SurfaceParams, cache: DesignCache) -> float:
    """f(theta) = sum_i 0.5 ||W x_i + b||^2, evaluated through the cached maps."""
    _check_theta(theta, cache)
    r = cache.M @ theta.wtri + theta.b  # (n, m)
    return float(0.5 * np.sum(r * r))


def smooth_gradient(theta: SurfaceParams, cache: DesignCache) -> np.ndarray:
    """Gradient of the smooth part; equals G @ theta since f is quadratic."""
    v = _check_theta(theta, cache)
    return cache.G @ v


@dataclass(frozen=True)
class LossValue:
    smooth: float
    count: int
    total: float


def total_loss(theta: SurfaceParams, cache: DesignCache, lam: float) -> LossValue:
    """Smooth part plus lam times the number of strictly violated margins."""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    sm = smooth_value(theta, cache)
    count = int(np.count_nonzero(margins(theta, cache) > 0.0))
    return LossValue(smooth=sm, count=count, total=sm + lam * count)


def predict(theta: SurfaceParams, x: np.ndarray) -> int:
    """Label a single point: +1 when h(x) >= 0, else -1 (ties go to +1)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != theta.m:
        raise InputError(f"point has {x.shape[0]} features, surface expects {theta.m}")
    return 1 if theta.decision_values(x[None, :])[0] >= 0.0 else -1


def predict_many(theta: SurfaceParams, points: np.ndarray) -> np.ndarray:
    """Vectorized `predict` over feature rows."""
    h = theta.decision_values(points)
    return np.where(h >= 0.0, 1.0, -1.0)
