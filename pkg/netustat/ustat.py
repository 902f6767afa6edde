"""Second-order U-statistics.

``S_n = sum_{i != k} H(X_i, X_k)`` for a symmetric kernel ``H``. Kernels are
vectorised over rows: ``func(x, y)`` receives two ``(B, d)`` arrays and returns
``B`` values. Kernels that declare an analytic projection
``Hhat_k(x) = E H(X_k, x)`` and means ``theta_ik = E H(X_i, X_k)`` can be split
into mean, linear and degenerate parts.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np

from .const import DOMAIN, PAIR_BLOCK_ROWS, SYMMETRY_PAIRS, SYMMETRY_TOLERANCE
from .exceptions import InvalidArgumentError, UnsupportedOperationError
from .index_space import IndexSpace
from .smoothing import SmoothingKernel

LOGGER = logging.getLogger(__name__)

PairFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]
ProjectionFunc = Callable[[int, np.ndarray], np.ndarray]
ThetaFunc = Callable[[int, int], float]


# -----------------------------
# Types
# -----------------------------


@dataclass(frozen=True, eq=False)
class Sample:
    """Observations ``X`` (n rows by d columns), optionally placed on an index space."""

    X: np.ndarray
    space: IndexSpace | None = None

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:  # noqa: PLR2004
            raise InvalidArgumentError("sample must be an n x d array")
        if X.shape[0] < 2:  # noqa: PLR2004
            raise InvalidArgumentError("a U-statistic needs at least 2 observations")
        if not np.all(np.isfinite(X)):
            raise InvalidArgumentError("sample entries must be finite")
        if self.space is not None and self.space.n != X.shape[0]:
            raise InvalidArgumentError("sample size does not match the index space")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])


@dataclass(frozen=True, eq=False)
class UKernel:
    """Symmetric pair kernel with an optional analytic Hoeffding projection."""

    func: PairFunc
    projection: ProjectionFunc | None = None
    theta: ThetaFunc | None = None
    degenerate: bool = False
    name: str = "kernel"

    @classmethod
    def identically_distributed(
        cls,
        func: PairFunc,
        projection: Callable[[np.ndarray], np.ndarray],
        theta: float,
        *,
        degenerate: bool = False,
        name: str = "kernel",
    ) -> UKernel:
        """Kernel whose projection and mean do not depend on the indices."""

        return cls(
            func,
            projection=lambda _k, x: projection(x),
            theta=lambda _i, _k: theta,
            degenerate=degenerate,
            name=name,
        )

    @property
    def has_projection(self) -> bool:
        return self.projection is not None and self.theta is not None

    def symmetrized(self) -> UKernel:
        func = self.func
        return replace(
            self,
            func=lambda x, y: 0.5 * (func(x, y) + func(y, x)),
            name=f"sym({self.name})",
        )


@dataclass(frozen=True)
class HallMoments:
    """Moments entering the degenerate-kernel normality ratio."""

    e_gamma2: float
    e_h2: float
    e_h4: float
    n: int


# -----------------------------
# Evaluation
# -----------------------------


def check_symmetry(kernel: UKernel, sample: Sample, *, seed: int = 0) -> UKernel:
    """Check ``H(x, y) == H(y, x)`` on sample pairs; symmetrise with a warning if not."""

    rng = np.random.default_rng(seed)
    first = rng.integers(0, sample.n, size=SYMMETRY_PAIRS)
    second = rng.integers(0, sample.n, size=SYMMETRY_PAIRS)
    x, y = sample.X[first], sample.X[second]
    forward = np.asarray(kernel.func(x, y), dtype=float)
    backward = np.asarray(kernel.func(y, x), dtype=float)
    scale = np.maximum(1.0, np.abs(forward))
    if np.all(np.abs(forward - backward) <= SYMMETRY_TOLERANCE * scale):
        return kernel
    LOGGER.warning(
        "Kernel is not symmetric; using 0.5 * (H(x, y) + H(y, x))",
        extra={"domain": DOMAIN, "op": "kernel_symmetrize", "kernel": kernel.name},
    )
    return kernel.symmetrized()


def _upper_pairs(n: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.arange(lo, hi)
    ii = np.repeat(rows, n - 1 - rows)
    jj = np.concatenate([np.arange(i + 1, n) for i in rows]) if hi > lo else rows
    return ii, jj


def evaluate(kernel: UKernel, sample: Sample) -> tuple[float, float]:
    """Return ``(S_n, S_n / (n (n - 1)))``.

    Unordered pairs are summed block by block in row-major order and doubled.
    """

    kernel = check_symmetry(kernel, sample)
    n = sample.n
    total = 0.0
    for lo in range(0, n - 1, PAIR_BLOCK_ROWS):
        hi = min(lo + PAIR_BLOCK_ROWS, n - 1)
        ii, jj = _upper_pairs(n, lo, hi)
        total += float(np.sum(kernel.func(sample.X[ii], sample.X[jj])))
    s_n = 2.0 * total
    return s_n, s_n / (n * (n - 1))


def naive_evaluate(kernel: UKernel, sample: Sample) -> float:
    """Sum ``H(X_i, X_k)`` over ordered pairs one pair at a time."""

    total = 0.0
    X = sample.X
    for i in range(sample.n):
        for k in range(sample.n):
            if i != k:
                total += float(np.asarray(kernel.func(X[i : i + 1], X[k : k + 1]))[0])
    return total


def _off_diagonal_sum(matrix: np.ndarray) -> float:
    return float(matrix.sum() - np.trace(matrix))


def hoeffding_decompose(kernel: UKernel, sample: Sample) -> tuple[float, float, float]:
    """Split ``S_n`` into ``(sum theta_ik, S_hat, S_star)``.

    ``S_hat = 2 (n - 1) sum_i h_i`` with
    ``h_i = (n - 1)^-1 sum_{k != i} (Hhat_k(X_i) - theta_ik)`` and ``S_star`` the
    degenerate remainder, so the three parts add back to ``S_n``.
    """

    projection, theta_of = kernel.projection, kernel.theta
    if projection is None or theta_of is None:
        raise UnsupportedOperationError(
            f"kernel '{kernel.name}' has no analytic projection; decomposition needs one"
        )
    n = sample.n
    s_n, _mean = evaluate(kernel, sample)
    # proj[i, k] = Hhat_k(X_i)
    proj = np.column_stack([np.asarray(projection(k, sample.X), float) for k in range(n)])
    theta = np.array([[theta_of(i, k) for k in range(n)] for i in range(n)], dtype=float)
    theta_sum = _off_diagonal_sum(theta)
    h = _off_diagonal_sum_rows(proj - theta) / (n - 1)
    s_hat = 2.0 * (n - 1) * float(h.sum())
    s_star = s_n - 2.0 * _off_diagonal_sum(proj) + theta_sum
    return theta_sum, s_hat, s_star


def _off_diagonal_sum_rows(matrix: np.ndarray) -> np.ndarray:
    return matrix.sum(axis=1) - np.diag(matrix)


def degenerate_projection_check(kernel: UKernel, sample: Sample, copy: Sample) -> float:
    """Return the mean over i of ``sum_k H(X_i, Xcopy_k) / n``.

    For a degenerate kernel and an independent copy this is zero up to
    Monte Carlo error.
    """

    if copy.n != sample.n or copy.X.shape[1] != sample.X.shape[1]:
        raise InvalidArgumentError("copy must have the sample's shape")
    n = sample.n
    total = 0.0
    for i in range(n):
        x = np.repeat(sample.X[i : i + 1], n, axis=0)
        total += float(np.sum(kernel.func(x, copy.X))) / n
    return total / n


def hall_diagnostic(moments: HallMoments) -> float:
    """Return ``(E Gamma^2 + E H^4 / n) / (E H^2)^2``."""

    if not moments.e_h2 > 0:
        raise InvalidArgumentError("E H^2 must be positive")
    if moments.n < 1:
        raise InvalidArgumentError("n must be positive")
    if moments.e_gamma2 < 0 or moments.e_h4 < 0:
        raise InvalidArgumentError("moments must be nonnegative")
    return (moments.e_gamma2 + moments.e_h4 / moments.n) / moments.e_h2**2


# -----------------------------
# Built-in kernels
# -----------------------------


def variance_kernel(*, mean: float | None = None, var: float | None = None) -> UKernel:
    """``H(x, y) = (x - y)^2 / 2`` on the first column; its mean is the sample variance."""

    def func(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return 0.5 * (x[:, 0] - y[:, 0]) ** 2

    if mean is None or var is None:
        return UKernel(func, name="variance")
    return UKernel.identically_distributed(
        func, lambda x: 0.5 * (var + (x[:, 0] - mean) ** 2), float(var), name="variance"
    )


def product_kernel(*, mean: float | None = None) -> UKernel:
    """``H(x, y) = x y`` on the first column; degenerate when the declared mean is 0."""

    def func(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x[:, 0] * y[:, 0]

    if mean is None:
        return UKernel(func, name="product")
    return UKernel.identically_distributed(
        func, lambda x: mean * x[:, 0], mean * mean, degenerate=mean == 0, name="product"
    )


def spec_test_kernel(bandwidths: np.ndarray, smoother: SmoothingKernel) -> UKernel:
    """``H(x, y) = b^{-d/2} u_x u_y K((z_x - z_y) / b)`` on rows ``(u, z_1..z_d)``.

    Degenerate under a mean-zero error: both projection and mean vanish.
    """

    h = np.asarray(bandwidths, dtype=float).ravel()
    norm_const = float(np.prod(h)) ** -0.5

    def func(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return norm_const * x[:, 0] * y[:, 0] * smoother.product(x[:, 1:] - y[:, 1:], h)

    return UKernel.identically_distributed(
        func, lambda x: np.zeros(x.shape[0]), 0.0, degenerate=True, name="spec_test"
    )
