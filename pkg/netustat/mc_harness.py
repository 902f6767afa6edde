"""Seeded data-generating processes and the Monte Carlo driver.

Replication ``r`` of a run with master seed ``s`` draws from its own PCG64
stream seeded by ``SeedSequence(s, spawn_key=(r,))``; the results are therefore
identical for any worker count. Normal variates come from the inverse normal
CDF applied to ``(k + 1/2) / 2**53`` with ``k`` a uniform 53-bit integer.

The simulated model is ``y = gamma0 + gamma1 z + dev(z) + u`` with
``z ~ N(0, 25)``; ``dev`` is zero under the null and
``psi * (5 / bump_scale) * phi(z / bump_scale)`` under the alternative.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtri
from scipy.stats import norm

from .const import DOMAIN
from .exceptions import InvalidArgumentError, NetUstatError, ReplicationError
from .spec_test import (
    RegressionData,
    SpecTestConfig,
    fit_null,
    resolve_bandwidth,
    run_test,
)
from .ustat import HallMoments

LOGGER = logging.getLogger(__name__)

_UNIT_53 = 2.0**-53
Z_SD = 5.0

# Full-scale two-way clustering factorizations of n = 2000
REFERENCE_CLUSTERINGS: tuple[tuple[int, int], ...] = ((40, 50), (100, 20))


# -----------------------------
# Random streams
# -----------------------------


def stream_for(seed: int, rep: int) -> np.random.Generator:
    """Return the generator owned by replication ``rep`` of master ``seed``."""

    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Normals by inverse CDF of open-interval uniforms built from 53-bit integers."""

    k = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return ndtri((k + 0.5) * _UNIT_53)


# -----------------------------
# Data-generating processes
# -----------------------------


@dataclass(frozen=True)
class IIDNormal:
    label: str = field(default="Normal", init=False)

    @property
    def params(self) -> str:
        return "N(0,1)"

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return standard_normals(rng, n)


@dataclass(frozen=True)
class AR1:
    """``u_i = rho u_{i-1} + v_i`` started at the stationary law."""

    rho: float
    label: str = field(default="AR", init=False)

    def __post_init__(self) -> None:
        if not -1 < self.rho < 1:
            raise InvalidArgumentError("AR coefficient must satisfy |rho| < 1")

    @property
    def params(self) -> str:
        return f"rho={self.rho:g}"

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        shocks = standard_normals(rng, n)
        x = shocks.copy()
        x[0] = shocks[0] / math.sqrt(1.0 - self.rho * self.rho)
        return lfilter([1.0], [1.0, -self.rho], x)


@dataclass(frozen=True)
class TwoWayClustering:
    """``u_i = (lambda_{i // n2} + F_{i % n2}) / sqrt(2)`` with iid standard normal effects."""

    n1: int
    n2: int
    label: str = field(default="TwoWay", init=False)

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise InvalidArgumentError("cluster counts must be positive")

    @property
    def params(self) -> str:
        return f"({self.n1},{self.n2})"

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.n1 * self.n2 != n:
            raise InvalidArgumentError(
                f"two-way clustering ({self.n1},{self.n2}) needs n = {self.n1 * self.n2}, got {n}"
            )
        rows = standard_normals(rng, self.n1)
        cols = standard_normals(rng, self.n2)
        idx = np.arange(n)
        return (rows[idx // self.n2] + cols[idx % self.n2]) / math.sqrt(2.0)


ErrorModel = IIDNormal | AR1 | TwoWayClustering


@dataclass(frozen=True)
class NullMean:
    gamma0: float = 1.0
    gamma1: float = 1.0

    @property
    def label(self) -> str:
        return "null"

    def deviation(self, z: np.ndarray) -> np.ndarray:
        return np.zeros_like(z)


@dataclass(frozen=True)
class AlternativeMean:
    """Linear mean plus the bump ``psi * (5 / bump_scale) * phi(z / bump_scale)``."""

    psi: float
    bump_scale: float
    gamma0: float = 1.0
    gamma1: float = 1.0

    def __post_init__(self) -> None:
        if not self.bump_scale > 0:
            raise InvalidArgumentError("bump_scale must be positive")

    @property
    def label(self) -> str:
        return f"psi={self.psi:g},tau={self.bump_scale:g}"

    def deviation(self, z: np.ndarray) -> np.ndarray:
        return self.psi * (5.0 / self.bump_scale) * norm.pdf(z / self.bump_scale)


MeanModel = NullMean | AlternativeMean


@dataclass(frozen=True)
class DgpConfig:
    n: int
    error_model: ErrorModel = field(default_factory=IIDNormal)
    mean_model: MeanModel = field(default_factory=NullMean)

    def __post_init__(self) -> None:
        if self.n < 4:  # noqa: PLR2004
            raise InvalidArgumentError("n must be at least 4")
        if isinstance(self.error_model, TwoWayClustering):
            clusters = self.error_model
            if clusters.n1 * clusters.n2 != self.n:
                raise InvalidArgumentError(
                    f"row TwoWay{clusters.params}: n1 * n2 = {clusters.n1 * clusters.n2}"
                    f" does not equal n = {self.n}"
                )

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> DgpConfig:
        """Build from a document validated by ``schemas.SCHEMA_DGP``."""

        errors = doc.get("error_model", {"kind": "iid"})
        error_model: ErrorModel
        if errors["kind"] == "ar1":
            error_model = AR1(float(errors["rho"]))
        elif errors["kind"] == "twoway":
            error_model = TwoWayClustering(int(errors["n1"]), int(errors["n2"]))
        else:
            error_model = IIDNormal()
        means = doc.get("mean_model", {"kind": "null"})
        gammas = {k: float(means[k]) for k in ("gamma0", "gamma1") if k in means}
        mean_model: MeanModel
        if means["kind"] == "alternative":
            mean_model = AlternativeMean(float(means["psi"]), float(means["bump_scale"]), **gammas)
        else:
            mean_model = NullMean(**gammas)
        return cls(int(doc["n"]), error_model, mean_model)


def simulate_dataset(dgp: DgpConfig, rng: np.random.Generator) -> RegressionData:
    """Draw ``z`` first, then the errors, from ``rng``."""

    z = Z_SD * standard_normals(rng, dgp.n)
    u = dgp.error_model.draw(rng, dgp.n)
    mean = dgp.mean_model
    y = (mean.gamma0 + mean.gamma1 * z) + mean.deviation(z) + u
    return RegressionData(y=y, Z=z)


# -----------------------------
# Monte Carlo driver
# -----------------------------


@dataclass(frozen=True)
class McConfig:
    dgp: DgpConfig
    reps: int
    seed: int
    test: SpecTestConfig = field(default_factory=SpecTestConfig)
    keep_statistics: bool = False

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise InvalidArgumentError("reps must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit nonnegative integer")


@dataclass(frozen=True)
class McResult:
    rejection_rate: float
    mc_standard_error: float
    reps: int
    per_rep_T: tuple[float, ...] | None = None


def _replicate(config: McConfig, rep: int) -> tuple[bool, float, str | None]:
    try:
        data = simulate_dataset(config.dgp, stream_for(config.seed, rep))
        result = run_test(data, config.test)
    except (NetUstatError, ArithmeticError, ValueError) as exc:
        return False, math.nan, f"{type(exc).__name__}: {exc}"
    return bool(result.reject), result.T_n, None


def _replicate_batch(config: McConfig, reps: Sequence[int]) -> list[tuple[bool, float, str | None]]:
    """Run ``reps`` in order, stopping after the first failure."""

    outcomes = []
    for rep in reps:
        outcome = _replicate(config, rep)
        outcomes.append(outcome)
        if outcome[2] is not None:
            break
    return outcomes


def _batches(reps: int, size: int) -> Iterator[range]:
    for lo in range(0, reps, size):
        yield range(lo, min(lo + size, reps))


def run_mc(config: McConfig, *, workers: int = 1) -> McResult:
    """Run ``config.reps`` replications and return the rejection rate.

    Aggregation is an integer count in replication order, so the result does
    not depend on ``workers``. The first failing replication aborts the run:
    batches still queued are cancelled and later outcomes are discarded.
    """

    if workers < 1:
        raise InvalidArgumentError("workers must be at least 1")
    started = time.perf_counter()
    if workers == 1:
        outcomes = _replicate_batch(config, range(config.reps))
    else:
        size = max(1, math.ceil(config.reps / (4 * workers)))
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_replicate_batch, config, batch)
                for batch in _batches(config.reps, size)
            ]
            # batches are contiguous, so collecting in submission order keeps rep order
            for future in futures:
                batch = future.result()
                outcomes.extend(batch)
                if batch[-1][2] is not None:
                    pool.shutdown(cancel_futures=True)
                    break
    error = outcomes[-1][2]
    if error is not None:
        rep = len(outcomes) - 1
        LOGGER.error(
            "Replication failed",
            extra={
                "domain": DOMAIN,
                "op": "run_mc",
                "rep": rep,
                "seed": config.seed,
            },
        )
        raise ReplicationError(rep, error)
    rejections = sum(1 for reject, _t, _e in outcomes if reject)
    rate = rejections / config.reps
    LOGGER.info(
        "Monte Carlo cell finished",
        extra={
            "domain": DOMAIN,
            "op": "run_mc",
            "reps": config.reps,
            "rate": rate,
            "elapsed_ms": int((time.perf_counter() - started) * 1000),
        },
    )
    return McResult(
        rejection_rate=rate,
        mc_standard_error=math.sqrt(rate * (1.0 - rate) / config.reps),
        reps=config.reps,
        per_rep_T=tuple(t for _r, t, _e in outcomes) if config.keep_statistics else None,
    )


# -----------------------------
# Table grid
# -----------------------------

TABLE1_COLUMNS: tuple[MeanModel, ...] = (
    NullMean(),
    AlternativeMean(psi=0.5, bump_scale=0.25),
    AlternativeMean(psi=0.1, bump_scale=0.25),
    AlternativeMean(psi=0.1, bump_scale=1.0),
)

TABLE1_CSV_HEADER: tuple[str, ...] = (
    "error_model",
    "params",
    "column_label",
    "rejection_rate",
    "mc_se",
)


@dataclass(frozen=True)
class Table1Cell:
    error_model: str
    params: str
    column_label: str
    result: McResult

    def csv_row(self) -> tuple[str, str, str, float, float]:
        return (
            self.error_model,
            self.params,
            self.column_label,
            self.result.rejection_rate,
            self.result.mc_standard_error,
        )


def table1_rows(clusterings: Sequence[tuple[int, int]] = REFERENCE_CLUSTERINGS) -> list[ErrorModel]:
    return [
        IIDNormal(),
        AR1(0.1),
        AR1(0.5),
        AR1(0.9),
        *(TwoWayClustering(n1, n2) for n1, n2 in clusterings),
    ]


def table1_suite(
    n: int,
    reps: int,
    seed: int,
    test: SpecTestConfig,
    *,
    clusterings: Sequence[tuple[int, int]] = REFERENCE_CLUSTERINGS,
    workers: int = 1,
) -> list[Table1Cell]:
    """Run the 6 x 4 grid of error models by mean models.

    Every cell reuses the master seed, so the columns of a row see the same
    ``z`` and error draws (common random numbers).
    """

    if len(clusterings) != len(REFERENCE_CLUSTERINGS):
        raise InvalidArgumentError(
            f"expected {len(REFERENCE_CLUSTERINGS)} two-way clusterings, got {len(clusterings)}"
        )
    rows = table1_rows(clusterings)
    for model in rows:
        if isinstance(model, TwoWayClustering) and model.n1 * model.n2 != n:
            raise InvalidArgumentError(
                f"row TwoWay{model.params}: n1 * n2 = {model.n1 * model.n2} does not equal n = {n}"
            )
    cells: list[Table1Cell] = []
    for model in rows:
        for column in TABLE1_COLUMNS:
            config = McConfig(DgpConfig(n, model, column), reps=reps, seed=seed, test=test)
            result = run_mc(config, workers=workers)
            cells.append(Table1Cell(model.label, model.params, column.label, result))
    return cells


def default_factorization(n: int) -> tuple[int, int]:
    """Return ``(n1, n2)`` with ``n1 * n2 = n`` and ``n1`` the largest divisor at most sqrt(n)."""

    n1 = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return n1, n // n1


# -----------------------------
# Plug-in kernel moments
# -----------------------------


def _kernel_matrix(
    residuals: np.ndarray,
    Z: np.ndarray,
    config: SpecTestConfig,
    *,
    copy: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    u = np.asarray(residuals, dtype=float).ravel()
    Z = np.asarray(Z, dtype=float).reshape(u.size, -1)
    h = resolve_bandwidth(Z, config)
    if copy is None:
        u_other, z_other = u, Z
    else:
        u_other = np.asarray(copy[0], dtype=float).ravel()
        z_other = np.asarray(copy[1], dtype=float).reshape(u_other.size, -1)
    weights = config.kernel.product(Z[:, None, :] - z_other[None, :, :], h)
    matrix = (u[:, None] * u_other[None, :]) * weights / math.sqrt(float(np.prod(h)))
    np.fill_diagonal(matrix, 0.0)
    return matrix


def _off_diagonal_mean(matrix: np.ndarray) -> float:
    n = matrix.shape[0]
    return float((matrix.sum() - np.trace(matrix)) / (n * (n - 1)))


def estimate_kernel_moments(
    residuals: np.ndarray, Z: np.ndarray, config: SpecTestConfig
) -> HallMoments:
    """Plug-in ``E Gamma^2``, ``E H^2`` and ``E H^4`` for the specification-test kernel.

    ``Gamma(x, y) = E H(X, x) H(X, y)`` is estimated by averaging over the sample.
    """

    h_matrix = _kernel_matrix(residuals, Z, config)
    n = h_matrix.shape[0]
    gamma = h_matrix.T @ h_matrix / n
    return HallMoments(
        e_gamma2=_off_diagonal_mean(gamma * gamma),
        e_h2=_off_diagonal_mean(h_matrix**2),
        e_h4=_off_diagonal_mean(h_matrix**4),
        n=n,
    )


def estimate_gamma_m1(residuals: np.ndarray, Z: np.ndarray, config: SpecTestConfig) -> float:
    """Plug-in ``|E Gamma(X_j, X_l)|`` over distinct pairs ``j != l``.

    Uses ``sum_{j,l} (H^T H)_{jl} = sum_i (sum_j H_ij)^2`` so the n x n Gamma
    matrix is never formed.
    """

    h_matrix = _kernel_matrix(residuals, Z, config)
    n = h_matrix.shape[0]
    if n < 2:  # noqa: PLR2004
        raise InvalidArgumentError("need at least two observations")
    total = float(np.sum(h_matrix.sum(axis=1) ** 2))
    diagonal = float(np.sum(h_matrix * h_matrix))
    return abs(total - diagonal) / (n * n * (n - 1))


def estimate_sigma2(
    residuals: np.ndarray,
    Z: np.ndarray,
    config: SpecTestConfig,
    *,
    copy: tuple[np.ndarray, np.ndarray] | None = None,
) -> float:
    """Plug-in ``sigma_n^2 = sum_{i != k} E H(X_i, Xcopy_k)^2``.

    ``copy`` holds residuals and regressors of an independent replicate; without
    it the sample is paired with itself.
    """

    matrix = _kernel_matrix(residuals, Z, config, copy=copy)
    return float(np.sum(matrix * matrix))


def null_residuals(dgp: DgpConfig, seed: int, rep: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Simulate one dataset and return ``(residuals, Z)`` of the fitted null."""

    data = simulate_dataset(dgp, stream_for(seed, rep))
    _gamma, residuals = fit_null(data)
    return residuals, data.Z


def product_kernel_statistics(n: int, reps: int, seed: int) -> np.ndarray:
    """``S_n / (n sqrt 2)`` for ``H(x, y) = x y`` on iid N(0, 1) samples, one per replication.

    The limit law is ``(chi2_1 - 1) / sqrt 2``, not normal.
    """

    values = np.empty(reps)
    for rep in range(reps):
        x = standard_normals(stream_for(seed, rep), n)
        values[rep] = (x.sum() ** 2 - np.sum(x * x)) / (n * math.sqrt(2.0))
    return values


def normal_statistics(reps: int, seed: int) -> np.ndarray:
    """One exact N(0, 1) draw per replication; calibrates the W1 estimator."""

    return np.array([standard_normals(stream_for(seed, rep), 1)[0] for rep in range(reps)])
