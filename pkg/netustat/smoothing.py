"""Product smoothing kernels for the specification test."""

from __future__ import annotations

from enum import StrEnum

import numpy as np
from scipy.stats import norm

from .exceptions import InvalidArgumentError


class SmoothingKernel(StrEnum):
    """Univariate kernels; each is nonnegative, symmetric and integrates to one."""

    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self is SmoothingKernel.GAUSSIAN:
            return norm.pdf(v)
        inside = np.abs(v) <= 1.0
        if self is SmoothingKernel.EPANECHNIKOV:
            return np.where(inside, 0.75 * (1.0 - v * v), 0.0)
        return np.where(inside, 0.5, 0.0)

    def product(self, diff: np.ndarray, bandwidths: np.ndarray) -> np.ndarray:
        """Evaluate ``prod_k K(diff[..., k] / h_k)`` over the trailing axis."""

        return np.prod(self(np.asarray(diff) / bandwidths), axis=-1)


def parse_kernel(name: str | SmoothingKernel) -> SmoothingKernel:
    try:
        return SmoothingKernel(str(name).lower())
    except ValueError as exc:
        choices = ", ".join(k.value for k in SmoothingKernel)
        raise InvalidArgumentError(f"unknown smoothing kernel '{name}' ({choices})") from exc
