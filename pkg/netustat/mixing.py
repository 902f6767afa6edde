"""Beta-mixing coefficients and maximal couplings.

Two concerns live here:

* exact beta coefficients of finite joint distributions together with a
  constructive coupling (A, Y, Y~) whose mismatch probability equals beta;
* analytic mixing-rate models ``beta(n1, n2, m)`` that the bound evaluators
  take as inputs. ``n2`` may be ``math.inf`` for the geometric and
  dependency-graph models.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from .const import DOMAIN, PMF_TOLERANCE
from .exceptions import ExtrapolationError, InvalidArgumentError

LOGGER = logging.getLogger(__name__)

MixingKind = Literal["independent", "geometric", "dependency_graph", "table"]


# -----------------------------
# Finite joint distributions
# -----------------------------


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Joint pmf of (A, Y) over finite atoms; rows index A, columns index Y."""

    pmf: np.ndarray
    a_atoms: tuple[str, ...] = ()
    y_atoms: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        pmf = np.array(self.pmf, dtype=float)
        if pmf.ndim != 2 or 0 in pmf.shape:
            raise InvalidArgumentError("joint pmf must be a nonempty 2-D table")
        if not np.all(np.isfinite(pmf)) or (pmf < 0).any():
            raise InvalidArgumentError("joint pmf entries must be finite and nonnegative")
        if abs(pmf.sum() - 1.0) > PMF_TOLERANCE:
            raise InvalidArgumentError(f"joint pmf sums to {pmf.sum()!r}, expected 1")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)
        a_atoms = tuple(self.a_atoms) or tuple(f"a{i}" for i in range(pmf.shape[0]))
        y_atoms = tuple(self.y_atoms) or tuple(f"y{j}" for j in range(pmf.shape[1]))
        if len(a_atoms) != pmf.shape[0] or len(y_atoms) != pmf.shape[1]:
            raise InvalidArgumentError("atom labels must match the pmf shape")
        object.__setattr__(self, "a_atoms", a_atoms)
        object.__setattr__(self, "y_atoms", y_atoms)

    @property
    def p_a(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.pmf.sum(axis=0)

    def conditional(self, a: int) -> np.ndarray:
        """Return ``P(Y = . | A = a)``; the marginal of Y when ``P(A = a) = 0``."""

        weight = self.p_a[a]
        if weight <= 0:
            return self.p_y
        return self.pmf[a] / weight


def beta_discrete(joint: DiscreteJoint) -> float:
    """Return ``1/2 * sum |p(a, y) - p(a) p(y)|`` over all atoms."""

    product = np.outer(joint.p_a, joint.p_y)
    return float(min(1.0, 0.5 * np.abs(joint.pmf - product).sum()))


def beta_via_conditional_tv(joint: DiscreteJoint) -> float:
    """Return ``sum_a p(a) * TV(P(Y | A = a), P(Y))``; equals ``beta_discrete``."""

    p_y = joint.p_y
    total = 0.0
    for a, weight in enumerate(joint.p_a):
        if weight > 0:
            total += weight * 0.5 * float(np.abs(joint.conditional(a) - p_y).sum())
    return min(1.0, total)


class BerbeeCoupler:
    """Draws (A, Y, Y~) with Y~ independent of A, Y~ ~ P_Y and ``P(Y != Y~) = beta``.

    For each atom ``a`` the conditional law of Y is maximally coupled with the
    marginal: the common part ``min(P(y | a), P(y))`` is drawn once for both,
    the residuals are drawn independently. A coupler owns its generator and is
    not meant to be shared between threads.
    """

    def __init__(self, joint: DiscreteJoint, rng: np.random.Generator) -> None:
        self.joint = joint
        self.rng = rng
        p_y = joint.p_y
        self._plans: list[tuple[float, np.ndarray, np.ndarray, np.ndarray]] = []
        for a in range(joint.pmf.shape[0]):
            cond = joint.conditional(a)
            common = np.minimum(cond, p_y)
            omega = float(common.sum())
            rest = max(1.0 - omega, 0.0)
            if rest > 0:
                res_y = np.clip(cond - common, 0.0, None) / rest
                res_tilde = np.clip(p_y - common, 0.0, None) / rest
            else:
                res_y = res_tilde = common
            self._plans.append((omega, common / omega if omega > 0 else common, res_y, res_tilde))

    def _draw(self, probs: np.ndarray, size: int) -> np.ndarray:
        probs = probs / probs.sum()
        return self.rng.choice(probs.size, size=size, p=probs)

    def sample(self, size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return atom indices ``(a, y, y_tilde)`` for ``size`` independent draws."""

        if size < 1:
            raise InvalidArgumentError("size must be positive")
        a = self._draw(self.joint.p_a, size)
        y = np.empty(size, dtype=np.int64)
        y_tilde = np.empty(size, dtype=np.int64)
        for atom, (omega, common, res_y, res_tilde) in enumerate(self._plans):
            idx = np.flatnonzero(a == atom)
            if idx.size == 0:
                continue
            shared = self.rng.random(idx.size) < omega
            same, apart = idx[shared], idx[~shared]
            if same.size:
                draws = self._draw(common, same.size)
                y[same] = draws
                y_tilde[same] = draws
            if apart.size:
                y[apart] = self._draw(res_y, apart.size)
                y_tilde[apart] = self._draw(res_tilde, apart.size)
        return a, y, y_tilde


def berbee_couple(joint: DiscreteJoint, rng: np.random.Generator) -> BerbeeCoupler:
    return BerbeeCoupler(joint, rng)


def coupling_summary(joint: DiscreteJoint, draws: int, seed: int) -> dict[str, float]:
    """Run the coupling ``draws`` times and report the mismatch rate against beta."""

    coupler = BerbeeCoupler(joint, np.random.default_rng(seed))
    _a, y, y_tilde = coupler.sample(draws)
    rate = float(np.mean(y != y_tilde))
    return {
        "draws": draws,
        "beta": beta_discrete(joint),
        "mismatch_rate": rate,
        "mc_se": math.sqrt(rate * (1.0 - rate) / draws),
    }


# -----------------------------
# Mixing-rate models
# -----------------------------


def _check_size(value: float, name: str) -> float:
    if isinstance(value, bool):
        raise InvalidArgumentError(f"{name} must be a positive integer or inf")
    if value == math.inf:
        return math.inf
    if value != int(value) or value < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer or inf")
    return float(value)


class MixingModel(ABC):
    """Rate model ``beta(n1, n2, m)``; non-increasing in m, non-decreasing in n1, n2."""

    kind: MixingKind

    @abstractmethod
    def _value(self, n1: float, n2: float, m: float) -> float: ...

    def beta(self, n1: float, n2: float, m: float) -> float:
        n1 = _check_size(n1, "n1")
        n2 = _check_size(n2, "n2")
        m = float(m)
        if math.isnan(m) or m < 0:
            raise InvalidArgumentError("m must be a nonnegative real")
        return float(min(1.0, max(0.0, self._value(n1, n2, m))))

    @staticmethod
    def from_dict(config: Mapping[str, Any]) -> MixingModel:
        """Build a model from a validated mixing document (see ``schemas.SCHEMA_MIXING``)."""

        kind = config["kind"]
        if kind == "independent":
            return IndependentMixing()
        if kind == "geometric":
            return GeometricMixing(config["rho"], config.get("scale", 1.0))
        if kind == "dependency_graph":
            return DependencyGraphMixing(config["cutoff"])
        if kind == "table":
            return TableMixing(
                tuple(config["n1_grid"]),
                tuple(config["n2_grid"]),
                tuple(config["m_grid"]),
                np.asarray(config["values"], dtype=float),
            )
        raise InvalidArgumentError(f"unknown mixing kind '{kind}'")


@dataclass(frozen=True)
class IndependentMixing(MixingModel):
    """Independence beyond distance zero."""

    kind: MixingKind = field(default="independent", init=False)

    def _value(self, n1: float, n2: float, m: float) -> float:
        return 1.0 if m == 0 else 0.0


@dataclass(frozen=True)
class GeometricMixing(MixingModel):
    """``beta = min(1, scale * rho**m)`` with ``0 < rho < 1``."""

    rho: float
    scale: float = 1.0
    kind: MixingKind = field(default="geometric", init=False)

    def __post_init__(self) -> None:
        if not 0 < self.rho < 1:
            raise InvalidArgumentError("rho must lie in (0, 1)")
        if not self.scale >= 0 or math.isinf(self.scale):
            raise InvalidArgumentError("scale must be a finite nonnegative real")

    def _value(self, n1: float, n2: float, m: float) -> float:
        return self.scale * self.rho**m


@dataclass(frozen=True)
class DependencyGraphMixing(MixingModel):
    """Full dependence up to ``cutoff``, independence beyond it."""

    cutoff: float
    kind: MixingKind = field(default="dependency_graph", init=False)

    def __post_init__(self) -> None:
        if math.isnan(self.cutoff) or self.cutoff < 0:
            raise InvalidArgumentError("cutoff must be a nonnegative real")

    def _value(self, n1: float, n2: float, m: float) -> float:
        return 0.0 if m > self.cutoff else 1.0


@dataclass(frozen=True, eq=False)
class TableMixing(MixingModel):
    """User-tabulated coefficients on a finite (n1, n2, m) grid.

    Queries inside the grid resolve to the smallest grid sizes at or above
    ``(n1, n2)`` and the largest grid radius at or below ``m``, which never
    understates beta under the monotone contract. Any coordinate beyond the
    grid on either side, including ``m`` past the last radius, raises
    ``ExtrapolationError``.
    """

    n1_grid: Sequence[int]
    n2_grid: Sequence[int]
    m_grid: Sequence[float]
    values: np.ndarray
    kind: MixingKind = field(default="table", init=False)

    def __post_init__(self) -> None:
        grids = []
        for name in ("n1_grid", "n2_grid", "m_grid"):
            grid = np.asarray(getattr(self, name), dtype=float)
            if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
                raise InvalidArgumentError(f"{name} must be a nonempty finite list")
            if (np.diff(grid) <= 0).any():
                raise InvalidArgumentError(f"{name} must be strictly increasing")
            grids.append(grid)
        values = np.array(self.values, dtype=float)
        if values.shape != tuple(g.size for g in grids):
            raise InvalidArgumentError("values must have shape (len(n1), len(n2), len(m))")
        if (values < 0).any() or (values > 1).any() or np.isnan(values).any():
            raise InvalidArgumentError("tabulated beta values must lie in [0, 1]")
        if (np.diff(values, axis=2) > 0).any():
            raise InvalidArgumentError("tabulated beta must be non-increasing in m")
        if (np.diff(values, axis=0) < 0).any() or (np.diff(values, axis=1) < 0).any():
            raise InvalidArgumentError("tabulated beta must be non-decreasing in n1 and n2")
        values.setflags(write=False)
        for name, grid in zip(("n1_grid", "n2_grid", "m_grid"), grids, strict=True):
            object.__setattr__(self, name, tuple(grid.tolist()))
        object.__setattr__(self, "values", values)

    def _value(self, n1: float, n2: float, m: float) -> float:
        if math.isinf(n1) or math.isinf(n2):
            raise ExtrapolationError("tabulated mixing models do not cover n = inf")
        i = int(np.searchsorted(self.n1_grid, n1, side="left"))
        j = int(np.searchsorted(self.n2_grid, n2, side="left"))
        k = int(np.searchsorted(self.m_grid, m, side="right")) - 1
        outside_m = k < 0 or m > self.m_grid[-1]
        if i >= len(self.n1_grid) or j >= len(self.n2_grid) or outside_m:
            LOGGER.debug(
                "Table query outside grid",
                extra={"domain": DOMAIN, "op": "beta_model", "n1": n1, "n2": n2, "m": m},
            )
            raise ExtrapolationError(f"query (n1={n1:g}, n2={n2:g}, m={m:g}) is outside the grid")
        return float(self.values[i, j, k])


def beta_model(model: MixingModel, n1: float, n2: float, m: float) -> float:
    return model.beta(n1, n2, m)


def beta_q(model: MixingModel, q: int, m: float) -> float:
    """Return ``max over q1 + q2 = q`` (both positive) of ``beta(q1, q2, m)``."""

    if q < 2:  # noqa: PLR2004
        raise InvalidArgumentError("beta_q needs q >= 2")
    return max(model.beta(q1, q - q1, m) for q1 in range(1, q))
