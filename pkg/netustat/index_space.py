"""Index spaces with an economic distance.

An ``IndexSpace`` is the node set ``{0, ..., n-1}`` together with a distance
``d`` taking values in ``[0, inf]``. Four concrete representations are
provided: an explicit distance matrix, a lattice with the sup-norm, an
undirected graph with hop distance, and a two-way clustering where nodes are
at distance 1 when their cells share a coordinate and ``inf`` otherwise.

Unreachable pairs are represented by ``math.inf`` so that sums saturate.
Spaces are immutable after construction and safe to query from many threads.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .const import DOMAIN, GRAPH_CACHE_MAX_NODES, TRIANGLE_CHECK_MAX_NODES
from .exceptions import InvalidArgumentError

LOGGER = logging.getLogger(__name__)

SpaceKind = Literal["matrix", "lattice", "graph", "clustering"]

UNREACHABLE: float = math.inf


def _as_node_set(nodes: Iterable[int], *, field_name: str) -> np.ndarray:
    arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
    if arr.size == 0:
        raise InvalidArgumentError(f"{field_name} must be a nonempty node set")
    return arr


def _check_radius(m: float) -> float:
    m = float(m)
    if math.isnan(m) or m < 0:
        raise InvalidArgumentError("m must be a nonnegative real")
    return m


class IndexSpace(ABC):
    """Metric index set shared by the sparsity, bound and harness modules."""

    n: int
    kind: SpaceKind

    # -----------------------------
    # Representation hooks
    # -----------------------------

    @abstractmethod
    def _row(self, i: int) -> np.ndarray:
        """Return distances from node ``i`` to every node as a float array."""

    # -----------------------------
    # Queries
    # -----------------------------

    def check_node(self, i: int) -> int:
        """Validate a node id and return it as a plain int."""

        if isinstance(i, bool) or not isinstance(i, int | np.integer):
            raise InvalidArgumentError(f"node id must be an integer, got {i!r}")
        if not 0 <= int(i) < self.n:
            raise InvalidArgumentError(f"node id {i} out of range [0, {self.n})")
        return int(i)

    def distance(self, i: int, j: int) -> float:
        """Return d(i, j); ``math.inf`` when the nodes are unreachable."""

        i = self.check_node(i)
        j = self.check_node(j)
        return float(self._row(i)[j])

    def distances_from(self, i: int) -> np.ndarray:
        """Return a read-only copy of the distances from ``i`` to all nodes."""

        row = np.array(self._row(self.check_node(i)), dtype=float)
        row.setflags(write=False)
        return row

    def neighborhood(self, i: int, m: float) -> frozenset[int]:
        """Return the m-neighbourhood ``{j : d(i, j) <= m}``; always contains ``i``."""

        m = _check_radius(m)
        row = self._row(self.check_node(i))
        return frozenset(int(j) for j in np.flatnonzero(row <= m))

    def neighborhood_sizes(self, m: float) -> np.ndarray:
        """Return ``|N_i^m|`` for every node."""

        m = _check_radius(m)
        return np.array([int(np.count_nonzero(self._row(i) <= m)) for i in range(self.n)])

    def eta_max(self, m: float) -> int:
        """Return the largest m-neighbourhood size (at least 1)."""

        return int(self.neighborhood_sizes(m).max())

    def group_distance(self, nodes_a: Iterable[int], nodes_b: Iterable[int]) -> float:
        """Return the infimum of pairwise distances between two nonempty node sets."""

        first = _as_node_set(nodes_a, field_name="I1")
        second = _as_node_set(nodes_b, field_name="I2")
        for node in (*first, *second):
            self.check_node(int(node))
        best = math.inf
        for i in first:
            best = min(best, float(self._row(int(i))[second].min()))
            if best == 0.0:
                break
        return best

    def is_apart(self, nodes_a: Iterable[int], nodes_b: Iterable[int], m: float) -> bool:
        """Return True when the two groups are at least ``m`` apart."""

        return self.group_distance(nodes_a, nodes_b) >= _check_radius(m)

    def within(self, m: float) -> np.ndarray:
        """Return the boolean n x n matrix of pairs with ``d <= m``."""

        m = _check_radius(m)
        return np.vstack([self._row(i) <= m for i in range(self.n)])

    def distance_matrix(self) -> np.ndarray:
        """Return the dense n x n distance matrix."""

        return np.vstack([np.asarray(self._row(i), dtype=float) for i in range(self.n)])

    def pair_fraction(self, m: float) -> tuple[float, float]:
        """Return ``(tau_2 / n^2, tau_{1,1} / n^2)`` at radius ``m``."""

        close = int(self.neighborhood_sizes(m).sum())
        total = self.n * self.n
        return close / total, (total - close) / total


# -----------------------------
# Concrete representations
# -----------------------------


def _check_metric_matrix(matrix: np.ndarray) -> None:
    n = matrix.shape[0]
    if np.isnan(matrix).any():
        raise InvalidArgumentError("distance matrix must not contain NaN")
    if (matrix < 0).any():
        raise InvalidArgumentError("distances must be nonnegative")
    if not np.array_equal(matrix, matrix.T):
        raise InvalidArgumentError("distance matrix must be symmetric")
    if np.any(np.diag(matrix) != 0):
        raise InvalidArgumentError("distance matrix must have a zero diagonal")
    off = ~np.eye(n, dtype=bool)
    if (matrix[off] < 1).any():
        raise InvalidArgumentError("distances between distinct nodes must be at least 1")
    if n > TRIANGLE_CHECK_MAX_NODES:
        LOGGER.debug(
            "Skipping triangle inequality check",
            extra={"domain": DOMAIN, "op": "space_validate", "n": n},
        )
        return
    for k in range(n):
        via_k = matrix[:, k : k + 1] + matrix[k : k + 1, :]
        if (matrix > via_k).any():
            raise InvalidArgumentError(f"triangle inequality fails through node {k}")


@dataclass(frozen=True, eq=False)
class ExplicitMatrixSpace(IndexSpace):
    """Index space given by a full symmetric distance matrix (``inf`` allowed)."""

    matrix: np.ndarray
    kind: SpaceKind = field(default="matrix", init=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise InvalidArgumentError("distance matrix must be a nonempty square array")
        _check_metric_matrix(matrix)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.matrix.shape[0])

    def _row(self, i: int) -> np.ndarray:
        return self.matrix[i]

    def distance_matrix(self) -> np.ndarray:
        return self.matrix.copy()


@dataclass(frozen=True, eq=False)
class LatticeSpace(IndexSpace):
    """Nodes at distinct integer coordinates of Z^d with the sup-norm distance."""

    coords: np.ndarray
    kind: SpaceKind = field(default="lattice", init=False)

    def __post_init__(self) -> None:
        raw = np.asarray(self.coords)
        if raw.ndim == 1:
            raw = raw.reshape(-1, 1)
        if raw.ndim != 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
            raise InvalidArgumentError("lattice coordinates must be an n x d array, d >= 1")
        if not np.all(np.isfinite(raw)) or not np.array_equal(raw, np.round(raw)):
            raise InvalidArgumentError("lattice coordinates must be integers")
        coords = raw.astype(np.int64)
        if np.unique(coords, axis=0).shape[0] != coords.shape[0]:
            raise InvalidArgumentError("lattice coordinates must be distinct")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def line(cls, n: int, *, start: int = 0) -> LatticeSpace:
        """Return the one-dimensional lattice ``start, ..., start + n - 1``."""

        return cls(np.arange(start, start + n).reshape(-1, 1))

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.coords.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.coords.shape[1])

    def _row(self, i: int) -> np.ndarray:
        return np.abs(self.coords - self.coords[i]).max(axis=1).astype(float)


@dataclass(frozen=True, eq=False)
class GraphSpace(IndexSpace):
    """Undirected unweighted graph; distance is the shortest-path hop count."""

    node_count: int
    edges: Sequence[tuple[int, int]]
    cache: bool = True
    kind: SpaceKind = field(default="graph", init=False)
    _adjacency: csr_matrix = field(init=False, repr=False)
    _all_pairs: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        n = int(self.node_count)
        if n <= 0:
            raise InvalidArgumentError("graph must have at least one node")
        pairs = np.asarray(list(self.edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise InvalidArgumentError(f"edge endpoints must lie in [0, {n})")
        # Self-loops carry no distance information
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adjacency = csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
        adjacency.data[:] = 1.0
        object.__setattr__(self, "edges", tuple(map(tuple, pairs.tolist())))
        object.__setattr__(self, "_adjacency", adjacency)
        if self.cache and n <= GRAPH_CACHE_MAX_NODES:
            all_pairs = shortest_path(adjacency, directed=False, unweighted=True)
            all_pairs.setflags(write=False)
            object.__setattr__(self, "_all_pairs", all_pairs)

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.node_count)

    @property
    def adjacency(self) -> csr_matrix:
        return self._adjacency.copy()

    def _row(self, i: int) -> np.ndarray:
        if self._all_pairs is not None:
            return self._all_pairs[i]
        return np.ravel(
            shortest_path(self._adjacency, directed=False, unweighted=True, indices=i)
        )


@dataclass(frozen=True, eq=False)
class TwoWayClusteringSpace(IndexSpace):
    """Nodes in cells of a C1 x C2 grid; distance 1 when cells share a coordinate.

    Pairs sharing neither coordinate are at distance ``inf``. This is symmetric
    with a zero diagonal, but it is not a metric: cells (0,0) and (1,1) are both
    at distance 1 from (0,1) yet at ``inf`` from each other. Sparsity counts only
    use within-m pairs, so nothing downstream relies on the triangle inequality
    here.
    """

    row_clusters: int
    col_clusters: int
    rows: np.ndarray
    cols: np.ndarray
    kind: SpaceKind = field(default="clustering", init=False)

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.int64).ravel()
        cols = np.asarray(self.cols, dtype=np.int64).ravel()
        if rows.size == 0 or rows.shape != cols.shape:
            raise InvalidArgumentError("row and column labels must be nonempty and aligned")
        if self.row_clusters < 1 or self.col_clusters < 1:
            raise InvalidArgumentError("cluster counts must be positive")
        if rows.min() < 0 or rows.max() >= self.row_clusters:
            raise InvalidArgumentError(f"row labels must lie in [0, {self.row_clusters})")
        if cols.min() < 0 or cols.max() >= self.col_clusters:
            raise InvalidArgumentError(f"column labels must lie in [0, {self.col_clusters})")
        rows.setflags(write=False)
        cols.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @classmethod
    def row_major(cls, n1: int, n2: int) -> TwoWayClusteringSpace:
        """One node per cell, node ``i`` placed at ``(i // n2, i % n2)``."""

        idx = np.arange(n1 * n2)
        return cls(n1, n2, idx // n2, idx % n2)

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.rows.size)

    def _row(self, i: int) -> np.ndarray:
        share = (self.rows == self.rows[i]) | (self.cols == self.cols[i])
        row = np.where(share, 1.0, math.inf)
        row[i] = 0.0
        return row

    def cell_sizes(self) -> np.ndarray:
        sizes = np.zeros((self.row_clusters, self.col_clusters), dtype=np.int64)
        np.add.at(sizes, (self.rows, self.cols), 1)
        return sizes

    def cluster_neighborhood_bound(self) -> int:
        """Return ``(C1 + C2 - 1) * max cell size``, which dominates every eta_m."""

        return int((self.row_clusters + self.col_clusters - 1) * self.cell_sizes().max())
