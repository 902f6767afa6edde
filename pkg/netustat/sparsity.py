"""Sparsity combinatorics over an index space.

Index vectors are tuples of node ids. Two entries are m-connected when a chain
of entries links them with consecutive distances at most ``m``; the m-profile
is the descending list of class sizes (duplicates counted) of that quotient.
The tau counts tally how many of the ``n**q`` index vectors have each profile,
either exactly by enumeration or bounded by a closed form in ``n`` and
``eta_m``.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .const import DEFAULT_ENUMERATION_BUDGET, DOMAIN
from .exceptions import InvalidArgumentError, ResourceLimitError
from .index_space import IndexSpace

LOGGER = logging.getLogger(__name__)

IndexVector = tuple[int, ...]

# Flat indices handled per vectorised enumeration chunk
_CHUNK = 1 << 16


# -----------------------------
# Types
# -----------------------------


@dataclass(frozen=True, order=True)
class MProfile:
    """Class sizes of an m-connectivity partition, sorted descending."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if not counts or any(c <= 0 for c in counts):
            raise InvalidArgumentError("profile counts must be positive and nonempty")
        if list(counts) != sorted(counts, reverse=True):
            raise InvalidArgumentError("profile counts must be sorted descending")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def of(cls, *counts: int) -> MProfile:
        """Build a profile from unsorted counts."""

        return cls(tuple(sorted(counts, reverse=True)))

    @property
    def q(self) -> int:
        return sum(self.counts)

    @property
    def parts(self) -> int:
        return len(self.counts)

    def label(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"


@dataclass(frozen=True)
class TauTable:
    """Counts (or upper bounds) of length-q index vectors per m-profile."""

    m: float
    q: int
    entries: Mapping[MProfile, float]
    exact: bool
    n: int = field(default=0)

    def get(self, profile: MProfile | Sequence[int]) -> float:
        key = profile if isinstance(profile, MProfile) else MProfile.of(*profile)
        if key.q != self.q:
            raise InvalidArgumentError(f"profile {key.label()} does not sum to q={self.q}")
        return self.entries.get(key, 0)

    def total(self) -> float:
        return sum(self.entries.values())

    def rows(self) -> list[tuple[str, float]]:
        """Return ``(profile label, count)`` for every partition of q, largest first."""

        return [(p.label(), self.get(p)) for p in enumerate_profiles(self.q)]


def enumerate_profiles(q: int) -> list[MProfile]:
    """Return every integer partition of ``q`` as a profile, in descending order."""

    if q < 1:
        raise InvalidArgumentError("q must be at least 1")

    def _parts(rest: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in _parts(rest - first, first):
                yield (first, *tail)

    return [MProfile(p) for p in _parts(q, q)]


# -----------------------------
# m-connectivity
# -----------------------------


class _UnionFind:
    """Disjoint sets over positions ``0..size-1`` with path compression."""

    def __init__(self, size: int) -> None:
        self.forest = list(range(size))

    def find(self, k: int) -> int:
        root = k
        while root != self.forest[root]:
            root = self.forest[root]
        while k != root:
            self.forest[k], k = root, self.forest[k]
        return root

    def union(self, a: int, b: int) -> None:
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            self.forest[max(root_a, root_b)] = min(root_a, root_b)


def _check_vector(space: IndexSpace, ivec: Iterable[int]) -> IndexVector:
    entries = tuple(space.check_node(i) for i in ivec)
    if not entries:
        raise InvalidArgumentError("index vector must be nonempty")
    return entries


def _position_classes(space: IndexSpace, ivec: IndexVector, m: float) -> list[list[int]]:
    sets = _UnionFind(len(ivec))
    for a in range(len(ivec)):
        row = space.distances_from(ivec[a])
        for b in range(a + 1, len(ivec)):
            if row[ivec[b]] <= m:
                sets.union(a, b)
    classes: dict[int, list[int]] = {}
    for pos in range(len(ivec)):
        classes.setdefault(sets.find(pos), []).append(pos)
    return list(classes.values())


def m_profile(
    space: IndexSpace, ivec: Iterable[int], m: float
) -> tuple[list[frozenset[int]], MProfile]:
    """Return the m-connectivity partition of ``ivec`` (as node sets) and its profile.

    Classes are ordered by size (occurrences, duplicates included), ties broken by
    their smallest node id.
    """

    if m < 0 or math.isnan(m):
        raise InvalidArgumentError("m must be a nonnegative real")
    entries = _check_vector(space, ivec)
    classes = _position_classes(space, entries, m)
    classes.sort(key=lambda cls: (-len(cls), min(entries[p] for p in cls)))
    partition = [frozenset(entries[p] for p in cls) for cls in classes]
    return partition, MProfile(tuple(len(cls) for cls in classes))


def is_m_free(space: IndexSpace, ivec: Iterable[int], position: int, m: float) -> bool:
    """Return True when ``ivec[position]`` is farther than ``m`` from every other entry."""

    entries = _check_vector(space, ivec)
    if isinstance(position, bool) or not 0 <= position < len(entries):
        raise InvalidArgumentError(f"position {position} out of range [0, {len(entries)})")
    if len(entries) == 1:
        return True
    row = space.distances_from(entries[position])
    others = [entries[k] for k in range(len(entries)) if k != position]
    return bool(row[others].min() > m)


# -----------------------------
# Exact counts
# -----------------------------


def _count_chunk(within: np.ndarray, q: int, start: int, stop: int) -> Counter[tuple[int, ...]]:
    """Tally profiles of flat index vectors ``start..stop-1`` (row-major digits)."""

    n = within.shape[0]
    digits = np.unravel_index(np.arange(start, stop, dtype=np.int64), (n,) * q)
    labels = np.tile(np.arange(q), (stop - start, 1))
    edges = [(a, b, within[digits[a], digits[b]]) for a in range(q) for b in range(a + 1, q)]
    # q rounds of min-label propagation settle every component of a q-vertex graph
    for _ in range(q):
        for a, b, linked in edges:
            low = np.minimum(labels[:, a], labels[:, b])
            labels[:, a] = np.where(linked, low, labels[:, a])
            labels[:, b] = np.where(linked, low, labels[:, b])
    sizes = np.stack([(labels == k).sum(axis=1) for k in range(q)], axis=1)
    sizes = -np.sort(-sizes, axis=1)
    uniq, counts = np.unique(sizes, axis=0, return_counts=True)
    tally: Counter[tuple[int, ...]] = Counter()
    for row, count in zip(uniq, counts, strict=True):
        tally[tuple(int(c) for c in row if c > 0)] += int(count)
    return tally


def tau_exact(
    space: IndexSpace,
    q: int,
    m: float,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    workers: int = 1,
) -> TauTable:
    """Enumerate all ``n**q`` index vectors and count them per m-profile."""

    if q < 1:
        raise InvalidArgumentError("q must be at least 1")
    if m < 0 or math.isnan(m):
        raise InvalidArgumentError("m must be a nonnegative real")
    total = space.n**q
    if total > budget:
        LOGGER.warning(
            "Enumeration budget exceeded",
            extra={"domain": DOMAIN, "op": "tau_exact", "n": space.n, "q": q},
        )
        raise ResourceLimitError(
            f"tau_exact needs n^q = {space.n}^{q} = {total} vectors, budget is {budget}"
        )
    started = time.perf_counter()
    within = space.within(m)
    bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    tally: Counter[tuple[int, ...]] = Counter()
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_count_chunk, within, q, lo, hi) for lo, hi in bounds]
            for fut in futures:
                tally.update(fut.result())
    else:
        for lo, hi in bounds:
            tally.update(_count_chunk(within, q, lo, hi))
    entries = {MProfile(key): count for key, count in tally.items()}
    LOGGER.debug(
        "Enumerated tau counts",
        extra={
            "domain": DOMAIN,
            "op": "tau_exact",
            "n": space.n,
            "q": q,
            "elapsed_ms": int((time.perf_counter() - started) * 1000),
        },
    )
    return TauTable(m=float(m), q=q, entries=entries, exact=True, n=space.n)


# -----------------------------
# Closed-form bounds
# -----------------------------


def profile_constant(profile: MProfile) -> int:
    """Constant of the closed-form tau bound for ``profile``.

    Counts the set partitions of the q slots into blocks of the profile's sizes,
    times the labelled spanning trees of each block (``s**(s-2)``, Cayley). An
    index vector with this profile is fixed by choosing a root node per block
    (``n`` ways) and, along a spanning tree of its m-connections, each further
    entry within ``m`` of its parent (``eta_m`` ways).
    """

    q = profile.q
    arrangements = math.factorial(q)
    for size in profile.counts:
        arrangements //= math.factorial(size)
    for mult in Counter(profile.counts).values():
        arrangements //= math.factorial(mult)
    trees = math.prod(size ** (size - 2) if size > 1 else 1 for size in profile.counts)
    return arrangements * trees


def tau_bound(space: IndexSpace, profile: MProfile | Sequence[int], m: float) -> float:
    """Return ``C * n**S * eta_m**(q - S)``, an upper bound on the exact tau count."""

    key = profile if isinstance(profile, MProfile) else MProfile.of(*profile)
    eta = space.eta_max(m)
    return float(profile_constant(key) * space.n**key.parts * eta ** (key.q - key.parts))


def tau_table_bound(space: IndexSpace, q: int, m: float) -> TauTable:
    """Bound every profile of length-q vectors at radius ``m``."""

    entries = {p: tau_bound(space, p, m) for p in enumerate_profiles(q)}
    return TauTable(m=float(m), q=q, entries=entries, exact=False, n=space.n)


def tau_hat4(table: TauTable) -> float:
    """Count 4-vectors holding an m-free entry.

    ``tau_{3,1} + tau_{2,1,1} + tau_{1,1,1,1}``
    """

    if table.q != 4:  # noqa: PLR2004
        raise InvalidArgumentError("tau_hat4 needs a q=4 table")
    return table.get((3, 1)) + table.get((2, 1, 1)) + table.get((1, 1, 1, 1))


def tau_table(
    space: IndexSpace,
    q: int,
    m: float,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    workers: int = 1,
) -> TauTable:
    """Exact counts when ``n**q`` fits the budget, closed-form bounds otherwise."""

    if space.n**q <= budget:
        return tau_exact(space, q, m, budget=budget, workers=workers)
    LOGGER.info(
        "Falling back to closed-form tau bounds",
        extra={"domain": DOMAIN, "op": "tau_table", "n": space.n, "q": q},
    )
    return tau_table_bound(space, q, m)
