"""File boundary for netustat.

Reads the index-space, joint-pmf and regression inputs described in
``docs/data_shapes.md`` with ``pandas.read_csv`` and writes JSON/CSV results
with stable formatting, so that re-running a subcommand produces
byte-identical output files.

Shapes handled here:
    distance matrix   CSV, n rows x n columns, ``inf`` token for unreachable
    edge list         one ``u,v`` pair per line, 0-based ids
    clustering        CSV with header ``node,row_cluster,col_cluster``
    lattice           CSV of integer coordinates, one node per row
    joint pmf         CSV matrix, rows = A atoms, columns = Y atoms
    regression data   CSV with header ``y,z1,...,zd`` (or ``y,z``)
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Final

import numpy as np
import pandas as pd

from .const import DOMAIN
from .exceptions import InvalidArgumentError
from .index_space import (
    ExplicitMatrixSpace,
    GraphSpace,
    IndexSpace,
    LatticeSpace,
    SpaceKind,
    TwoWayClusteringSpace,
)

_LOGGER = logging.getLogger(__name__)

CLUSTERING_HEADER: Final[tuple[str, str, str]] = ("node", "row_cluster", "col_cluster")
# 17 significant digits round-trip every float64
FLOAT_FORMAT: Final = "%.17g"


@dataclass(frozen=True)
class LoadedSpace:
    """An index space plus the external labels of its dense node ids."""

    space: IndexSpace
    labels: tuple[str, ...]


def _read_table(path: Path, *, header: bool = False) -> tuple[tuple[str, ...], pd.DataFrame]:
    """Read a CSV as trimmed strings; returns the casefolded header (if any) and the body.

    Short rows come back with NaN cells so callers can name the shape error.
    """

    try:
        frame = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except OSError as exc:
        _LOGGER.warning(
            "Failed to read input file",
            extra={"domain": DOMAIN, "op": "read_input", "path": str(path)},
        )
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from exc
    except pd.errors.EmptyDataError as exc:
        raise InvalidArgumentError(f"{path} is empty") from exc
    except pd.errors.ParserError as exc:
        raise InvalidArgumentError(f"{path}: rows must have equal length") from exc

    frame = frame.map(lambda cell: cell.strip() if isinstance(cell, str) else cell)
    if not header:
        return (), frame
    names = tuple(str(cell).casefold() for cell in frame.iloc[0])
    return names, frame.iloc[1:].reset_index(drop=True)


def _as_float(frame: pd.DataFrame, path: Path) -> np.ndarray:
    # object -> float64 goes through float(), which accepts inf/Infinity in any case
    try:
        return frame.astype(float).to_numpy()
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: entry is not a number ({exc})") from exc


# -----------------------------
# Index spaces
# -----------------------------


def load_distance_matrix(path: Path) -> LoadedSpace:
    _, frame = _read_table(path)
    if frame.isna().any(axis=None) or frame.shape[0] != frame.shape[1]:
        raise InvalidArgumentError(f"{path}: distance matrix must be square")
    space = ExplicitMatrixSpace(_as_float(frame, path))
    return LoadedSpace(space, tuple(str(i) for i in range(space.n)))


def load_edge_list(path: Path, *, node_count: int | None = None) -> LoadedSpace:
    _, frame = _read_table(path)
    if frame.shape[1] != 2 or frame.isna().any(axis=None):  # noqa: PLR2004
        raise InvalidArgumentError(f"{path}: expected 'u,v' on every line")
    try:
        edges = frame.astype(int).to_numpy()
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: node ids must be integers") from exc
    highest = int(edges.max()) + 1
    n = highest if node_count is None else int(node_count)
    if n < highest:
        raise InvalidArgumentError(f"node_count {n} is smaller than the largest edge id")
    space = GraphSpace(n, [(int(u), int(v)) for u, v in edges])
    return LoadedSpace(space, tuple(str(i) for i in range(n)))


def load_clustering(path: Path) -> LoadedSpace:
    names, frame = _read_table(path, header=True)
    if names != CLUSTERING_HEADER:
        raise InvalidArgumentError(f"{path}: header must be {','.join(CLUSTERING_HEADER)}")
    frame.columns = list(CLUSTERING_HEADER)
    if frame.isna().any(axis=None):
        raise InvalidArgumentError(f"{path}: every row needs node,row_cluster,col_cluster")
    if frame["node"].duplicated().any():
        raise InvalidArgumentError(f"{path}: node labels must be unique")
    # factorize numbers labels in first-appearance order
    row_ids, row_labels = pd.factorize(frame["row_cluster"])
    col_ids, col_labels = pd.factorize(frame["col_cluster"])
    space = TwoWayClusteringSpace(len(row_labels), len(col_labels), row_ids, col_ids)
    return LoadedSpace(space, tuple(frame["node"]))


def load_lattice(path: Path) -> LoadedSpace:
    _, frame = _read_table(path)
    if frame.isna().any(axis=None):
        raise InvalidArgumentError(f"{path}: every row needs the same number of coordinates")
    space = LatticeSpace(_as_float(frame, path))
    return LoadedSpace(space, tuple(str(i) for i in range(space.n)))


def load_space(path: Path, kind: SpaceKind) -> LoadedSpace:
    """Load an index space of the given kind from ``path``."""

    loaders = {
        "matrix": load_distance_matrix,
        "graph": load_edge_list,
        "clustering": load_clustering,
        "lattice": load_lattice,
    }
    if kind not in loaders:
        raise InvalidArgumentError(f"unknown space kind '{kind}'")
    loaded = loaders[kind](path)
    _LOGGER.debug(
        "Loaded index space",
        extra={"domain": DOMAIN, "op": "load_space", "kind": kind, "n": loaded.space.n},
    )
    return loaded


# -----------------------------
# Numeric tables
# -----------------------------


def load_matrix(path: Path) -> np.ndarray:
    """Load a headerless numeric CSV matrix."""

    _, frame = _read_table(path)
    if frame.isna().any(axis=None):
        raise InvalidArgumentError(f"{path}: rows must have equal length")
    return _as_float(frame, path)


def load_regression_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Load the response (or residual) column and ``Z`` from a CSV with header ``y,z1,...,zd``.

    A leading ``u`` column header is accepted for residual input.
    """

    names, frame = _read_table(path, header=True)
    if len(names) < 2 or names[0] not in ("y", "u"):  # noqa: PLR2004
        raise InvalidArgumentError(f"{path}: header must start with 'y' or 'u', then z columns")
    if frame.isna().any(axis=None):
        raise InvalidArgumentError(f"{path}: every row needs {len(names)} values")
    data = _as_float(frame, path)
    return data[:, 0], data[:, 1:]


def load_json(path: Path) -> Any:
    """Read a JSON document (config files, bound ingredients)."""

    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        _LOGGER.warning(
            "Failed to read input file",
            extra={"domain": DOMAIN, "op": "read_input", "path": str(path)},
        )
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON at line {exc.lineno}") from exc


# -----------------------------
# Output
# -----------------------------


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        value = float(value)
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return value
    return value


def dumps_json(payload: Mapping[str, Any]) -> str:
    """Serialise a result payload deterministically (sorted keys, round-trip floats)."""

    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        _LOGGER.error(
            "Failed to write output file",
            extra={"domain": DOMAIN, "op": "write_output", "path": str(path)},
            exc_info=True,
        )
        raise InvalidArgumentError(f"cannot write {path}: {exc.strerror}") from exc


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV text with full-precision floats and LF line endings.

    Labels containing commas, such as ``N(0,1)``, are quoted.
    """

    frame = pd.DataFrame(list(rows), columns=list(header))
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
