"""Offline tests for the netustat file boundary.

Scenarios:
- Each index-space loader builds the right space from its CSV shape
- Clustering labels map to dense ids in first-appearance order
- Malformed inputs raise InvalidArgumentError naming the file
- Regression CSVs accept ``y`` or ``u`` headers
- Ragged rows and non-numeric cells raise InvalidArgumentError
- JSON and CSV output is deterministic and quotes labels containing commas
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math

import numpy as np
import pytest
from netustat.exceptions import InvalidArgumentError
from netustat.index_space import (
    ExplicitMatrixSpace,
    GraphSpace,
    LatticeSpace,
    TwoWayClusteringSpace,
)
from netustat.storage import (
    csv_text,
    dumps_json,
    load_json,
    load_matrix,
    load_regression_csv,
    load_space,
    write_text,
)


def _write(path, text: str):
    path.write_text(text, encoding="utf-8")
    return path


def test_distance_matrix_with_inf(tmp_path) -> None:
    path = _write(tmp_path / "d.csv", "0,1,inf\n1,0,Infinity\ninf,inf,0\n")
    loaded = load_space(path, "matrix")
    assert isinstance(loaded.space, ExplicitMatrixSpace)
    assert loaded.space.n == 3
    assert loaded.space.distance(0, 1) == 1.0
    assert math.isinf(loaded.space.distance(0, 2))
    assert loaded.labels == ("0", "1", "2")


def test_distance_matrix_must_be_square(tmp_path) -> None:
    path = _write(tmp_path / "d.csv", "0,1\n1,0\n2,2\n")
    with pytest.raises(InvalidArgumentError, match="square"):
        load_space(path, "matrix")


def test_edge_list(tmp_path) -> None:
    path = _write(tmp_path / "g.csv", "0,1\n1,2\n\n2,3\n")
    loaded = load_space(path, "graph")
    assert isinstance(loaded.space, GraphSpace)
    assert loaded.space.n == 4
    assert loaded.space.distance(0, 3) == 3.0

    bad = _write(tmp_path / "bad.csv", "0,1\nx,2\n")
    with pytest.raises(InvalidArgumentError, match="integers"):
        load_space(bad, "graph")
    triple = _write(tmp_path / "triple.csv", "0,1,2\n")
    with pytest.raises(InvalidArgumentError, match="expected 'u,v'"):
        load_space(triple, "graph")


def test_clustering_dense_ids(tmp_path) -> None:
    text = "node,row_cluster,col_cluster\nb,r2,c1\na,r1,c1\nc,r2,c2\n"
    loaded = load_space(_write(tmp_path / "c.csv", text), "clustering")
    assert isinstance(loaded.space, TwoWayClusteringSpace)
    assert loaded.labels == ("b", "a", "c")
    # b and a share a column cluster, b and c a row cluster, a and c nothing
    assert loaded.space.distance(0, 1) == 1.0
    assert loaded.space.distance(0, 2) == 1.0
    assert math.isinf(loaded.space.distance(1, 2))


def test_clustering_header_and_duplicates(tmp_path) -> None:
    bad_header = _write(tmp_path / "h.csv", "id,row,col\na,1,1\n")
    with pytest.raises(InvalidArgumentError, match="header"):
        load_space(bad_header, "clustering")
    duplicate = _write(tmp_path / "d.csv", "node,row_cluster,col_cluster\na,1,1\na,2,2\n")
    with pytest.raises(InvalidArgumentError, match="unique"):
        load_space(duplicate, "clustering")


def test_lattice(tmp_path) -> None:
    loaded = load_space(_write(tmp_path / "l.csv", "0,0\n0,1\n3,1\n"), "lattice")
    assert isinstance(loaded.space, LatticeSpace)
    assert loaded.space.distance(0, 2) == 3.0


def test_unknown_kind_and_missing_file(tmp_path, caplog) -> None:
    path = _write(tmp_path / "l.csv", "0\n")
    with pytest.raises(InvalidArgumentError, match="unknown space kind"):
        load_space(path, "torus")

    caplog.set_level(logging.WARNING, logger="netustat.storage")
    with pytest.raises(InvalidArgumentError, match="cannot read"):
        load_space(tmp_path / "missing.csv", "matrix")
    assert any(getattr(r, "op", None) == "read_input" for r in caplog.records)

    empty = _write(tmp_path / "empty.csv", "\n\n")
    with pytest.raises(InvalidArgumentError, match="empty"):
        load_space(empty, "lattice")


def test_load_matrix(tmp_path) -> None:
    out = load_matrix(_write(tmp_path / "p.csv", "0.25, 0.25\n0.5,0\n"))
    np.testing.assert_array_equal(out, [[0.25, 0.25], [0.5, 0.0]])
    signed = load_matrix(_write(tmp_path / "s.csv", "+inf,-INF\n1e-3, 2 \n"))
    np.testing.assert_array_equal(signed, [[math.inf, -math.inf], [0.001, 2.0]])
    with pytest.raises(InvalidArgumentError, match="equal length"):
        load_matrix(_write(tmp_path / "ragged.csv", "1,2\n3\n"))
    with pytest.raises(InvalidArgumentError, match="equal length"):
        load_matrix(_write(tmp_path / "long.csv", "1,2\n3,4,5\n"))
    with pytest.raises(InvalidArgumentError, match="not a number"):
        load_matrix(_write(tmp_path / "word.csv", "1,two\n"))


def test_regression_csv_headers(tmp_path) -> None:
    y, z = load_regression_csv(_write(tmp_path / "r.csv", "y,z1,z2\n1,2,3\n4,5,6\n"))
    np.testing.assert_array_equal(y, [1.0, 4.0])
    np.testing.assert_array_equal(z, [[2.0, 3.0], [5.0, 6.0]])

    u, z = load_regression_csv(_write(tmp_path / "u.csv", "U,z\n0.5,1\n"))
    np.testing.assert_array_equal(u, [0.5])
    assert z.shape == (1, 1)

    with pytest.raises(InvalidArgumentError, match="header"):
        load_regression_csv(_write(tmp_path / "x.csv", "x,z\n1,2\n"))
    with pytest.raises(InvalidArgumentError, match="every row needs 3"):
        load_regression_csv(_write(tmp_path / "short.csv", "y,z1,z2\n1,2\n"))


def test_load_json(tmp_path) -> None:
    assert load_json(_write(tmp_path / "a.json", '{"n": 3}')) == {"n": 3}
    with pytest.raises(InvalidArgumentError, match="invalid JSON at line 2"):
        load_json(_write(tmp_path / "b.json", '{\n  "n": ,\n}'))


def test_csv_text_float_precision() -> None:
    text = csv_text(
        ["n", "w1", "label"], [[200, 0.1, "a"], [500, 1 / 3, "b"], [1000, math.inf, "c"]]
    )
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "w1", "label"]
    assert rows[1] == ["200", "0.10000000000000001", "a"]
    assert float(rows[2][1]) == 1 / 3
    assert rows[3][1] == "inf"
    assert csv_text(["a", "b"], []) == "a,b\n"


def test_dumps_json_is_deterministic() -> None:
    payload = {
        "b": np.float64(0.5),
        "a": np.array([1, 2]),
        "flag": np.bool_(True),
        "count": np.int64(7),
        "bound": math.inf,
        "nested": {2: (1.0, 2.0)},
    }
    text = dumps_json(payload)
    assert text == dumps_json(dict(reversed(payload.items())))
    assert text.endswith("\n")
    decoded = json.loads(text)
    assert list(decoded) == ["a", "b", "bound", "count", "flag", "nested"]
    assert decoded["bound"] == "inf"
    assert decoded["flag"] is True
    assert decoded["nested"] == {"2": [1.0, 2.0]}


def test_csv_text_quotes_labels() -> None:
    text = csv_text(["error_model", "params", "rate"], [["Normal", "N(0,1)", 0.05]])
    assert text == 'error_model,params,rate\nNormal,"N(0,1)",0.050000000000000003\n'
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[1] == ["Normal", "N(0,1)", "0.050000000000000003"]


def test_write_text_uses_lf(tmp_path) -> None:
    path = tmp_path / "out.csv"
    write_text(path, csv_text(["a"], [[1], [2]]))
    assert path.read_bytes() == b"a\n1\n2\n"
    with pytest.raises(InvalidArgumentError, match="cannot write"):
        write_text(tmp_path / "missing" / "out.csv", "x")
