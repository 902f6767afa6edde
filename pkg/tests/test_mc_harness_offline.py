"""Offline tests for the data-generating processes and the Monte Carlo driver.

Scenarios:
- Per-replication streams and the inverse-CDF normal transform
- Error models: AR(1) autocorrelation, two-way clustering covariances
- Null and alternative mean models, config validation
- run_mc determinism across worker counts, failure reporting, early abort, logging
- Table grid layout, byte-identical grid CSV for 1, 4 and 16 workers
- Plug-in kernel moments, gamma_m1 and the CLT demo inputs
- Desk-scale null size on every row and column ordering across bandwidth multipliers

Full-scale reproductions are marked ``slow`` (RUN_SLOW=1).
"""

from __future__ import annotations

import logging
import math
import os

import numpy as np
import pytest
from netustat import mc_harness
from netustat.cli import CltDemoConfig, clt_demo
from netustat.exceptions import InvalidArgumentError, ReplicationError
from netustat.mc_harness import (
    AR1,
    TABLE1_COLUMNS,
    TABLE1_CSV_HEADER,
    AlternativeMean,
    DgpConfig,
    IIDNormal,
    McConfig,
    NullMean,
    TwoWayClustering,
    default_factorization,
    estimate_gamma_m1,
    estimate_kernel_moments,
    estimate_sigma2,
    normal_statistics,
    null_residuals,
    product_kernel_statistics,
    run_mc,
    simulate_dataset,
    standard_normals,
    stream_for,
    table1_rows,
    table1_suite,
)
from netustat.schemas import SCHEMA_DGP, validate
from netustat.spec_test import SpecTestConfig, compute_statistic
from netustat.storage import csv_text
from netustat.stein_bounds import wasserstein1_to_normal
from netustat.ustat import hall_diagnostic


def test_streams_are_reproducible_and_distinct() -> None:
    first = standard_normals(stream_for(42, 3), 10)
    again = standard_normals(stream_for(42, 3), 10)
    other = standard_normals(stream_for(42, 4), 10)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)


def test_standard_normals_moments() -> None:
    x = standard_normals(stream_for(0, 0), 200_000)
    assert np.all(np.isfinite(x))
    assert abs(x.mean()) < 0.01
    assert x.var() == pytest.approx(1.0, abs=0.02)


def test_ar1_with_zero_rho_is_iid() -> None:
    iid = IIDNormal().draw(stream_for(9, 0), 50)
    ar = AR1(0.0).draw(stream_for(9, 0), 50)
    np.testing.assert_array_equal(iid, ar)


def test_ar1_autocorrelation_matches_rho() -> None:
    rho = 0.5
    model = AR1(rho)
    acf = np.zeros(3)
    for rep in range(100):
        u = model.draw(stream_for(5, rep), 2000)
        u = u - u.mean()
        denom = float(u @ u)
        acf += [float(u[:-k] @ u[k:]) / denom for k in (1, 2, 3)]
    acf /= 100
    np.testing.assert_allclose(acf, [rho, rho**2, rho**3], atol=0.03)


def test_ar1_starts_at_stationary_variance() -> None:
    model = AR1(0.9)
    first = np.array([model.draw(stream_for(1, rep), 5)[0] for rep in range(4000)])
    assert first.var() == pytest.approx(1 / (1 - 0.81), rel=0.1)


def test_two_way_clustering_covariances() -> None:
    model = TwoWayClustering(2, 2)
    rng = stream_for(3, 0)
    draws = np.array([model.draw(rng, 4) for _ in range(100_000)])
    cov = np.cov(draws, rowvar=False)
    np.testing.assert_allclose(np.diag(cov), 1.0, atol=0.02)
    # row-major: nodes 0, 1 share a row cluster, nodes 0, 2 a column cluster
    assert cov[0, 1] == pytest.approx(0.5, abs=0.02)
    assert cov[0, 2] == pytest.approx(0.5, abs=0.02)
    assert cov[0, 3] == pytest.approx(0.0, abs=0.02)


def test_zero_bump_alternative_equals_null() -> None:
    null = simulate_dataset(DgpConfig(40), stream_for(11, 2))
    alt = simulate_dataset(
        DgpConfig(40, IIDNormal(), AlternativeMean(psi=0.0, bump_scale=0.25)), stream_for(11, 2)
    )
    np.testing.assert_array_equal(null.y, alt.y)
    np.testing.assert_array_equal(null.Z, alt.Z)


def test_alternative_adds_the_bump() -> None:
    null = simulate_dataset(DgpConfig(40), stream_for(11, 2))
    alt = simulate_dataset(
        DgpConfig(40, IIDNormal(), AlternativeMean(psi=0.5, bump_scale=0.25)), stream_for(11, 2)
    )
    z = null.Z[:, 0]
    bump = 0.5 * 20.0 * np.exp(-0.5 * (z / 0.25) ** 2) / np.sqrt(2 * np.pi)
    np.testing.assert_allclose(alt.y - null.y, bump, atol=1e-12)


def test_dgp_validation() -> None:
    with pytest.raises(InvalidArgumentError):
        DgpConfig(3)
    with pytest.raises(InvalidArgumentError, match=r"row TwoWay\(40,50\)"):
        DgpConfig(500, TwoWayClustering(40, 50))
    with pytest.raises(InvalidArgumentError):
        AR1(1.0)
    with pytest.raises(InvalidArgumentError):
        AlternativeMean(psi=0.1, bump_scale=0.0)
    with pytest.raises(InvalidArgumentError):
        TwoWayClustering(4, 5).draw(stream_for(0, 0), 21)


def test_dgp_from_document() -> None:
    doc = validate(
        SCHEMA_DGP,
        {
            "n": 20,
            "error_model": {"kind": "twoway", "n1": 4, "n2": 5},
            "mean_model": {"kind": "alternative", "psi": 0.1, "bump_scale": 1.0},
        },
        what="dgp",
    )
    dgp = DgpConfig.from_dict(doc)
    assert dgp.error_model == TwoWayClustering(4, 5)
    assert dgp.mean_model == AlternativeMean(psi=0.1, bump_scale=1.0)
    assert DgpConfig.from_dict(validate(SCHEMA_DGP, {"n": 8}, what="dgp")) == DgpConfig(8)
    with pytest.raises(InvalidArgumentError):
        validate(SCHEMA_DGP, {"n": 8, "error_model": {"kind": "ar1", "rho": 1.5}}, what="dgp")


def test_mc_config_validation() -> None:
    with pytest.raises(InvalidArgumentError):
        McConfig(DgpConfig(10), reps=0, seed=0)
    with pytest.raises(InvalidArgumentError):
        McConfig(DgpConfig(10), reps=1, seed=-1)
    with pytest.raises(InvalidArgumentError):
        run_mc(McConfig(DgpConfig(10), reps=1, seed=0), workers=0)


def test_single_replication() -> None:
    result = run_mc(McConfig(DgpConfig(50), reps=1, seed=7))
    assert result.rejection_rate in (0.0, 1.0)
    assert result.mc_standard_error == 0.0
    assert result.per_rep_T is None


def test_run_mc_identical_across_worker_counts() -> None:
    config = McConfig(
        DgpConfig(60, AR1(0.5), AlternativeMean(psi=0.5, bump_scale=0.25)),
        reps=12,
        seed=2024,
        keep_statistics=True,
    )
    serial = run_mc(config, workers=1)
    parallel = run_mc(config, workers=2)
    assert serial == parallel
    assert len(serial.per_rep_T) == 12


def test_statistics_match_direct_replication() -> None:
    dgp = DgpConfig(30)
    result = run_mc(McConfig(dgp, reps=3, seed=5, keep_statistics=True))
    residuals, Z = null_residuals(dgp, 5, rep=2)
    expected = compute_statistic(residuals, Z, SpecTestConfig()).T_n
    assert result.per_rep_T[2] == pytest.approx(expected)


def test_failing_replication_names_the_rep(caplog) -> None:
    caplog.set_level(logging.ERROR, logger="netustat")
    bad_test = SpecTestConfig(bandwidth=(0.1, 0.2, 0.3))
    config = McConfig(DgpConfig(20), reps=3, seed=0, test=bad_test)
    with pytest.raises(ReplicationError) as err:
        run_mc(config)
    assert err.value.rep == 0
    assert any(
        getattr(r, "op", None) == "run_mc" and getattr(r, "rep", None) == 0 for r in caplog.records
    )


def test_failure_stops_remaining_replications(monkeypatch) -> None:
    calls: list[int] = []
    replicate = mc_harness._replicate

    def counting(config: McConfig, rep: int):
        calls.append(rep)
        return replicate(config, rep)

    monkeypatch.setattr(mc_harness, "_replicate", counting)
    bad_test = SpecTestConfig(bandwidth=(0.1, 0.2, 0.3))
    with pytest.raises(ReplicationError) as err:
        run_mc(McConfig(DgpConfig(20), reps=50, seed=0, test=bad_test))
    assert err.value.rep == 0
    assert calls == [0]


def test_parallel_failure_reports_first_rep_once(caplog) -> None:
    caplog.set_level(logging.ERROR, logger="netustat")
    bad_test = SpecTestConfig(bandwidth=(0.1, 0.2, 0.3))
    config = McConfig(DgpConfig(20), reps=64, seed=0, test=bad_test)
    with pytest.raises(ReplicationError) as err:
        run_mc(config, workers=2)
    assert err.value.rep == 0
    failures = [r for r in caplog.records if r.getMessage() == "Replication failed"]
    assert len(failures) == 1


def test_run_mc_logs_completion(caplog) -> None:
    caplog.set_level(logging.INFO, logger="netustat")
    run_mc(McConfig(DgpConfig(20), reps=2, seed=0))
    done = [r for r in caplog.records if getattr(r, "op", None) == "run_mc"]
    assert done
    assert done[-1].reps == 2
    assert done[-1].elapsed_ms >= 0


def test_table1_rows_layout() -> None:
    rows = table1_rows()
    assert [(m.label, m.params) for m in rows] == [
        ("Normal", "N(0,1)"),
        ("AR", "rho=0.1"),
        ("AR", "rho=0.5"),
        ("AR", "rho=0.9"),
        ("TwoWay", "(40,50)"),
        ("TwoWay", "(100,20)"),
    ]


def test_table1_suite_small_grid() -> None:
    cells = table1_suite(20, 2, 0, SpecTestConfig(), clusterings=((4, 5), (5, 4)))
    assert len(cells) == 24
    assert len(TABLE1_CSV_HEADER) == len(cells[0].csv_row())
    assert [c.column_label for c in cells[:4]] == [
        "null",
        "psi=0.5,tau=0.25",
        "psi=0.1,tau=0.25",
        "psi=0.1,tau=1",
    ]
    assert cells[-1].params == "(5,4)"
    # common random numbers: the grid cell equals a standalone run
    alone = run_mc(McConfig(DgpConfig(20), reps=2, seed=0))
    assert cells[0].result == alone


@pytest.mark.parametrize("workers", [4, 16])
def test_table1_csv_identical_across_worker_counts(workers: int) -> None:
    def grid_csv(count: int) -> str:
        cells = table1_suite(
            20, 5, 31, SpecTestConfig(), clusterings=((4, 5), (5, 4)), workers=count
        )
        return csv_text(TABLE1_CSV_HEADER, [cell.csv_row() for cell in cells])

    assert grid_csv(workers) == grid_csv(1)


def test_table1_suite_rejects_bad_factorization() -> None:
    with pytest.raises(InvalidArgumentError, match=r"row TwoWay\(40,50\)"):
        table1_suite(20, 1, 0, SpecTestConfig())
    with pytest.raises(InvalidArgumentError, match="expected 2 two-way clusterings, got 1"):
        table1_suite(20, 1, 0, SpecTestConfig(), clusterings=((4, 5),))


@pytest.mark.parametrize(
    ("n", "expected"),
    [(200, (10, 20)), (500, (20, 25)), (1000, (25, 40)), (2000, (40, 50)), (7, (1, 7))],
)
def test_default_factorization(n: int, expected: tuple[int, int]) -> None:
    assert default_factorization(n) == expected


def test_hall_ratio_decreases_with_bandwidth(rng) -> None:
    z = rng.normal(size=1000)
    u = rng.normal(size=1000)
    ratios = [
        hall_diagnostic(estimate_kernel_moments(u, z, SpecTestConfig(bandwidth=b)))
        for b in (0.5, 0.25, 0.1)
    ]
    assert ratios[0] > ratios[1] > ratios[2]


def test_gamma_m1_matches_explicit_gamma_matrix(rng) -> None:
    u = rng.normal(size=40)
    z = rng.normal(size=(40, 1))
    config = SpecTestConfig(bandwidth=0.7)
    weights = config.kernel.product(z[:, None, :] - z[None, :, :], np.array([0.7]))
    h_matrix = np.outer(u, u) * weights / math.sqrt(0.7)
    np.fill_diagonal(h_matrix, 0.0)
    gamma = h_matrix.T @ h_matrix / 40
    off_diagonal = gamma[~np.eye(40, dtype=bool)]
    assert estimate_gamma_m1(u, z, config) == pytest.approx(abs(off_diagonal.mean()), rel=1e-10)
    with pytest.raises(InvalidArgumentError):
        estimate_gamma_m1(u[:1], z[:1], config)


def test_sigma2_plug_in_identity(rng) -> None:
    """Pairing the sample with itself reproduces s_hat2 / 2 exactly."""

    u = rng.normal(size=150)
    z = rng.normal(size=150)
    config = SpecTestConfig()
    s_hat2 = compute_statistic(u, z, config).s_hat2
    assert 2 * estimate_sigma2(u, z, config) == pytest.approx(s_hat2, rel=1e-10)


def test_s_hat2_consistent_for_twice_sigma2() -> None:
    dgp = DgpConfig(1000)
    config = SpecTestConfig()
    s_total = sigma_total = 0.0
    for rep in range(6):
        residuals, Z = null_residuals(dgp, 77, rep)
        copy = null_residuals(dgp, 77, rep + 100)
        s_total += compute_statistic(residuals, Z, config).s_hat2
        sigma_total += 2 * estimate_sigma2(residuals, Z, config, copy=copy)
    assert 0.75 <= s_total / sigma_total <= 1.33


def test_product_kernel_counterexample_stays_non_normal() -> None:
    for n in (200, 500, 1000):
        assert wasserstein1_to_normal(product_kernel_statistics(n, 1000, 3)) > 0.15


def test_normal_baseline_calibrates_w1() -> None:
    assert wasserstein1_to_normal(normal_statistics(1000, 3)) < 0.05


# -----------------------------
# Desk-scale checks
# -----------------------------

_WORKERS = os.cpu_count() or 1


def test_null_size_every_row_desk_scale() -> None:
    n1, n2 = default_factorization(500)
    rates = {}
    for model in table1_rows(((n1, n2), (n2, n1))):
        config = McConfig(DgpConfig(500, model, NullMean()), reps=500, seed=20240611)
        rates[f"{model.label} {model.params}"] = run_mc(config, workers=_WORKERS).rejection_rate
    assert len(rates) == 6
    assert all(0.03 <= rate <= 0.08 for rate in rates.values()), rates


@pytest.mark.parametrize("multiplier", [0.5, 1.0, 2.0])
def test_column_ordering_holds_across_bandwidth_multipliers(multiplier: float) -> None:
    test = SpecTestConfig(bandwidth_mult=multiplier)
    null, strong, narrow = (
        run_mc(
            McConfig(DgpConfig(500, IIDNormal(), column), reps=200, seed=5, test=test),
            workers=_WORKERS,
        ).rejection_rate
        for column in TABLE1_COLUMNS[:3]
    )
    assert strong >= 0.9
    assert strong >= narrow >= null


# -----------------------------
# Full-scale checks
# -----------------------------


@pytest.mark.slow
def test_clt_demo_w1_decreases() -> None:
    for errors in ("iid", "ar1", "twoway"):
        rows = clt_demo(
            CltDemoConfig(
                n_grid=(200, 500, 1000), reps=1000, seed=0, errors=errors, workers=_WORKERS
            )
        )
        w1 = [row.w1 for row in rows]
        assert w1[0] > w1[1] > w1[2], errors


@pytest.mark.slow
def test_null_size_iid_full_scale() -> None:
    result = run_mc(McConfig(DgpConfig(2000), reps=2000, seed=42), workers=_WORKERS)
    assert result.rejection_rate == pytest.approx(0.051, abs=0.02)


@pytest.mark.slow
def test_table1_full_scale() -> None:
    cells = table1_suite(2000, 2000, 42, SpecTestConfig(), workers=_WORKERS)
    grid = np.array([c.result.rejection_rate for c in cells]).reshape(6, 4)
    assert np.all((grid[:, 0] >= 0.035) & (grid[:, 0] <= 0.065))
    assert np.all(grid[:, 1] >= 0.99)
    assert np.all(grid[:, 1] >= grid[:, 2])
    assert np.all(grid[:, 2] >= grid[:, 3])
    # power at (psi=0.1, tau=0.25) falls as the AR coefficient grows
    assert grid[1, 2] > grid[2, 2] > grid[3, 2]


@pytest.mark.slow
@pytest.mark.parametrize("multiplier", [0.5, 2.0])
def test_table1_ordering_under_bandwidth_multiplier(multiplier: float) -> None:
    test = SpecTestConfig(bandwidth_mult=multiplier)
    cells = table1_suite(2000, 2000, 42, test, workers=_WORKERS)
    grid = np.array([c.result.rejection_rate for c in cells]).reshape(6, 4)
    assert np.all(grid[:, 1] >= grid[:, 2])
    assert np.all(grid[:, 2] >= grid[:, 3])
    assert grid[1, 2] > grid[2, 2] > grid[3, 2]
