r"""Acceptance run for the specification-test simulation grid.

Runs the six-row by four-column size/power grid, the CLT distance checks and
a worker-count determinism check, then prints PASS/FAIL per tolerance.

Usage:
    python scripts/acceptance_check.py                 # desk-scale smoke run
    python scripts/acceptance_check.py --scale full --workers 8

Options:
    --scale {smoke,full}   smoke: n=500, reps=500; full: n=2000, reps=2000
    --workers N             worker processes for the Monte Carlo loops
    --seed S                master seed (default 20240611)
    --bandwidth-mult B      multiplier on the default bandwidth rule
    --skip-clt              skip the Wasserstein distance checks
"""

from __future__ import annotations

import argparse
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from netustat.cli import CltDemoConfig, clt_demo  # noqa: E402
from netustat.mc_harness import (  # noqa: E402
    REFERENCE_CLUSTERINGS,
    TABLE1_CSV_HEADER,
    Table1Cell,
    default_factorization,
    table1_suite,
)
from netustat.spec_test import SpecTestConfig  # noqa: E402
from netustat.storage import csv_text  # noqa: E402

# -----------------------------------------------------------------------------
# Constants
# -----------------------------------------------------------------------------

DEFAULT_SEED = 20240611

# Reference rejection rates, rows in grid order
REFERENCE_SIZE = (0.051, 0.050, 0.054, 0.049, 0.046, 0.048)
REFERENCE_POWER_NARROW = (0.872, 0.867, 0.711, 0.131, 0.896, 0.884)

SIZE_TOLERANCE = 0.02
POWER_TOLERANCE = 0.05
SMOKE_SIZE_RANGE = (0.03, 0.08)
STRONG_POWER_FLOOR = 0.99
PRODUCT_W1_FLOOR = 0.15

NULL_COLUMN = "null"
STRONG_COLUMN = "psi=0.5,tau=0.25"
NARROW_COLUMN = "psi=0.1,tau=0.25"

CLT_N_GRID = (200, 500, 1000)
DETERMINISM_N = 40
DETERMINISM_REPS = 20
DETERMINISM_WORKERS = (1, 4, 16)

GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
BOLD = "\033[1m"
RESET = "\033[0m"


@dataclass(frozen=True)
class Scale:
    n: int
    reps: int
    clt_reps: int


SCALES = {
    "smoke": Scale(n=500, reps=500, clt_reps=200),
    "full": Scale(n=2000, reps=2000, clt_reps=1000),
}


# -----------------------------------------------------------------------------
# Data classes
# -----------------------------------------------------------------------------


@dataclass
class ScenarioResult:
    """Result of a single acceptance scenario."""

    name: str
    passed: bool
    duration_s: float
    details: dict[str, Any] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)


# -----------------------------------------------------------------------------
# Utilities
# -----------------------------------------------------------------------------


def print_status(msg: str, status: str = "info") -> None:
    """Print a status message with color coding."""
    if status == "pass":
        print(f"{GREEN}[OK] {msg}{RESET}")
    elif status == "fail":
        print(f"{RED}[FAIL] {msg}{RESET}")
    elif status == "warn":
        print(f"{YELLOW}[WARN] {msg}{RESET}")
    elif status == "info":
        print(f"{CYAN}[INFO] {msg}{RESET}")
    elif status == "header":
        print(f"\n{BOLD}{CYAN}{'=' * 60}{RESET}")
        print(f"{BOLD}{CYAN}{msg}{RESET}")
        print(f"{BOLD}{CYAN}{'=' * 60}{RESET}")
    else:
        print(msg)


def _timed(name: str, check: Callable[[ScenarioResult], None]) -> ScenarioResult:
    print_status(name, "header")
    result = ScenarioResult(name=name, passed=True, duration_s=0.0)
    start = time.perf_counter()
    check(result)
    result.duration_s = time.perf_counter() - start
    result.passed = not result.errors
    print_status(f"{name}: {len(result.errors)} violation(s)", "pass" if result.passed else "fail")
    return result


def _column(cells: list[Table1Cell], label: str) -> list[Table1Cell]:
    return [cell for cell in cells if cell.column_label == label]


def _row_name(cell: Table1Cell) -> str:
    return f"{cell.error_model} {cell.params}"


def _clusterings(n: int) -> tuple[tuple[int, int], ...]:
    if n == 2000:  # noqa: PLR2004
        return REFERENCE_CLUSTERINGS
    n1, n2 = default_factorization(n)
    return ((n1, n2), (n2, n1))


# -----------------------------------------------------------------------------
# Scenarios
# -----------------------------------------------------------------------------


def check_size(cells: list[Table1Cell], scale_name: str, result: ScenarioResult) -> None:
    for cell, reference in zip(_column(cells, NULL_COLUMN), REFERENCE_SIZE, strict=True):
        rate = cell.result.rejection_rate
        result.details[_row_name(cell)] = rate
        if scale_name == "full":
            ok = abs(rate - reference) <= SIZE_TOLERANCE
            bound = f"{reference} +/- {SIZE_TOLERANCE}"
        else:
            ok = SMOKE_SIZE_RANGE[0] <= rate <= SMOKE_SIZE_RANGE[1]
            bound = f"[{SMOKE_SIZE_RANGE[0]}, {SMOKE_SIZE_RANGE[1]}]"
        print(f"  {_row_name(cell):<24} size {rate:.3f}  expected {bound}")
        if not ok:
            result.errors.append(f"{_row_name(cell)}: size {rate:.3f} outside {bound}")


def check_power(cells: list[Table1Cell], result: ScenarioResult) -> None:
    for cell in _column(cells, STRONG_COLUMN):
        rate = cell.result.rejection_rate
        if rate < STRONG_POWER_FLOOR:
            result.errors.append(f"{_row_name(cell)}: power {rate:.3f} < {STRONG_POWER_FLOOR}")

    narrow = _column(cells, NARROW_COLUMN)
    for cell, reference in zip(narrow, REFERENCE_POWER_NARROW, strict=True):
        rate = cell.result.rejection_rate
        result.details[_row_name(cell)] = rate
        print(f"  {_row_name(cell):<24} power {rate:.3f}  reference {reference}")
        if abs(rate - reference) > POWER_TOLERANCE:
            result.errors.append(
                f"{_row_name(cell)}: power {rate:.3f} outside {reference} +/- {POWER_TOLERANCE}"
            )

    # rows 1..3 are AR(0.1), AR(0.5), AR(0.9)
    ar_power = [cell.result.rejection_rate for cell in narrow[1:4]]
    if not all(a > b for a, b in zip(ar_power, ar_power[1:], strict=False)):
        result.errors.append(f"AR power not strictly decreasing in rho: {ar_power}")


def check_clt(
    scale: Scale, seed: int, test: SpecTestConfig, workers: int, result: ScenarioResult
) -> None:
    for errors in ("iid", "ar1", "twoway"):
        rows = clt_demo(
            CltDemoConfig(
                CLT_N_GRID, scale.clt_reps, seed, errors=errors, test=test, workers=workers
            )
        )
        w1 = [row.w1 for row in rows]
        result.details[errors] = w1
        print(f"  {errors:<8} W1 {', '.join(f'{w:.4f}' for w in w1)}")
        if not all(a > b for a, b in zip(w1, w1[1:], strict=False)):
            result.errors.append(f"{errors}: W1 not strictly decreasing over {CLT_N_GRID}")

    product = clt_demo(CltDemoConfig((CLT_N_GRID[-1],), scale.clt_reps, seed, kernel="product"))
    w1 = product[0].w1
    result.details["product"] = w1
    print(f"  product  W1 {w1:.4f}")
    if not w1 > PRODUCT_W1_FLOOR:
        result.errors.append(f"product kernel W1 {w1:.4f} <= {PRODUCT_W1_FLOOR}")


def check_determinism(seed: int, test: SpecTestConfig, result: ScenarioResult) -> None:
    clusterings = _clusterings(DETERMINISM_N)
    outputs = {}
    for workers in DETERMINISM_WORKERS:
        cells = table1_suite(
            DETERMINISM_N,
            DETERMINISM_REPS,
            seed,
            test,
            clusterings=clusterings,
            workers=workers,
        )
        outputs[workers] = csv_text(TABLE1_CSV_HEADER, (cell.csv_row() for cell in cells))
    first = outputs[DETERMINISM_WORKERS[0]]
    for workers, text in outputs.items():
        if text != first:
            result.errors.append(f"workers={workers} output differs from workers=1")


# -----------------------------------------------------------------------------
# Main
# -----------------------------------------------------------------------------


def print_summary(results: list[ScenarioResult]) -> None:
    """Print final summary table."""
    print_status("ACCEPTANCE SUMMARY", "header")

    total = len(results)
    passed = sum(1 for r in results if r.passed)

    print(f"\n{'Scenario':<40} {'Status':<10} {'Duration':<12}")
    print("-" * 62)

    for r in results:
        status = f"{GREEN}PASS{RESET}" if r.passed else f"{RED}FAIL{RESET}"
        print(f"{r.name:<40} {status:<20} {r.duration_s:.2f}s")
        for err in r.errors[:3]:
            print(f"  {RED}-> {err}{RESET}")

    print("-" * 62)
    overall = f"{GREEN}PASSED{RESET}" if passed == total else f"{RED}FAILED{RESET}"
    print(f"{'Overall':<40} {overall:<20} {passed}/{total} scenarios")


def main() -> int:
    parser = argparse.ArgumentParser(description="netustat acceptance run")
    parser.add_argument("--scale", choices=sorted(SCALES), default="smoke")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--bandwidth-mult", type=float, default=1.0)
    parser.add_argument("--skip-clt", action="store_true", help="Skip the W1 checks")
    args = parser.parse_args()

    scale = SCALES[args.scale]
    test = SpecTestConfig(bandwidth_mult=args.bandwidth_mult)
    print_status(f"Scale: {args.scale} (n={scale.n}, reps={scale.reps})", "info")
    print_status(f"Workers: {args.workers}, seed: {args.seed}", "info")

    started = time.perf_counter()
    cells = table1_suite(
        scale.n,
        scale.reps,
        args.seed,
        test,
        clusterings=_clusterings(scale.n),
        workers=args.workers,
    )
    print_status(f"Grid finished in {time.perf_counter() - started:.1f}s", "info")

    results = [_timed("Null size", lambda r: check_size(cells, args.scale, r))]
    if args.scale == "full":
        results.append(_timed("Power structure", lambda r: check_power(cells, r)))
    else:
        print_status("Power tolerances apply at full scale only", "warn")
    if not args.skip_clt:
        results.append(
            _timed("CLT distances", lambda r: check_clt(scale, args.seed, test, args.workers, r))
        )
    results.append(_timed("Worker determinism", lambda r: check_determinism(args.seed, test, r)))

    print_summary(results)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    try:
        code = main()
    except KeyboardInterrupt:
        print_status("\nAcceptance run interrupted by user", "warn")
        code = 130
    sys.exit(code)
