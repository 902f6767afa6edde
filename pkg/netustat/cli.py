"""Command-line entry point for netustat.

One ``argparse`` parser with a subcommand per concern:

    spec-test   run the specification test on a CSV of (y, z1..zd)
    mc          one Monte Carlo cell (error model x mean model)
    table1      the full 6 x 4 rejection-rate grid
    sparsity    tau counts per m-profile for an index space
    mixing      beta of a joint pmf and the coupling demo
    bounds      evaluate normal-approximation bounds from an ingredient document
    clt-demo    Wasserstein-1 distance of simulated statistics to N(0, 1)

Exit status is 0 on success, 1 on a ``NetUstatError`` (with a one-line JSON
error envelope on stderr) and 2 on usage errors. Option values resolve as
explicit flag, then the config-file section of the subcommand, then the
``NETUSTAT_WORKERS`` environment variable (workers only), then the built-in
default.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import schemas
from .const import DOMAIN, ENV_WORKERS, PACKAGE_VERSION
from .exceptions import (
    ExtrapolationError,
    InvalidArgumentError,
    MissingIngredientError,
    NetUstatError,
    ReplicationError,
    ResourceLimitError,
)
from .mc_harness import (
    AR1,
    REFERENCE_CLUSTERINGS,
    TABLE1_CSV_HEADER,
    AlternativeMean,
    DgpConfig,
    ErrorModel,
    IIDNormal,
    McConfig,
    NullMean,
    Table1Cell,
    TwoWayClustering,
    default_factorization,
    normal_statistics,
    product_kernel_statistics,
    run_mc,
    table1_suite,
)
from .mixing import DiscreteJoint, beta_discrete, beta_via_conditional_tv, coupling_summary
from .sparsity import tau_exact, tau_table, tau_table_bound
from .spec_test import RegressionData, SpecTestConfig, run_test, run_test_on_residuals
from .stein_bounds import (
    BoundIngredients,
    BoundResult,
    degenerate_bound,
    ingredients_from_space,
    lln_condition,
    nondegenerate_bound,
    nondegenerate_clt_condition,
    sweep_m,
    variance_condition,
    wasserstein1_to_normal,
)
from .storage import (
    csv_text,
    dumps_json,
    load_json,
    load_matrix,
    load_regression_csv,
    load_space,
    write_text,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2

# Built-in defaults, applied after flags and the config file
DEFAULTS: dict[str, dict[str, Any]] = {
    "spec-test": {"kernel": "gaussian", "bandwidth_mult": 1.0, "level": 0.05, "seed": 0},
    "mc": {
        "n": 500,
        "reps": 500,
        "seed": 0,
        "kernel": "gaussian",
        "bandwidth_mult": 1.0,
        "level": 0.05,
        "errors": "iid",
        "rho": 0.5,
        "bump_scale": 0.25,
    },
    "table1": {
        "n": 2000,
        "reps": 2000,
        "seed": 0,
        "kernel": "gaussian",
        "bandwidth_mult": 1.0,
        "level": 0.05,
    },
    "sparsity": {"q": 4, "m": 1.0, "budget": 10**7, "method": "auto"},
    "mixing": {"draws": 100_000, "seed": 0},
    "bounds": {"mode": "nondegenerate", "kind": "lattice", "budget": 10**7},
    "clt-demo": {
        "kernel": "spec-test",
        "n_grid": [200, 500, 1000],
        "reps": 1000,
        "seed": 0,
        "errors": "iid",
        "rho": 0.5,
        "bandwidth_mult": 1.0,
    },
}


# -----------------------------
# Argument types
# -----------------------------


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{text}'") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got '{text}'") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a positive number, got '{text}'") from exc
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number >= 0, got '{text}'") from exc
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a number >= 0, got {text}")
    return value


def unit_interval(text: str) -> float:
    """Parse a level strictly between 0 and 1."""

    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got '{text}'") from exc
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {text}")
    return value


def ar_coefficient(text: str) -> float:
    """Parse a stationary AR(1) coefficient, ``|rho| < 1``."""

    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number in (-1, 1), got '{text}'") from exc
    if not -1 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a number in (-1, 1), got {text}")
    return value


def cluster_pair(text: str) -> tuple[int, int]:
    """Parse ``N1xN2`` (or ``N1,N2``)."""

    parts = text.lower().replace(",", "x").split("x")
    if len(parts) != 2:  # noqa: PLR2004
        raise argparse.ArgumentTypeError(f"expected N1xN2, got '{text}'")
    return positive_int(parts[0]), positive_int(parts[1])


# -----------------------------
# Parser
# -----------------------------


def _add_test_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--kernel", choices=["gaussian", "epanechnikov", "uniform"])
    sub.add_argument("--bandwidth-mult", type=positive_float)
    sub.add_argument("--level", type=unit_interval, help="test size in (0, 1)")


def _add_mc_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=positive_int, help="sample size")
    sub.add_argument("--reps", type=positive_int, help="Monte Carlo replications")
    sub.add_argument("--seed", type=nonnegative_int, help="master seed")
    sub.add_argument("--workers", type=positive_int, help=f"worker processes (env {ENV_WORKERS})")
    sub.add_argument("--out", type=Path, help="CSV output path")
    _add_test_flags(sub)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netustat",
        description="U-statistics under cross-sectional dependence",
    )
    parser.add_argument("--version", action="version", version=f"netustat {PACKAGE_VERSION}")
    parser.add_argument("--config", type=Path, help="JSON config file (flags take precedence)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub = subs.add_parser("spec-test", help="kernel specification test on regression data")
    sub.add_argument("--input", type=Path, help="CSV with header y,z1,...,zd")
    sub.add_argument("--bandwidth", type=positive_float, nargs="+", help="b or h_1..h_d")
    sub.add_argument("--seed", type=nonnegative_int, help="reserved; the test is deterministic")
    sub.add_argument(
        "--residuals",
        action="store_true",
        default=None,
        help="first column already holds null residuals (header u)",
    )
    sub.add_argument("--out", type=Path, help="JSON output path")
    _add_test_flags(sub)

    sub = subs.add_parser("mc", help="one Monte Carlo cell")
    _add_mc_flags(sub)
    sub.add_argument("--errors", choices=["iid", "ar1", "twoway"])
    sub.add_argument("--rho", type=ar_coefficient, help="AR(1) coefficient, |rho| < 1")
    sub.add_argument("--clustering", type=cluster_pair, help="two-way clusters N1xN2")
    sub.add_argument("--psi", type=float, help="alternative amplitude (null when omitted)")
    sub.add_argument("--bump-scale", type=positive_float)

    sub = subs.add_parser("table1", help="full rejection-rate grid")
    _add_mc_flags(sub)
    sub.add_argument(
        "--clustering",
        type=cluster_pair,
        action="append",
        help="two-way row factorization N1xN2 (give twice)",
    )

    sub = subs.add_parser("sparsity", help="tau counts per m-profile")
    sub.add_argument("--space", type=Path, help="index-space file")
    sub.add_argument("--kind", choices=["matrix", "graph", "lattice", "clustering"])
    sub.add_argument("--q", type=positive_int)
    sub.add_argument("--m", type=nonnegative_float)
    sub.add_argument("--method", choices=["auto", "exact", "bound"])
    sub.add_argument("--budget", type=positive_int, help="largest n^q to enumerate")
    sub.add_argument("--workers", type=positive_int)
    sub.add_argument("--out", type=Path, help="CSV output path")

    sub = subs.add_parser("mixing", help="beta coefficient of a joint pmf")
    sub.add_argument("--pmf", type=Path, help="CSV matrix, rows index A, columns index Y")
    sub.add_argument("--couple", action="store_true", default=None, help="run the coupling demo")
    sub.add_argument("--draws", type=positive_int)
    sub.add_argument("--seed", type=nonnegative_int)
    sub.add_argument("--out", type=Path, help="JSON output path")

    sub = subs.add_parser("bounds", help="evaluate normal-approximation bounds")
    sub.add_argument("--ingredients", type=Path, help="JSON ingredient document")
    sub.add_argument("--mode", choices=["nondegenerate", "degenerate", "detail", "variance"])
    sub.add_argument("--m-grid", type=nonnegative_float, nargs="+", help="sweep m (needs --space)")
    sub.add_argument("--space", type=Path, help="index space supplying tau and eta per m")
    sub.add_argument("--kind", choices=["matrix", "graph", "lattice", "clustering"])
    sub.add_argument("--budget", type=positive_int)
    sub.add_argument("--out", type=Path, help="JSON output path")

    sub = subs.add_parser("clt-demo", help="Wasserstein-1 of simulated statistics to N(0, 1)")
    sub.add_argument("--kernel", choices=["spec-test", "product", "normal"])
    sub.add_argument("--n-grid", type=positive_int, nargs="+")
    sub.add_argument("--reps", type=positive_int)
    sub.add_argument("--seed", type=nonnegative_int)
    sub.add_argument("--errors", choices=["iid", "ar1", "twoway"])
    sub.add_argument("--rho", type=ar_coefficient)
    sub.add_argument("--bandwidth-mult", type=positive_float)
    sub.add_argument("--workers", type=positive_int)
    sub.add_argument("--out", type=Path, help="CSV output path")
    return parser


# -----------------------------
# Config resolution
# -----------------------------


def _default_workers(config: dict[str, Any]) -> int:
    if "workers" in config:
        return int(config["workers"])
    raw = os.environ.get(ENV_WORKERS)
    if raw is None or not raw.strip():
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidArgumentError(f"{ENV_WORKERS} must be a positive integer") from exc
    if value < 1:
        raise InvalidArgumentError(f"{ENV_WORKERS} must be a positive integer")
    return value


def _resolve(args: argparse.Namespace, config: dict[str, Any]) -> argparse.Namespace:
    """Fill unset options from the config section, the environment, then defaults."""

    values = vars(args)
    for key, value in schemas.section(config, args.command).items():
        if key not in values or key in ("command", "config", "log_level"):
            raise InvalidArgumentError(
                f"unknown option '{key}' in config section '{args.command}'"
            )
        if values[key] is None:
            values[key] = value
    if "workers" in values and values["workers"] is None:
        values["workers"] = _default_workers(config)
    for key, value in DEFAULTS[args.command].items():
        if values.get(key) is None:
            values[key] = value
    return args


def _configure_logging(level_name: str) -> None:
    level = getattr(logging, level_name)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s %(message)s")
    logging.getLogger(DOMAIN).setLevel(level)


# -----------------------------
# Output helpers
# -----------------------------


def _human_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Aligned text table with numbers at 6 significant digits."""

    cells = [list(header)] + [
        [format(v, ".6g") if isinstance(v, float) else str(v) for v in row] for row in rows
    ]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths, strict=True)) for r in cells)


def _emit_json(payload: dict[str, Any], out: Path | None) -> None:
    text = dumps_json(payload)
    if out is not None:
        write_text(out, text)
    sys.stdout.write(text)


def _emit_grid(header: Sequence[str], rows: Sequence[Sequence[Any]], out: Path | None) -> None:
    if out is not None:
        write_text(out, csv_text(header, rows))
        sys.stdout.write(_human_table(header, rows) + "\n")
    else:
        sys.stdout.write(csv_text(header, rows))


def _test_config(args: argparse.Namespace, bandwidth: Any = None) -> SpecTestConfig:
    document: dict[str, Any] = {
        "kernel": args.kernel,
        "bandwidth_mult": args.bandwidth_mult,
        "level": args.level,
    }
    if isinstance(bandwidth, list | tuple):
        document["bandwidth"] = list(bandwidth)
    elif bandwidth is not None:
        document["bandwidth"] = bandwidth
    validated = schemas.validate(schemas.SCHEMA_SPEC_TEST, document, what="test")
    return SpecTestConfig.from_dict(validated)


def _error_model(kind: str, n: int, *, rho: float, clustering: Sequence[int] | None) -> ErrorModel:
    if kind == "ar1":
        return AR1(float(rho))
    if kind == "twoway":
        n1, n2 = clustering if clustering is not None else default_factorization(n)
        return TwoWayClustering(int(n1), int(n2))
    return IIDNormal()


# -----------------------------
# Subcommands
# -----------------------------


def _cmd_spec_test(args: argparse.Namespace) -> None:
    first, Z = load_regression_csv(Path(args.input))
    config = _test_config(args, args.bandwidth)
    if args.residuals:
        result = run_test_on_residuals(first, Z, config)
    else:
        result = run_test(RegressionData(first, Z), config)
    _emit_json(result.as_dict(), args.out)


def _cmd_mc(args: argparse.Namespace) -> None:
    model = _error_model(args.errors, args.n, rho=args.rho, clustering=args.clustering)
    mean = NullMean() if args.psi is None else AlternativeMean(args.psi, args.bump_scale)
    dgp = DgpConfig(args.n, model, mean)
    config = McConfig(dgp, reps=args.reps, seed=args.seed, test=_test_config(args))
    result = run_mc(config, workers=args.workers)
    cell = Table1Cell(model.label, model.params, mean.label, result)
    _emit_grid(TABLE1_CSV_HEADER, [cell.csv_row()], args.out)


def _cmd_table1(args: argparse.Namespace) -> None:
    clusterings = (
        tuple(tuple(int(v) for v in pair) for pair in args.clustering)
        if args.clustering
        else REFERENCE_CLUSTERINGS
    )
    cells = table1_suite(
        args.n,
        args.reps,
        args.seed,
        _test_config(args),
        clusterings=clusterings,
        workers=args.workers,
    )
    _emit_grid(TABLE1_CSV_HEADER, [cell.csv_row() for cell in cells], args.out)


def _cmd_sparsity(args: argparse.Namespace) -> None:
    space = load_space(Path(args.space), args.kind).space
    if args.method == "exact":
        table = tau_exact(space, args.q, args.m, budget=args.budget, workers=args.workers)
    elif args.method == "bound":
        table = tau_table_bound(space, args.q, args.m)
    else:
        table = tau_table(space, args.q, args.m, budget=args.budget, workers=args.workers)
    rows = [(label, count, str(table.exact).lower()) for label, count in table.rows()]
    _emit_grid(("profile", "count", "exact"), rows, args.out)


def _cmd_mixing(args: argparse.Namespace) -> None:
    joint = DiscreteJoint(load_matrix(Path(args.pmf)))
    payload: dict[str, Any] = {
        "beta": beta_discrete(joint),
        "beta_conditional_tv": beta_via_conditional_tv(joint),
    }
    if args.couple:
        payload["coupling"] = coupling_summary(joint, args.draws, args.seed)
    _emit_json(payload, args.out)


_EVALUATORS: dict[str, Callable[[BoundIngredients], BoundResult]] = {
    "nondegenerate": nondegenerate_bound,
    "degenerate": lambda ing: degenerate_bound(ing, detail=False),
    "detail": lambda ing: degenerate_bound(ing, detail=True),
}


def _cmd_bounds(args: argparse.Namespace) -> None:
    document = schemas.validate(
        schemas.SCHEMA_BOUND_INGREDIENTS, load_json(Path(args.ingredients)), what="ingredients"
    )
    ing = BoundIngredients.from_dict(document)
    payload: dict[str, Any] = {"mode": args.mode}
    if args.m_grid:
        if args.mode == "variance":
            raise InvalidArgumentError("--m-grid sweeps bound totals; variance mode has none")
        if args.space is None:
            raise InvalidArgumentError("--m-grid needs --space to recompute tau and eta per m")
        space = load_space(Path(args.space), args.kind).space
        scalars = {
            "nu": ing.nu,
            "s": ing.s,
            "H": ing.H,
            "H_tilde2": ing.H_tilde2,
            "Gamma_m2": ing.Gamma_m2,
            "gamma_m1": ing.gamma_m1,
            "multiplier": ing.multiplier,
        }
        best, argmin, rows = sweep_m(
            lambda m: ingredients_from_space(
                space, m, delta=ing.delta, beta=ing.beta, budget=args.budget, **scalars
            ),
            args.m_grid,
            _EVALUATORS[args.mode],
        )
        payload["min_total"] = best
        payload["argmin_m"] = argmin
        payload["sweep"] = [{"m": m, **result.as_dict()} for m, result in rows]
    elif args.mode == "variance":
        sigma2 = document.get("sigma2")
        if sigma2 is None:
            raise MissingIngredientError("sigma2", needed_by="variance_condition")
        lhs, satisfied = variance_condition(ing, sigma2, tolerance=document["tolerance"])
        payload.update({"lhs": lhs, "ratio": lhs / sigma2, "satisfied": satisfied})
    else:
        payload.update(_EVALUATORS[args.mode](ing).as_dict())
        if args.mode == "nondegenerate":
            payload["lln_condition"] = list(lln_condition(ing))
            if ing.eta_m is not None:
                payload["clt_condition"] = list(nondegenerate_clt_condition(ing))
    _emit_json(payload, args.out)


# -----------------------------
# CLT demo
# -----------------------------


@dataclass(frozen=True)
class CltDemoConfig:
    """Grid of sample sizes and the statistic whose law is compared with N(0, 1).

    ``kernel`` is ``spec-test`` (null T_n under ``errors``), ``product`` (the fixed
    kernel ``H = x y`` normalised by ``n sqrt 2``) or ``normal`` (exact N(0, 1)
    draws, for calibrating the distance estimator).
    """

    n_grid: tuple[int, ...]
    reps: int
    seed: int
    kernel: str = "spec-test"
    errors: str = "iid"
    rho: float = 0.5
    test: SpecTestConfig = field(default_factory=SpecTestConfig)
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.n_grid or any(n < 4 for n in self.n_grid):  # noqa: PLR2004
            raise InvalidArgumentError("n grid must be nonempty with every n >= 4")
        if self.reps < 2:  # noqa: PLR2004
            raise InvalidArgumentError("clt demo needs at least 2 replications")
        if self.kernel not in ("spec-test", "product", "normal"):
            raise InvalidArgumentError(f"unknown demo kernel '{self.kernel}'")


@dataclass(frozen=True)
class CltDemoRow:
    n: int
    w1: float
    reps: int


def clt_demo(config: CltDemoConfig) -> list[CltDemoRow]:
    """Collect ``reps`` statistics per n and report their W1 distance to N(0, 1)."""

    rows: list[CltDemoRow] = []
    for n in config.n_grid:
        if config.kernel == "product":
            values = product_kernel_statistics(n, config.reps, config.seed)
        elif config.kernel == "normal":
            values = normal_statistics(config.reps, config.seed)
        else:
            model = _error_model(config.errors, n, rho=config.rho, clustering=None)
            mc = McConfig(
                DgpConfig(n, model, NullMean()),
                reps=config.reps,
                seed=config.seed,
                test=config.test,
                keep_statistics=True,
            )
            values = np.asarray(run_mc(mc, workers=config.workers).per_rep_T)
        w1 = wasserstein1_to_normal(values)
        LOGGER.info(
            "CLT demo point",
            extra={"domain": DOMAIN, "op": "clt_demo", "n": n, "w1": w1, "kernel": config.kernel},
        )
        rows.append(CltDemoRow(n=n, w1=w1, reps=config.reps))
    return rows


def _cmd_clt_demo(args: argparse.Namespace) -> None:
    config = CltDemoConfig(
        n_grid=tuple(int(n) for n in args.n_grid),
        reps=args.reps,
        seed=args.seed,
        kernel=args.kernel,
        errors=args.errors,
        rho=float(args.rho),
        test=_test_config(
            argparse.Namespace(kernel="gaussian", level=0.05, bandwidth_mult=args.bandwidth_mult)
        ),
        workers=args.workers,
    )
    rows = [(row.n, row.w1, row.reps) for row in clt_demo(config)]
    _emit_grid(("n", "W1", "reps"), rows, args.out)


_COMMANDS: dict[str, Callable[[argparse.Namespace], None]] = {
    "spec-test": _cmd_spec_test,
    "mc": _cmd_mc,
    "table1": _cmd_table1,
    "sparsity": _cmd_sparsity,
    "mixing": _cmd_mixing,
    "bounds": _cmd_bounds,
    "clt-demo": _cmd_clt_demo,
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "spec-test": ("input",),
    "sparsity": ("space", "kind"),
    "mixing": ("pmf",),
    "bounds": ("ingredients",),
}


# -----------------------------
# Entry point
# -----------------------------


def _error_envelope(exc: NetUstatError, op: str) -> str:
    data: dict[str, Any] = {"op": op}
    if isinstance(exc, ReplicationError):
        data["rep"] = exc.rep
    if isinstance(exc, MissingIngredientError):
        data["field"] = exc.field
    return json.dumps(
        {"error": {"code": exc.code, "message": str(exc), "data": data}}, sort_keys=True
    )


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit status."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        clustering = getattr(args, "clustering", None)
        if args.command == "table1" and clustering and len(clustering) != 2:  # noqa: PLR2004
            parser.error("table1: give --clustering exactly twice (one per two-way row)")
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    op = args.command.replace("-", "_")
    try:
        config: dict[str, Any] = {}
        if args.config is not None:
            config = schemas.validate(
                schemas.SCHEMA_CONFIG_FILE, load_json(args.config), what="config file"
            )
        _configure_logging(args.log_level or config.get("log_level", "WARNING"))
        args = _resolve(args, config)
        missing = [name for name in _REQUIRED.get(args.command, ()) if getattr(args, name) is None]
        if missing:
            flags = ", ".join("--" + name.replace("_", "-") for name in missing)
            parser.print_usage(sys.stderr)
            sys.stderr.write(f"netustat {args.command}: error: missing {flags}\n")
            return EXIT_USAGE
        _COMMANDS[args.command](args)
    except NetUstatError as exc:
        level = logging.INFO
        if isinstance(exc, ResourceLimitError | ExtrapolationError):
            level = logging.WARNING
        LOGGER.log(level, str(exc), extra={"domain": DOMAIN, "op": op, "code": exc.code})
        sys.stderr.write(_error_envelope(exc, op) + "\n")
        return EXIT_DOMAIN_ERROR
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
