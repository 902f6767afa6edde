"""Validation schemas for netustat documents.

Every JSON document entering the library (CLI config file, bound ingredients,
mixing models, DGP and spec-test settings) is validated here with voluptuous
before it reaches a ``from_dict`` constructor. ``validate`` converts
``vol.Invalid`` into ``InvalidArgumentError`` so callers see one error type.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from typing import Any

import voluptuous as vol

from .const import DOMAIN
from .exceptions import InvalidArgumentError
from .smoothing import SmoothingKernel

LOGGER = logging.getLogger(__name__)


# -----------------------------
# Building blocks
# -----------------------------

_NUMBER = vol.All(vol.Coerce(float), vol.Range(min=-math.inf, max=math.inf))
_NONNEG = vol.All(vol.Coerce(float), vol.Range(min=0))
_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
_POS_INT = vol.All(int, vol.Range(min=1))
_PROBABILITY = vol.All(vol.Coerce(float), vol.Range(min=0, max=1))
_SCALAR = vol.Any(str, int, float, bool, None)

SCHEMA_MIXING = vol.Any(
    vol.Schema({vol.Required("kind"): "independent"}),
    vol.Schema(
        {
            vol.Required("kind"): "geometric",
            vol.Required("rho"): vol.All(
                vol.Coerce(float), vol.Range(min=0, max=1, min_included=False, max_included=False)
            ),
            vol.Optional("scale", default=1.0): _NONNEG,
        }
    ),
    vol.Schema({vol.Required("kind"): "dependency_graph", vol.Required("cutoff"): _NONNEG}),
    vol.Schema(
        {
            vol.Required("kind"): "table",
            vol.Required("n1_grid"): [_POS_INT],
            vol.Required("n2_grid"): [_POS_INT],
            vol.Required("m_grid"): [_NONNEG],
            vol.Required("values"): [[[_PROBABILITY]]],
        }
    ),
)

SCHEMA_BOUND_INGREDIENTS = vol.Schema(
    {
        vol.Required("n"): _POS_INT,
        vol.Required("m"): _NONNEG,
        vol.Required("delta"): _POSITIVE,
        vol.Required("beta"): SCHEMA_MIXING,
        vol.Optional("nu"): _POSITIVE,
        vol.Optional("s"): _POSITIVE,
        # keys are moment orders such as "2", "4" or "2+delta"
        vol.Optional("H_p", default={}): {str: _NONNEG},
        vol.Optional("H_tilde2"): _NONNEG,
        vol.Optional("Gamma_m2"): _NONNEG,
        vol.Optional("gamma_m1"): _NONNEG,
        # keys are profiles such as "4", "2,2" or "2,1,1"
        vol.Optional("tau", default={}): {str: _NONNEG},
        vol.Optional("tau_4m", default={}): {str: _NONNEG},
        vol.Optional("eta_m"): _NONNEG,
        vol.Optional("eta_4m"): _NONNEG,
        vol.Optional("multiplier", default=1.0): _NONNEG,
        vol.Optional("sigma2"): _POSITIVE,
        vol.Optional("tolerance", default=0.1): _POSITIVE,
    }
)

SCHEMA_SPEC_TEST = vol.Schema(
    {
        vol.Optional("kernel", default=SmoothingKernel.GAUSSIAN.value): vol.In(
            [k.value for k in SmoothingKernel]
        ),
        vol.Optional("bandwidth"): vol.Any(
            None, _POSITIVE, vol.All([_POSITIVE], vol.Length(min=1))
        ),
        vol.Optional("bandwidth_mult", default=1.0): _POSITIVE,
        vol.Optional("level", default=0.05): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, min_included=False, max_included=False)
        ),
    }
)

SCHEMA_ERROR_MODEL = vol.Any(
    vol.Schema({vol.Required("kind"): "iid"}),
    vol.Schema(
        {
            vol.Required("kind"): "ar1",
            vol.Required("rho"): vol.All(
                vol.Coerce(float), vol.Range(min=-1, max=1, min_included=False, max_included=False)
            ),
        }
    ),
    vol.Schema(
        {vol.Required("kind"): "twoway", vol.Required("n1"): _POS_INT, vol.Required("n2"): _POS_INT}
    ),
)

SCHEMA_MEAN_MODEL = vol.Any(
    vol.Schema(
        {
            vol.Required("kind"): "null",
            vol.Optional("gamma0", default=1.0): _NUMBER,
            vol.Optional("gamma1", default=1.0): _NUMBER,
        }
    ),
    vol.Schema(
        {
            vol.Required("kind"): "alternative",
            vol.Required("psi"): _NUMBER,
            vol.Required("bump_scale"): _POSITIVE,
            vol.Optional("gamma0", default=1.0): _NUMBER,
            vol.Optional("gamma1", default=1.0): _NUMBER,
        }
    ),
)

SCHEMA_DGP = vol.Schema(
    {
        vol.Required("n"): vol.All(int, vol.Range(min=4)),
        vol.Optional("error_model", default={"kind": "iid"}): SCHEMA_ERROR_MODEL,
        vol.Optional("mean_model", default={"kind": "null"}): SCHEMA_MEAN_MODEL,
    }
)

SUBCOMMANDS: tuple[str, ...] = (
    "spec-test",
    "mc",
    "table1",
    "sparsity",
    "mixing",
    "bounds",
    "clt-demo",
)

# Sections hold flag defaults keyed by option name with underscores (``bandwidth_mult``)
_SECTION = vol.Schema({str: vol.Any(_SCALAR, [_SCALAR], [[_SCALAR]])})

SCHEMA_CONFIG_FILE = vol.Schema(
    {
        vol.Optional("log_level"): vol.In(["DEBUG", "INFO", "WARNING", "ERROR"]),
        vol.Optional("workers"): _POS_INT,
        **{vol.Optional(name): _SECTION for name in SUBCOMMANDS},
    }
)


def validate(schema: vol.Schema | vol.Any, document: Any, *, what: str) -> Any:
    """Validate ``document`` and return the normalised copy.

    Raises ``InvalidArgumentError`` naming ``what`` and the failing path.
    """

    try:
        return vol.Schema(schema)(document)
    except vol.Invalid as exc:
        LOGGER.debug(
            "Document failed validation",
            extra={"domain": DOMAIN, "op": "validate", "what": what},
        )
        raise InvalidArgumentError(f"invalid {what}: {exc}") from exc


def section(config: Mapping[str, Any], name: str) -> dict[str, Any]:
    """Return the config-file section for subcommand ``name`` (empty when absent)."""

    return dict(config.get(name, {}))
