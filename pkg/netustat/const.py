"""Constants for netustat.

Defines the logging domain, the public package version, and the numeric
guards shared by the sparsity, mixing and bound modules.
"""

from typing import Final

# Logging domain used in every structured ``extra`` payload
DOMAIN: Final[str] = "netustat"

# Public package version (kept in sync with pyproject.toml)
PACKAGE_VERSION: Final[str] = "0.1.0"

# Environment variable holding the default worker count for the CLI
ENV_WORKERS: Final[str] = "NETUSTAT_WORKERS"

# Largest n**q that tau_exact will enumerate
DEFAULT_ENUMERATION_BUDGET: Final[int] = 10**7

# Joint pmf must sum to one within this tolerance
PMF_TOLERANCE: Final[float] = 1e-12

# Kernel symmetry checks
SYMMETRY_TOLERANCE: Final[float] = 1e-10
SYMMETRY_PAIRS: Final[int] = 16

# Graph spaces cache all-pairs hop distances up to this many nodes
GRAPH_CACHE_MAX_NODES: Final[int] = 2000

# Explicit matrices are checked for the triangle inequality up to this size
TRIANGLE_CHECK_MAX_NODES: Final[int] = 500

# Bound terms switch to log-space products above this factor size
LOG_SPACE_THRESHOLD: Final[float] = 1e150

# Rows per block in the O(n^2) pair loops
PAIR_BLOCK_ROWS: Final[int] = 256
