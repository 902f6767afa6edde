"""netustat: second-order U-statistics under cross-sectional dependence.

Observations are indexed by the nodes of an index space (distance matrix,
lattice, graph or two-way clustering). The package counts index-vector
sparsity, evaluates beta-mixing coefficients and couplings, computes
U-statistics and their Hoeffding decomposition, evaluates plug-in
normal-approximation bounds, and runs the kernel specification test together
with its Monte Carlo harness. ``netustat.cli`` is the command-line surface.
"""

from __future__ import annotations

from .const import DOMAIN, PACKAGE_VERSION
from .exceptions import NetUstatError

__all__ = ["DOMAIN", "PACKAGE_VERSION", "NetUstatError"]
__version__ = PACKAGE_VERSION
