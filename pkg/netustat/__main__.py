"""Allow ``python -m netustat``."""

import sys

from .cli import main

sys.exit(main())
