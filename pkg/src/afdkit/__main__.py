"""Module entry point so ``python -m afdkit`` matches the console script."""

import sys

from .cli import main

sys.exit(main())
