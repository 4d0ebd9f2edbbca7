"""Module entry point for `python -m ruinwalk`."""

import sys

from .cli import main

sys.exit(main())
