"""Entry point for ``python -m cvpolar``."""
import sys

from .cli import main

sys.exit(main())
