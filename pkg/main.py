"""CBCChaos command-line entry point.

Usage:
    python main.py analyze --n 2 --cipher caesar:1 --semantics bit-index
"""

import sys

from core.cli import main


if __name__ == "__main__":
    sys.exit(main())
