# holonomy/main.py
from __future__ import annotations

import sys

from holonomy.cli import main as cli_main


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
