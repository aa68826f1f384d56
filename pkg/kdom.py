#!/usr/bin/env python
# kdom.py – entry point: python kdom.py <subcommand> ...
import sys

from backend.cli import main

if __name__ == "__main__":
    sys.exit(main())
