#!/usr/bin/env python3
"""Run the invariant property suite (CI gate). Exit code 2 on any failure."""

import sys

from oiasim import cli

if __name__ == "__main__":
    sys.exit(cli.main(["props"] + sys.argv[1:]))
