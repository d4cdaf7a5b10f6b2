"""python -m gravac <subcommand> <scenario> [flags] mirrors the CLI tool."""

import sys

from . import cli_run


def main() -> int:
    return cli_run(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
