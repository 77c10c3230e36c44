"""Allow ``python -m two_ends_kernels``."""

from two_ends_kernels.cli.app import main

if __name__ == "__main__":
    raise SystemExit(main())
