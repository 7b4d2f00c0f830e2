import sys

from periodic_stokes.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
