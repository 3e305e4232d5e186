import sys

from qspectra.cli import main

sys.exit(main())
