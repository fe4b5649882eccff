import sys

from dlrastab.harness.cli import main

sys.exit(main())
