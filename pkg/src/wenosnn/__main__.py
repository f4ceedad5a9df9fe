import sys

from wenosnn.cli import main

sys.exit(main())
