import sys

from crowdtrack.cli import main

sys.exit(main())
