import sys

from cranectl.cli import main

sys.exit(main())
