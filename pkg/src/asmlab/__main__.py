import sys

from asmlab.cli import main

sys.exit(main())
