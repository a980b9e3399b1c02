import sys

from hetscan.cli import main

sys.exit(main())
