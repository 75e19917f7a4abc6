import sys

from incoherent.cli import main

sys.exit(main())
