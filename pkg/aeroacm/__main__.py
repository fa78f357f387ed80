import sys

from aeroacm.cli import main

sys.exit(main())
