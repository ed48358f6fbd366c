import sys

from fassoc.cli import main

sys.exit(main())
