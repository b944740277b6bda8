import sys

from ppmwt.cli import main

sys.exit(main())
