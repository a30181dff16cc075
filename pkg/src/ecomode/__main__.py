import sys

from ecomode.cli import main

sys.exit(main())
