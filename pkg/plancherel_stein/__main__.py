import sys

from plancherel_stein.cli import main

sys.exit(main())
