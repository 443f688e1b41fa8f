import sys

from midint.cli import main


sys.exit(main())
