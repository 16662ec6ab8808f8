import sys

from fockgen.cli import main

sys.exit(main())
