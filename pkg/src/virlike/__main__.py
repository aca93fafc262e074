import sys

from virlike.cli import main

sys.exit(main())
