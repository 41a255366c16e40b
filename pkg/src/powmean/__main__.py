import sys

from powmean.cli import main

sys.exit(main())
