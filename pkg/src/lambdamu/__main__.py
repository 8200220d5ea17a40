import sys

from lambdamu.cli import main

sys.exit(main())
