import sys

from gqsearch.cli import main

sys.exit(main())
