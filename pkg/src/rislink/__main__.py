import sys

from rislink.harness.cli import main

sys.exit(main())
