import sys

from vaa_audit.cli import main

sys.exit(main())
