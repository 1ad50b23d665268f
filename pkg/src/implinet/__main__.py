import sys

from implinet.cli import main

sys.exit(main())
