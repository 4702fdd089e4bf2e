import sys

from rephom.main import main

sys.exit(main())
