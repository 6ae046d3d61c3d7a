import sys

from linrec.main import main

sys.exit(main())
