# GFRAG/index.py
import sys

from GFRAG.critical_gf.main import main as main, run as run

if __name__ == "__main__":
    sys.exit(main())
