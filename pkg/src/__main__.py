"""Allow running as: python -m src"""

import sys

from src.ring_chord import main

if __name__ == "__main__":
    sys.exit(main())
