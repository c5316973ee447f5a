import os
import sys

if getattr(sys, "frozen", False):
    current_path = os.path.dirname(sys.executable)
elif __file__:
    current_path = os.path.dirname(os.path.abspath(__file__))
os.environ["current_path"] = current_path

import warnings

warnings.filterwarnings("ignore", category=UserWarning)

from Wct_Utils.commands import main

if __name__ == "__main__":
    sys.exit(main())
