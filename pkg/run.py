#!/usr/bin/env python
"""
Run the MrSQM command line from a source checkout.

    python run.py fit --train Coffee_TRAIN.ts --out coffee.json
    python run.py predict --model coffee.json --test Coffee_TEST.ts --out predictions.csv
"""

import sys

from mrsqm.scripts.cli import main


if __name__ == "__main__":
    sys.exit(main())
