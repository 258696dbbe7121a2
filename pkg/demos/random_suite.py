"""Seeded randomized checks of both bounds and of rotation invariance.

Run: python3 demos/random_suite.py [trials] [seed]
"""

import sys

from displab import run_random_suite

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 100
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42
report = run_random_suite(trials, seed)
print(report.summary)
print("verdict:", report.verdict, f"({report.wall_time:.2f}s)")
