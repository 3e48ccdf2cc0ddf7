#!/usr/bin/env python3
"""Run every acceptance criterion and print one PASS/FAIL line per check."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from test_acceptance import CRITERIA, run_criterion  # noqa: E402

if __name__ == "__main__":
    results = [run_criterion(*entry) for entry in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
