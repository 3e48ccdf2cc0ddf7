#!/usr/bin/env python3
"""Run every built-in catalog experiment and write canonical reports."""

import argparse
import sys
from pathlib import Path

from coarsebench.catalog import BUILTIN, run_catalog
from coarsebench.schemas import canonical_json


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="reports", help="directory for the JSON reports")
    args = parser.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = "ok"
    for name in sorted(BUILTIN):
        report = run_catalog(name)
        path = out_dir / f"{name}.json"
        path.write_text(canonical_json(report), encoding="utf-8")
        print(f"{report['status']:>12}  {name}  -> {path}")
        if report["status"] == "fail":
            worst = "fail"
        elif report["status"] == "inconclusive" and worst == "ok":
            worst = "inconclusive"
    return {"ok": 0, "inconclusive": 2}.get(worst, 1)


if __name__ == "__main__":
    sys.exit(main())
