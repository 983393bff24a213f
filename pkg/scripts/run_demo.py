"""End-to-end demo: simulate the park, build the database, augment a day and render the report.

    python3 scripts/run_demo.py [--config configs/demo.cfg] [--out out]
"""
import argparse
import sys

from flexdr.cli import main

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--config", default=None)
parser.add_argument("--out", default="out")
args = parser.parse_args()
common = (["--config", args.config] if args.config else []) + ["--out", args.out]
o = args.out
steps = [
    ["simulate"],
    ["augment", "--input", f"{o}/heating.csv", "--days", "3"],
    ["dispatch", "--target", "only_night", "--case", "H-R-S"],
    ["build-db"],
    ["report", "--pair", "aug_day1_vs_day2", f"{o}/heating_aug_001.csv", f"{o}/heating_aug_002.csv",
     "--curve", f"{o}/heating.csv", "--curve", f"{o}/rotating.csv", "--curve", f"{o}/storage.csv",
     "--db", f"{o}/offline_db.json"],
]
for step in steps:
    print(f"$ flexdr {' '.join(step)}")
    code = main(step + common)
    if code:
        sys.exit(code)
