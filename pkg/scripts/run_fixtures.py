#!/usr/bin/env python3
"""Run every bundled fixture through the CLI dispatcher and compare exit codes."""
import argparse
import json
import sys
from pathlib import Path

from stackycdga import cli

EXIT = {"pass": 0, "fail": 1, "unknown": 2}
FIXTURES = Path(cli.__file__).with_name("fixtures")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dir", type=Path, default=FIXTURES)
    p.add_argument("-v", "--verbose", action="store_true", help="print each report")
    args = p.parse_args(argv)
    bad = 0
    for path in sorted(args.dir.glob("*.json")):
        text = path.read_text()
        job = json.loads(text)["job"]
        ns = cli.build_parser().parse_args([job["command"], str(path)])
        doc = cli.run(cli.make_job(ns, text, str(path)))
        ok = doc.exit_code == EXIT[job["verdict"]]
        bad += not ok
        print(f"{'ok ' if ok else 'BAD'} {path.stem:28s} {job['command']:16s} {doc.verdict.value:8s} {doc.timing:.3f}s")
        if args.verbose:
            print(doc.to_text())
    print(f"{bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
