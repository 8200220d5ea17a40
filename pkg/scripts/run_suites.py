"""Run property suites at their default bounds and write one JSON report each.

    python3 scripts/run_suites.py [--out reports] [--size N] [suite ...]
"""

import argparse
import pathlib
import sys

from lambdamu.harness import default_config, run_suite, suite_names


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("suites", nargs="*", help="defaults to every suite")
    p.add_argument("--out", default="reports", help="directory for the JSON reports")
    p.add_argument("--size", type=int, help="override the enumeration size bound")
    args = p.parse_args(argv)

    names = args.suites or list(suite_names())
    unknown = sorted(set(names) - set(suite_names()))
    if unknown:
        p.error(f"unknown suites: {', '.join(unknown)}")
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    failed = 0
    for name in names:
        overrides = {} if args.size is None else {"max_term_size": args.size}
        report = run_suite(name, default_config(name, **overrides))
        (out / f"{name}.json").write_text(report.dumps() + "\n")
        print(report.table(), flush=True)
        print()
        failed += not report.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
