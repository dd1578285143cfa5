"""Side-by-side lookup demo: a text scan versus the structural query.

Runs against the bundled three-file fixture unless --root points at
another C++ tree. The scan reports every line mentioning the name; the
structural query pins down the single class definition.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

from cppatlas.index import build_index
from cppatlas.queries import find_class, grep_baseline
from cppatlas.repo import load_repository

DEFAULT_ROOT = (
    pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "motivation"
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default=str(DEFAULT_ROOT))
    parser.add_argument("--name", default="Search")
    args = parser.parse_args(argv)

    index = build_index(load_repository(args.root))

    scan = grep_baseline(index, args.name)
    print(f"text scan for {args.name!r}:")
    for match in scan["matches"]:
        print(f"  {match['path']}:{match['line']}: {match['text'].strip()}")
    print(f"  -> {len(scan['matches'])} lines across "
          f"{len({m['path'] for m in scan['matches']})} files")

    record = find_class(index, args.name)
    print(f"\nstructural lookup for {args.name!r}:")
    print(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
