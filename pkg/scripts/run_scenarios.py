"""Run every fixed scenario and print its expected-vs-actual table.

    python scripts/run_scenarios.py [--json OUT_DIR] [--seed N]
"""

import argparse
import sys
from pathlib import Path

from curvlab.runner import SCENARIOS, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", type=Path, help="also write <scenario>.json reports here")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    failed = []
    for name in SCENARIOS:
        rep = run_scenario(name, args.seed)
        print(rep.to_text(), end="\n\n")
        if args.json:
            args.json.mkdir(parents=True, exist_ok=True)
            (args.json / f"{name}.json").write_text(rep.to_json() + "\n")
        if not rep.passed:
            failed.append(name)
    print("all scenarios pass" if not failed else f"failed: {', '.join(failed)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
