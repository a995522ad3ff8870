"""Recompute and freeze the digests in the bundled check manifest.

Run after an intentional change to an operation's output format, then review
the diff of ``src/qhodge/data/manifest.json`` before committing.
"""

import argparse
import json
from pathlib import Path

from qhodge import checks

DEFAULT = Path(__file__).resolve().parents[1] / "src" / "qhodge" / "data" / "manifest.json"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--manifest", type=Path, default=DEFAULT)
    a = ap.parse_args()
    m = checks.pin(checks.Manifest.load(a.manifest))
    a.manifest.write_text(json.dumps(m.to_json(), indent=2, sort_keys=True) + "\n")
    for c in m.checks:
        print(f"{c.digest[:16]}  {c.tag:8s} {c.name}")


if __name__ == "__main__":
    main()
