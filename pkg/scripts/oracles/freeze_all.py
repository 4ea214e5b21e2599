"""Run every oracle and write the package's frozen_thresholds.json."""

from __future__ import annotations

import json
from pathlib import Path

import lemma_s
import overlap_bound
import qia
import vartwo

TARGET = Path(__file__).resolve().parents[2] / "src" / "randapprox" / "frozen_thresholds.json"


def main() -> None:
    table = {}
    table.update(lemma_s.run())
    table.update(qia.divergent())
    table.update(qia.quarter())
    table.update(overlap_bound.run())
    table.update(vartwo.run())
    TARGET.write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(table)} entries to {TARGET}")


if __name__ == "__main__":
    main()
