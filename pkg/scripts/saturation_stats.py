"""Saturation statistics: passes, entries filled per rule and wall time, with and without hints.

    python scripts/saturation_stats.py G4 G6 G7
"""

import sys
import time

from rank2hecke.catalog import ORDERED_IDS
from rank2hecke.hecke import StallError, saturate, seed_table


def run(gid: str, hints: bool) -> str:
    table = seed_table(gid)
    t0 = time.perf_counter()
    try:
        stats = saturate(table, use_hints=hints)
    except StallError as exc:
        return f"stalled after {time.perf_counter() - t0:.2f}s, {len(exc.missing)} missing, first {exc.missing[0]}"
    rules = " ".join(f"{k}={v}" for k, v in sorted(stats.filled.items()))
    return f"closed in {stats.passes} passes, {stats.seconds:.2f}s, {rules}"


def main() -> None:
    groups = [g.upper() for g in sys.argv[1:]] or list(ORDERED_IDS)
    for gid in groups:
        print(f"{gid:4s} hints:    {run(gid, True)}", flush=True)
        print(f"{gid:4s} no hints: {run(gid, False)}", flush=True)


if __name__ == "__main__":
    main()
