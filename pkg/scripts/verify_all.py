"""Verify every group and write a JSON report plus a per-stage timing table.

    python scripts/verify_all.py --out results/ --cache-dir .cache
"""

import argparse
import json
from pathlib import Path

from rank2hecke.catalog import ORDERED_IDS
from rank2hecke.cli import summary_table, validate_report
from rank2hecke import __version__
from rank2hecke.verify import CHECKS, RunConfig, run_group


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--groups", nargs="*", default=list(ORDERED_IDS))
    ap.add_argument("--out", default="results")
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = RunConfig(seed=args.seed, cache_dir=args.cache_dir)
    verdicts = []
    for gid in args.groups:
        v = run_group(gid.upper(), cfg)
        verdicts.append(v)
        print(f"{v.group}: {'PASS' if v.passed else 'FAIL'}", flush=True)

    data = {"version": __version__, "groups": [v.to_json() for v in verdicts]}
    validate_report(data)
    (out / "report.json").write_text(json.dumps(data, indent=2) + "\n")

    header = ["group"] + list(("enumerate",) + CHECKS)
    lines = [",".join(header)]
    for v in verdicts:
        row = [v.group]
        for name in header[1:]:
            st = v.stage(name)
            row.append("" if st is None else f"{st.duration_ms / 1000:.2f}")
        lines.append(",".join(row))
    (out / "stage_seconds.csv").write_text("\n".join(lines) + "\n")
    print(summary_table(verdicts))


if __name__ == "__main__":
    main()
