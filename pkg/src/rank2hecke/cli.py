"""Command-line driver.

``rank2hecke verify`` runs the per-group pipeline and writes a JSON report;
``rank2hecke dump-catalog`` writes the group records.  Exit codes: 0 when
every requested group passes, 1 on a verification failure, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Sequence

import flint
import jsonschema

from . import __version__
from .catalog import ORDERED_IDS, SPECS, dump_catalog, normalize_id, spec as get_spec
from .laurent import DEFAULT_PRIME
from .verify import CHECKS, RunConfig, Verdict, run_group

CACHE_ENV = "RANK2HECKE_CACHE_DIR"
DEFAULT_REPORT = "rank2hecke-report.json"
DEFAULT_CATALOG = "rank2hecke-catalog.json"

log = logging.getLogger("rank2hecke")


def report_schema() -> dict:
    text = resources.files("rank2hecke").joinpath("report.schema.json").read_text()
    return json.loads(text)


def validate_report(data: dict) -> None:
    jsonschema.validate(data, report_schema())


def _groups(text: str, parser: argparse.ArgumentParser) -> list[str]:
    if text.strip().lower() == "all":
        return list(ORDERED_IDS)
    out = []
    for part in text.split(","):
        if not part.strip():
            continue
        gid = normalize_id(part)
        if gid not in SPECS:
            parser.error(f"unknown group id {part.strip()!r}; choose from {', '.join(ORDERED_IDS)} or 'all'")
        if gid not in out:
            out.append(gid)
    if not out:
        parser.error("no groups selected")
    return out


def _checks(text: str, parser: argparse.ArgumentParser) -> tuple[str, ...]:
    if text.strip().lower() == "all":
        return CHECKS
    chosen = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in chosen if c not in CHECKS]
    if bad:
        parser.error(f"unknown check(s) {', '.join(bad)}; choose from {', '.join(CHECKS)} or 'all'")
    return tuple(c for c in CHECKS if c in chosen)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rank2hecke", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification pipeline")
    v.add_argument("--groups", default="all", help="comma-separated ids (g4,G6,...) or 'all'")
    v.add_argument("--checks", default="all", help=f"comma-separated subset of {', '.join(CHECKS)} or 'all'")
    v.add_argument("--trials", type=int, default=None,
                   help="modular determinant points (default: enough for a 2^-100 error bound, at least 5)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--prime", type=int, default=DEFAULT_PRIME, help="prime between 2^30 and 2^31")
    v.add_argument("--cache-dir", default=None, help=f"action-matrix cache (overrides ${CACHE_ENV})")
    v.add_argument("--no-cache", action="store_true", help="ignore the cache directory")
    v.add_argument("--output", default=DEFAULT_REPORT, help="JSON report path")
    v.add_argument("--jobs", type=int, default=1, help="groups verified in parallel")
    v.add_argument("--force-exact", action="store_true",
                   help="run exact determinants beyond the default size limit")
    v.add_argument("-v", "--verbose", action="count", default=0)

    d = sub.add_parser("dump-catalog", help="write the group records as JSON")
    d.add_argument("path", nargs="?", default=DEFAULT_CATALOG)
    return p


def _run_one(args: tuple[str, RunConfig]) -> Verdict:
    gid, cfg = args
    return run_group(gid, cfg)


def summary_table(verdicts: Sequence[Verdict]) -> str:
    rows = [("group", "|W|", "det A", "determinant check", "failed stages", "result")]
    for v in verdicts:
        s = get_spec(v.group)
        how = "-"
        ex, mod = v.stage("det-exact"), v.stage("det-modular")
        if ex is not None and not ex.skipped:
            how = "exact"
        elif mod is not None and not mod.skipped:
            how = f"modular, {mod.details.get('trials', '?')} points"
        failed = ",".join(st.name for st in v.stages if not st.passed) or "-"
        rows.append((v.group, str(s.order), str(s.expected_determinant()), how, failed,
                     "PASS" if v.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_verify(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    groups = _groups(ns.groups, parser)
    checks = _checks(ns.checks, parser)
    if ns.trials is not None and ns.trials < 1:
        parser.error("--trials must be at least 1")
    if ns.jobs < 1:
        parser.error("--jobs must be at least 1")
    if not (2**30 < ns.prime < 2**31) or not flint.fmpz(ns.prime).is_prime():
        parser.error("--prime must be a prime between 2^30 and 2^31")
    cache = None if ns.no_cache else (ns.cache_dir or os.environ.get(CACHE_ENV))
    cfg = RunConfig(checks=checks, trials=ns.trials, seed=ns.seed, prime=ns.prime,
                    cache_dir=cache, force_exact=ns.force_exact)
    work = [(g, cfg) for g in groups]
    if ns.jobs > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=min(ns.jobs, len(groups))) as pool:
            verdicts = list(pool.map(_run_one, work))
    else:
        verdicts = []
        for item in work:
            log.info("verifying %s", item[0])
            verdicts.append(_run_one(item))
            log.info("%s: %s", item[0], "pass" if verdicts[-1].passed else "FAIL")
    data = {"version": __version__, "groups": [v.to_json() for v in verdicts]}
    validate_report(data)
    out = Path(ns.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(data, indent=2) + "\n")
    print(summary_table(verdicts))
    print(f"report written to {out}")
    return 0 if all(v.passed for v in verdicts) else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    level = logging.WARNING
    if getattr(ns, "verbose", 0):
        level = logging.INFO if ns.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.command == "verify":
            return cmd_verify(ns, parser)
        path = dump_catalog(ns.path)
        print(f"catalog written to {path}")
        return 0
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    except OSError as exc:
        print(f"rank2hecke: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
