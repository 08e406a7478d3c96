"""``builddiff`` command line.

Exit codes: 0 success, 1 bad input, 2 usage error, 3 changes found with
``diff --fail-on-change``, 4 ``releases fetch`` found no releases.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .changedb import read_changedb
from .classifier import diff_trees, evaluate
from .differ import DEFAULT_THRESHOLD, MatcherConfig, edit_script, match_trees, script_to_json
from .kernels import BACKEND
from .miner import NotARepository, mine_to_file
from .pom import PomError, normalize, parse_pom
from .releases import HttpError, RateLimited, fetch_releases, read_releases_csv
from .stats import daily_series, frequency_report, release_proximity_report, timeseries_rows
from .taxonomy import build_taxonomy

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_CHANGES, EXIT_EMPTY = 0, 1, 2, 3, 4
TOKEN_ENV = "GITHUB_TOKEN"

log = logging.getLogger("builddiff")


class InputError(Exception):
    pass


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return value


def _ks(text: str) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window list: {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("windows must be positive integers")
    return ks


def _read_pom(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_pom(data, path)
    except PomError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def cmd_diff(args) -> int:
    old, new = _read_pom(args.old), _read_pom(args.new)
    cfg = MatcherConfig(args.threshold)
    if args.edit_script:
        o, n = normalize(old), normalize(new)
        _emit_json(script_to_json(edit_script(o, n, match_trees(o, n, cfg))))
        return EXIT_OK
    changes = diff_trees(old, new, cfg)
    if args.json:
        _emit_json([c.to_dict() for c in changes])
    else:
        for c in changes:
            print(f"{c.name}\t{c.node_path}\t{c.old_value} -> {c.new_value}")
    if args.fail_on_change and changes:
        return EXIT_CHANGES
    return EXIT_OK


def cmd_taxonomy(args) -> int:
    rows = [{"name": t.name, "path": t.element_path, "kind": t.kind.value,
             "category": t.category.value} for t in build_taxonomy()]
    if args.json:
        _emit_json(rows)
    else:
        writer = csv.writer(sys.stdout, delimiter="\t", lineterminator="\n")
        writer.writerow(["name", "path", "kind", "category"])
        for r in rows:
            writer.writerow([r["name"], r["path"], r["kind"], r["category"]])
    return EXIT_OK


def cmd_mine(args) -> int:
    try:
        summary = mine_to_file(args.repo_path, args.out, MatcherConfig(args.threshold),
                               summary_path=args.summary, include_initial=args.include_initial,
                               use_committer_time=args.committer_time, workers=args.workers)
    except NotARepository as exc:
        raise InputError(f"not a git repository: {exc}") from exc
    if args.json:
        _emit_json(summary.to_dict())
    else:
        for key, value in summary.to_dict().items():
            print(f"{key}\t{value}")
    return EXIT_OK


def _load_db(path: str):
    try:
        return read_changedb(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_frequency(args) -> int:
    report = frequency_report(_load_db(args.db), top_n=args.top)
    if args.json:
        _emit_json(report.to_dict())
        return EXIT_OK
    print(f"total changes: {report.total_changes}")
    print("\ncategory\tfrequency")
    for cat, f in sorted(report.per_category.items(), key=lambda kv: -kv[1]):
        print(f"{cat}\t{f:.4f}")
    print("\nchange type\tcount\tfrequency")
    for name, f in sorted(report.per_type.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"{name}\t{report.counts[name]}\t{f:.4f}")
    if report.top:
        print(f"\ntop {len(report.top)} share: {report.top_share:.4f}")
    return EXIT_OK


def cmd_proximity(args) -> int:
    records = _load_db(args.db)
    try:
        releases = read_releases_csv(args.releases)
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.releases}: {exc}") from exc
    alternative = "greater" if args.one_sided else "two-sided"
    rows = release_proximity_report(records, releases, args.k, alternative=alternative,
                                    active_days_only=args.active_days_only)
    if args.timeseries_out:
        k_plot = args.k[-1] if args.plot_k is None else args.plot_k
        series = daily_series(records, k_plot)
        with open(args.timeseries_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["date", "count", "is_release"])
            writer.writerows(timeseries_rows(series, releases))
    if args.json:
        _emit_json([r.to_dict() for r in rows])
        return EXIT_OK
    print("k\tp_value\tdelta\tmagnitude\tn_near\tn_far\tnote")
    for r in rows:
        if r.result is None:
            print(f"{r.k}\t-\t-\t-\t-\t-\t{r.flag}")
        else:
            t = r.result
            print(f"{r.k}\t{t.p_value:.3g}\t{t.delta:.3f}\t{t.magnitude}\t{t.n_near}\t{t.n_far}\t"
                  f"{'significant' if t.significant else ''}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    try:
        events = fetch_releases(args.remote, os.environ.get(TOKEN_ENV), out=args.out)
    except RateLimited as exc:
        wait = f" (retry after {exc.retry_after:.0f}s)" if exc.retry_after is not None else ""
        raise InputError(f"{exc}{wait}") from exc
    except (HttpError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    print(f"{len(events)} releases written to {args.out}", file=sys.stderr)
    return EXIT_OK if events else EXIT_EMPTY


def _load_changes(path: str) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    row = json.loads(line)
                    if "change_type" not in row or "node_path" not in row:
                        raise InputError(f"{path}:{lineno}: missing change_type/node_path")
                    rows.append(row)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return rows


def cmd_evaluate(args) -> int:
    report = evaluate(_load_changes(args.extracted), _load_changes(args.labeled))
    if args.json:
        _emit_json(report.to_dict())
        return EXIT_OK
    print(f"precision\t{report.precision:.4f}")
    print(f"recall\t{report.recall:.4f}")
    print(f"found\t{report.found}\texpected\t{report.expected}\trelevant\t{report.relevant}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="builddiff",
                                     description="Fine-grained Maven build change extraction.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def json_flag(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("diff", help="classify changes between two pom files")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("--fail-on-change", action="store_true",
                   help=f"exit {EXIT_CHANGES} when any change is found")
    p.add_argument("--edit-script", action="store_true",
                   help="dump the raw edit script as JSON instead")
    json_flag(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("taxonomy", help="list all change types")
    json_flag(p)
    p.set_defaults(func=cmd_taxonomy)

    p = sub.add_parser("mine", help="extract changes from a git history")
    p.add_argument("repo_path")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="summary JSON path (default: summary.json beside --out)")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("--include-initial", action="store_true",
                   help="also record poms of root commits as insertions")
    p.add_argument("--committer-time", action="store_true",
                   help="timestamp records with committer instead of author time")
    p.add_argument("--workers", type=int, default=1)
    json_flag(p)
    p.set_defaults(func=cmd_mine)

    stats = sub.add_parser("stats", help="analyses over a ChangeDB")
    ssub = stats.add_subparsers(dest="analysis", required=True)
    p = ssub.add_parser("frequency")
    p.add_argument("db")
    p.add_argument("--top", type=int, default=10)
    json_flag(p)
    p.set_defaults(func=cmd_frequency)
    p = ssub.add_parser("release-proximity")
    p.add_argument("db")
    p.add_argument("--releases", required=True)
    p.add_argument("-k", type=_ks, default=[1, 5, 7, 9])
    p.add_argument("--one-sided", action="store_true",
                   help="test whether near-release days have more changes")
    p.add_argument("--active-days-only", action="store_true",
                   help="ignore calendar days without changes")
    p.add_argument("--timeseries-out", help="write date,count,is_release CSV")
    p.add_argument("--plot-k", type=int, help="window for the time series (default: last -k)")
    json_flag(p)
    p.set_defaults(func=cmd_proximity)

    rel = sub.add_parser("releases", help="release metadata")
    rsub = rel.add_subparsers(dest="action", required=True)
    p = rsub.add_parser("fetch", help=f"download releases (token from ${TOKEN_ENV})")
    p.add_argument("remote", help="owner/name, or a local releases CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("evaluate", help="precision/recall of extracted vs labeled changes")
    p.add_argument("extracted")
    p.add_argument("labeled")
    json_flag(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"builddiff: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
