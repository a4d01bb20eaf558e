"""Command-line interface: ``prfsig metrics|test|simulate``.

Exit codes: 0 success, 2 input error, 3 invalid method/metric combination,
4 degenerate statistic.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .analytic import DegenerateStatisticError, TestResult
from .compare import (
    ALIASES,
    InvalidCombinationError,
    compare,
    default_sidedness,
    observed_better,
    resolve_method,
)
from .correlation import UndefinedCorrelationError, estimate_r12
from .data import (
    COUNT_FIELDS,
    InputError,
    ResponseCounts,
    counts_from_mapping,
    parse_detail_file,
    summarize,
)
from .metrics import METRICS, metrics_for, render_fraction, render_percent
from .randomization import (
    DEFAULT_TRIALS,
    EXACT_THRESHOLD,
    MAX_EXACT_THRESHOLD,
    build_plan,
    verify,
)
from .simulation import DEFAULT_TESTS, InadmissibleSpecError, SimSpec, power_study, rows_to_csv

EXIT_INPUT = 2
EXIT_COMBINATION = 3
EXIT_DEGENERATE = 4

TABLE_FIELDS = ("r1", "s1", "r2", "s2")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class LoadedInput:
    counts: ResponseCounts
    overlap_known: bool
    source: str


def _parse_inline(text: str) -> dict[str, int]:
    data = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise InputError(f"inline counts must be key=value pairs, got {part!r}")
        try:
            data[key.strip()] = int(value)
        except ValueError:
            raise InputError(f"count {key.strip()!r} is not an integer: {value!r}") from None
    return data


def _counts_from_table(data: dict) -> ResponseCounts:
    """Per-system R and S only; the overlap between systems is unknown."""
    missing = [k for k in TABLE_FIELDS if k not in data]
    extra = set(data) - set(TABLE_FIELDS)
    if missing or extra:
        raise InputError(f"table counts need exactly {', '.join(TABLE_FIELDS)}")
    return ResponseCounts(
        c_both=0, c_only1=data["r1"], c_only2=data["r2"], miss_both=None,
        s_both=0, s_only1=data["s1"], s_only2=data["s2"],
    )


def load_input(args) -> LoadedInput:
    if args.items:
        records = parse_detail_file(args.items)
        return LoadedInput(summarize(records), True, f"items:{args.items}")
    text = args.counts
    if text is None:
        raise InputError("provide --items FILE or --counts")
    source = "counts"
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid counts JSON: {exc}") from exc
    elif os.path.exists(text):
        source = f"counts:{text}"
        with open(text, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid counts JSON: {exc}") from exc
    else:
        data = _parse_inline(text)
    if not isinstance(data, dict):
        raise InputError("counts must be a JSON object")
    if set(data) & set(TABLE_FIELDS):
        return LoadedInput(_counts_from_table(data), False, source)
    return LoadedInput(counts_from_mapping(data), True, source)


def _metric_rows(counts: ResponseCounts) -> dict:
    out = {}
    for system in (1, 2):
        triple = metrics_for(counts, system)
        out[f"system{system}"] = {
            m: {"exact": render_fraction(triple.get(m)), "percent": render_percent(triple.get(m))}
            for m in METRICS
        }
    return out


def _base_report(args, loaded: LoadedInput) -> dict:
    counts = loaded.counts
    report = {
        "tool": "prfsig",
        "version": __version__,
        "invocation": "prfsig " + shlex.join(args.argv),
        "input": {"source": loaded.source, "overlap_known": loaded.overlap_known,
                  **counts.to_dict()},
        "metrics": _metric_rows(counts),
    }
    if loaded.overlap_known and counts.has_total:
        try:
            report["r12"] = estimate_r12(counts.paired_outcomes()).r12
        except (UndefinedCorrelationError, ValueError):
            report["r12"] = None
    return report


def _render_metrics_text(report: dict) -> list[str]:
    lines = [f"{'system':<8}{'recall':>22}{'precision':>22}{'f_score':>22}"]
    for system in (1, 2):
        row = report["metrics"][f"system{system}"]
        cells = [f"{row[m]['percent']} ({row[m]['exact']})" for m in METRICS]
        lines.append(f"{system:<8}" + "".join(f"{c:>22}" for c in cells))
    return lines


def _render_result_text(entry: dict) -> list[str]:
    lines = [f"method: {entry['method']}"]
    if "metric" in entry:
        lines.append(f"metric: {entry['metric']}")
    keys = ["statistic", "observed", "sidedness", "better", "nc", "nt", "p_value", "p_kind",
            "p_exact", "df_or_n", "distribution", "mode", "seed", "degenerate", "convention"]
    for key in keys:
        if key in entry and entry[key] not in (None, ""):
            lines.append(f"{key}: {entry[key]}")
    return lines


def cmd_metrics(args) -> int:
    loaded = load_input(args)
    report = _base_report(args, loaded)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(_render_metrics_text(report)))
    return 0


def cmd_test(args) -> int:
    loaded = load_input(args)
    method = resolve_method(args.method)
    metric = args.metric or ("precision" if method == "chi2_2x2" else "recall")
    sidedness = args.sided or default_sidedness(method)
    if args.verify and method != "randomization":
        raise InvalidCombinationError("--verify applies to randomization only")
    try:
        result = compare(
            loaded.counts, method, metric, sidedness,
            overlap_known=loaded.overlap_known, trials=args.trials, seed=args.seed,
            exact_threshold=args.exact_threshold, better=args.better, workers=args.workers,
        )
    except DegenerateStatisticError as exc:
        raise CliError(f"degenerate statistic: {exc}", EXIT_DEGENERATE) from exc

    report = _base_report(args, loaded)
    entry = result.to_dict()
    entry.setdefault("metric", metric)
    if isinstance(result, TestResult):
        entry["better"] = args.better or observed_better(loaded.counts, metric)
    warnings = []
    if entry.get("assumes_independence"):
        warnings.append(
            f"{method} assumes the two systems' results are independent; with positively "
            "correlated systems its p-value is too large"
        )
    report["results"] = [entry]
    if args.verify:
        plan = build_plan(loaded.counts, metric, sidedness, args.trials, args.seed,
                          better=args.better, exact_threshold=args.exact_threshold)
        report["verification"] = verify(plan, workers=args.workers).to_dict()
    report["warnings"] = warnings

    if args.json:
        print(json.dumps(report, indent=2))
        return 0
    out = _render_metrics_text(report) + [""] + _render_result_text(entry)
    if "verification" in report:
        v = report["verification"]
        out.append(f"verification: {v['message']}")
        if v["status"] == "checked":
            out.append(f"  rerun p_value: {v['second']['p_value']} (seed {v['second']['seed']}), "
                       f"|difference| {v['p_difference']:.3g}")
            if "sign_p" in v:
                out.append(f"  recall p (same shuffles): {v['recall']['p_value']}, "
                           f"sign test p: {v['sign_p']}, agrees: {v['sign_agrees']}")
    out += [f"warning: {w}" for w in warnings]
    print("\n".join(out))
    return 0


def cmd_simulate(args) -> int:
    rhos = [float(r) for r in args.rho.split(",")]
    tests = [t.strip() for t in args.tests.split(",")] if args.tests else list(DEFAULT_TESTS)
    tests = [resolve_method(t) if t in ALIASES else t for t in tests]
    if args.replicates < 1000:
        raise InputError("replicates must be at least 1000")
    rows = []
    for rho in rhos:
        try:
            spec = SimSpec(args.n_items, args.p1, args.p2, rho, args.replicates,
                           args.alpha, args.seed)
        except InadmissibleSpecError as exc:
            raise InputError(str(exc)) from exc
        try:
            rows += power_study(spec, tests, randomization_trials=args.randomization_trials)
        except ValueError as exc:
            raise InvalidCombinationError(str(exc)) from exc
    if args.json:
        print(json.dumps({
            "tool": "prfsig",
            "version": __version__,
            "invocation": "prfsig " + shlex.join(args.argv),
            "rows": [asdict(r) for r in rows],
        }, indent=2))
    else:
        rows_to_csv(rows, sys.stdout)
    return 0


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--items", metavar="FILE", help="tab-separated detail file")
    src.add_argument(
        "--counts",
        metavar="JSON|FILE|k=v,...",
        help="counts as a JSON object, a JSON file, or inline pairs using the fields "
             f"{', '.join(COUNT_FIELDS)} (or r1,s1,r2,s2 for a bare R/S table)",
    )
    p.add_argument("--json", action="store_true", help="emit a JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prfsig",
        description="Significance of recall, precision and F-score differences between two systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="recall, precision and F-score of both systems")
    _add_input(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("test", help="significance test of a metric difference")
    _add_input(p)
    p.add_argument("--method", required=True, choices=sorted(ALIASES))
    p.add_argument("--metric", choices=METRICS,
                   help="default: precision for chi2, recall otherwise")
    p.add_argument("--sided", choices=("one", "two"),
                   help="default: two for chi2, one otherwise")
    p.add_argument("--better", type=int, choices=(1, 2),
                   help="system expected to be better in one-sided tests (default: observed)")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-threshold", type=int, default=EXACT_THRESHOLD)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--verify", action="store_true",
                   help="rerun randomization with a second seed and cross-check with the sign test")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="rejection rates on simulated correlated systems")
    p.add_argument("--n-items", type=int, default=200)
    p.add_argument("--p1", type=float, default=0.6)
    p.add_argument("--p2", type=float, default=0.5)
    p.add_argument("--rho", default="0.5", help="one value or a comma-separated sweep")
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tests", help=f"comma-separated; default {','.join(DEFAULT_TESTS)}")
    p.add_argument("--randomization-trials", type=int, default=1000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    if not 0 <= getattr(args, "exact_threshold", 0) <= MAX_EXACT_THRESHOLD:
        print(f"prfsig: error: --exact-threshold must lie in [0, {MAX_EXACT_THRESHOLD}]", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"prfsig: error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidCombinationError as exc:
        print(f"prfsig: error: {exc}", file=sys.stderr)
        return EXIT_COMBINATION
    except DegenerateStatisticError as exc:
        print(f"prfsig: error: degenerate statistic: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, OSError, ValueError) as exc:
        print(f"prfsig: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
