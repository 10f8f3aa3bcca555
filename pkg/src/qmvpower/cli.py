"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 validation failure.
A ``--dataset`` value is a builtin name, a CSV path, or the stem of a CSV
file in the directory named by ``QMVPOWER_DATA_DIR``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import dataio, reproduce
from .core import EXACT, ROUNDINGS, GameError
from .dataio import DataError, Dataset
from .engine import BANZHAF_NORMALIZED, BANZHAF_RAW_SCORE, BANZHAF_VALUE, SHAPLEY_SHUBIK, power_index
from .scenario import (
    BP_ROUNDINGS, HALF_AWAY, BudgetModel, ExitScenario, ScenarioError, blocking_correction_delta,
    change_matrix, exit_support_summary, game_for,
)

DATA_DIR_ENV = "QMVPOWER_DATA_DIR"

INDEX_KINDS = {
    "ss": SHAPLEY_SHUBIK,
    "bz": BANZHAF_NORMALIZED,
    "bz-raw": BANZHAF_RAW_SCORE,
    "bz-value": BANZHAF_VALUE,
}

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VALIDATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_dataset(selector: str) -> Dataset:
    if selector in dataio.BUILTIN:
        return dataio.builtin_dataset(selector)
    path = Path(selector)
    if not path.exists() and os.environ.get(DATA_DIR_ENV):
        candidate = Path(os.environ[DATA_DIR_ENV]) / selector
        path = candidate if candidate.exists() else candidate.with_suffix(".csv")
    if not path.exists():
        raise DataError(f"no builtin dataset or file named {selector!r}")
    return dataio.load_dataset(path)


def _common(p: argparse.ArgumentParser, dataset: str = "eu28", index: bool = True) -> None:
    p.add_argument("--dataset", default=dataset, help=f"builtin name ({', '.join(dataio.BUILTIN)}) or CSV path")
    p.add_argument("--year", type=int, default=2015)
    if index:
        p.add_argument("--index", choices=sorted(INDEX_KINDS), default="ss")
    p.add_argument("--blocking-minority", action="store_true",
                   help="apply the rule that a blocking minority needs four members")
    p.add_argument("--format", choices=dataio.FORMATS, default="markdown")
    p.add_argument("--out", help="write to this file instead of stdout")


def _scenario_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget-model", choices=[m.value for m in BudgetModel],
                   default=BudgetModel.RENORMALIZED.value)
    p.add_argument("--population-rounding", choices=ROUNDINGS, default=EXACT,
                   help="how 65%% of the population becomes an integer quota")
    p.add_argument("--index-decimals", type=int,
                   help="round indices to this many decimals before forming ratios")
    p.add_argument("--bp-rounding", choices=BP_ROUNDINGS, default=HALF_AWAY)
    p.add_argument("--profile", choices=sorted(reproduce.PROFILES),
                   help="use the settings that reproduce a published table or figure")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmvpower", description="Exact voting power for Council games and exit scenarios.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="power index of one game")
    _common(p)
    p.add_argument("--quota", type=int, help="absolute quota replacing the dataset's rule")
    p.add_argument("--places", type=int, default=4)

    p = sub.add_parser("exit", help="one member leaves")
    _common(p)
    _scenario_opts(p)
    p.add_argument("--leaver", required=True)
    p.add_argument("--quota", type=int, help="absolute quota after the exit")
    p.add_argument("--places", type=int, default=4)

    p = sub.add_parser("matrix", help="every single-member exit, in basis points")
    _common(p)
    _scenario_opts(p)
    p.add_argument("--workers", type=int, help="compute games in this many processes")

    p = sub.add_parser("blockers", help="blocking-minority coalitions and index corrections")
    _common(p, index=False)

    p = sub.add_parser("summary", help="members gaining power per exit and whether they could pass a vote")
    _common(p, dataset="eu27_postbrexit")
    _scenario_opts(p)

    p = sub.add_parser("validate", help="oracle battery and golden-table comparison")
    p.add_argument("--dataset", help="replacement EU-28 dataset (CSV) to validate instead of the builtin")
    p.add_argument("--oracle-cases", type=int, default=200)

    p = sub.add_parser("reproduce", help="regenerate every published table and figure dataset")
    p.add_argument("--out", default="paper-tables")
    p.add_argument("--workers", type=int)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _scenario_settings(args, dataset: Dataset) -> dict:
    """Matrix/exit keyword settings, from a profile or from the flags."""
    if args.profile:
        prof = reproduce.PROFILES[args.profile]
        if args.dataset != prof.dataset:
            raise UsageError(f"profile {prof.name} is for dataset {prof.dataset}")
        return {
            "dataset": prof.data(),
            "year": prof.year,
            "baseline_rounding": prof.baseline_rounding,
            "exit_rounding": prof.exit_rounding,
            "index_decimals": prof.index_decimals,
            "bp_rounding": prof.bp_rounding,
            "index_kind": prof.index_kind,
        }
    return {
        "dataset": dataset,
        "year": args.year,
        "baseline_rounding": args.population_rounding,
        "exit_rounding": args.population_rounding,
        "index_decimals": args.index_decimals,
        "bp_rounding": args.bp_rounding,
        "index_kind": INDEX_KINDS[args.index],
    }


def cmd_compute(args) -> int:
    ds = resolve_dataset(args.dataset)
    game = game_for(ds, args.year, blocking_rule=args.blocking_minority, quota=args.quota)
    pv = power_index(game, INDEX_KINDS[args.index])
    names = {m.code: m.name for m in ds.members}
    _emit(dataio.emit_table(pv, args.format, places=args.places, names=names), args.out)
    return EXIT_OK


def cmd_exit(args) -> int:
    s = _scenario_settings(args, resolve_dataset(args.dataset))
    rounding = s["exit_rounding"]
    if not isinstance(rounding, str):
        rounding = rounding.get(args.leaver, EXACT)
    report = ExitScenario(
        s["dataset"], args.leaver, s["year"], s["index_kind"], BudgetModel(args.budget_model),
        args.blocking_minority, args.quota, s["baseline_rounding"], rounding, s["index_decimals"],
    ).run()
    _emit(dataio.emit_table(report, args.format, places=args.places), args.out)
    return EXIT_OK


def _matrix(args):
    s = _scenario_settings(args, resolve_dataset(args.dataset))
    matrix = change_matrix(
        s["dataset"], s["year"], s["index_kind"], args.budget_model, args.blocking_minority,
        baseline_rounding=s["baseline_rounding"], exit_rounding=s["exit_rounding"],
        index_decimals=s["index_decimals"], bp_rounding=s["bp_rounding"],
        workers=getattr(args, "workers", None),
    )
    return matrix, s


def cmd_matrix(args) -> int:
    matrix, _ = _matrix(args)
    _emit(dataio.emit_table(matrix, args.format), args.out)
    return EXIT_OK


def cmd_blockers(args) -> int:
    ds = resolve_dataset(args.dataset)
    analysis = blocking_correction_delta(ds, args.year)
    _emit(dataio.emit_table(analysis, args.format), args.out)
    return EXIT_OK


def cmd_summary(args) -> int:
    matrix, s = _matrix(args)
    summary = exit_support_summary(matrix, s["dataset"], s["year"])
    _emit(dataio.emit_table(summary, args.format), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    base = dataio.load_dataset(args.dataset) if args.dataset else None
    report = reproduce.validate(base, args.oracle_cases)
    print("\n".join(report.lines()))
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_reproduce(args) -> int:
    for path in reproduce.reproduce(args.out, workers=args.workers):
        print(path)
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "exit": cmd_exit,
    "matrix": cmd_matrix,
    "blockers": cmd_blockers,
    "summary": cmd_summary,
    "validate": cmd_validate,
    "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qmvpower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, GameError, ScenarioError, OSError) as exc:
        print(f"qmvpower: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
