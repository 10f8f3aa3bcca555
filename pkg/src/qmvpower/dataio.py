"""Datasets in and result tables out.

CSV dataset schema (UTF-8, header required)::

    code,name,pop_2015,pop_2020,pop_2030,contribution_pct

Populations are positive integers in units of 100,000 persons and
``contribution_pct`` is a decimal percentage of the baseline budget.

Tables render to csv, json or markdown. JSON carries every exact value as
``{"num": ..., "den": ...}`` next to its decimal rendering, so emitted
matrices and vectors can be loaded back without loss.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from . import data
from .engine import PowerVector

log = logging.getLogger(__name__)

CSV_HEADER = ["code", "name", "pop_2015", "pop_2020", "pop_2030", "contribution_pct"]
FORMATS = ("csv", "json", "markdown")


class DataError(ValueError):
    """Malformed or invalid dataset."""


@dataclass(frozen=True)
class MemberState:
    code: str
    name: str
    population: dict[int, int]
    contribution_share: Fraction

    def __post_init__(self) -> None:
        if any(v <= 0 for v in self.population.values()):
            raise DataError(f"{self.code}: populations must be positive")
        if not 0 <= self.contribution_share < 1:
            raise DataError(f"{self.code}: contribution share {self.contribution_share} not in [0, 1)")


@dataclass(frozen=True)
class Dataset:
    """Members of a union plus the members that have already left it.

    ``departed`` keeps the contribution shares of states that left, which
    the budget correction needs. ``absolute_quota`` switches from the
    Lisbon dual quota to a single weighted rule (EEC 1958), in which case
    ``population`` holds the vote weights.
    """

    name: str
    members: tuple[MemberState, ...]
    years: tuple[int, ...] = data.YEARS
    provenance: str = ""
    departed: tuple[MemberState, ...] = ()
    absolute_quota: int | None = None
    _by_code: dict[str, MemberState] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        codes = [m.code for m in self.members] + [m.code for m in self.departed]
        seen = set()
        for c in codes:
            if c in seen:
                raise DataError(f"duplicate code {c!r}")
            seen.add(c)
        for m in self.members:
            missing = [y for y in self.years if y not in m.population]
            if missing:
                raise DataError(f"{m.code}: missing population for {missing}")
        total = sum((m.contribution_share for m in self.members + self.departed), Fraction(0))
        if total > 1:
            raise DataError(f"{self.name}: contribution shares sum to {float(total):.4f} > 1")
        object.__setattr__(self, "_by_code", {m.code: m for m in self.members + self.departed})

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(m.code for m in self.members)

    def member(self, code: str) -> MemberState:
        try:
            return self._by_code[code]
        except KeyError:
            raise DataError(f"{self.name}: unknown member {code!r}") from None

    def populations(self, year: int, codes: Iterable[str] | None = None) -> dict[str, int]:
        if year not in self.years:
            raise DataError(f"{self.name}: no population data for {year}")
        codes = self.codes if codes is None else codes
        return {c: self.member(c).population[year] for c in codes}

    def share(self, code: str) -> Fraction:
        return self.member(code).contribution_share

    def without(self, codes: Iterable[str], name: str | None = None) -> Dataset:
        """Dataset after ``codes`` left; their shares move to ``departed``."""
        codes = list(codes)
        leaving = tuple(self.member(c) for c in codes)
        if any(m in self.departed for m in leaving):
            raise DataError(f"{self.name}: {codes} already departed")
        return Dataset(
            name=name or f"{self.name}-{'-'.join(codes)}",
            members=tuple(m for m in self.members if m.code not in codes),
            years=self.years,
            provenance=self.provenance,
            departed=self.departed + leaving,
            absolute_quota=self.absolute_quota,
        )


def _eu28() -> Dataset:
    members = tuple(
        MemberState(code, name, dict(zip(data.YEARS, pops)), data.percent(pct))
        for name, code, *pops, pct in data.EU28_ROWS
    )
    return Dataset("eu28", members, provenance="population in 100,000s (Eurostat "
                   "EUROPOP2013 projections) and budget contribution shares")


def _eec1958() -> Dataset:
    members = tuple(
        MemberState(code, name, {y: weight for y in data.YEARS}, data.percent(pct))
        for name, code, weight, pct in data.EEC1958_ROWS
    )
    return Dataset("eec1958", members, provenance="Council of Ministers 1958 vote weights",
                   absolute_quota=data.EEC1958_QUOTA)


BUILTIN = ("eu28", "eu27_postbrexit", "eu27_precroatia", "eec1958")


def builtin_dataset(name: str) -> Dataset:
    if name == "eu28":
        return _eu28()
    if name == "eu27_postbrexit":
        return _eu28().without(["UK"], name="eu27_postbrexit")
    if name == "eu27_precroatia":
        return _eu28().without(["HR"], name="eu27_precroatia")
    if name == "eec1958":
        return _eec1958()
    raise DataError(f"unknown dataset {name!r}; choose from {', '.join(BUILTIN)}")


def _parse_int(text: str, lineno: int, column: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise DataError(f"line {lineno}, column {column}: expected an integer, got {text!r}") from None


def load_dataset(path: str | Path, name: str | None = None) -> Dataset:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        return read_dataset(fh, name or path.stem)


def read_dataset(stream: io.TextIOBase, name: str = "dataset") -> Dataset:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise DataError("line 1: empty file")
    if [h.strip() for h in header] != CSV_HEADER:
        raise DataError(f"line 1: header must be {','.join(CSV_HEADER)}")
    members = []
    seen: dict[str, int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise DataError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        code, label = row[0].strip(), row[1].strip()
        if not code:
            raise DataError(f"line {lineno}, column code: missing value")
        if code in seen:
            raise DataError(f"line {lineno}: duplicate code {code!r} (first on line {seen[code]})")
        seen[code] = lineno
        pops = {}
        for year, col in zip(data.YEARS, CSV_HEADER[2:5]):
            value = _parse_int(row[CSV_HEADER.index(col)], lineno, col)
            if value <= 0:
                raise DataError(f"line {lineno}, column {col}: population must be positive, got {value}")
            pops[year] = value
        try:
            share = Fraction(row[5].strip()) / 100
        except ValueError:
            raise DataError(f"line {lineno}, column contribution_pct: bad number {row[5]!r}") from None
        try:
            members.append(MemberState(code, label, pops, share))
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
    dataset = Dataset(name, tuple(members), provenance=f"loaded from {name}")
    total = sum(m.contribution_share for m in members)
    if abs(total - 1) > Fraction(5, 1000):
        log.warning("%s: contribution shares sum to %.4f, not 1", name, float(total))
    return dataset


def dataset_to_csv(dataset: Dataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in dataset.members:
        pct = m.contribution_share * 100
        writer.writerow([m.code, m.name, *(m.population[y] for y in data.YEARS), _plain(pct)])
    return out.getvalue()


# -- rendering -------------------------------------------------------------------

def _plain(value: Fraction) -> str:
    """Shortest exact decimal for a terminating fraction, else 12 places."""
    d = Decimal(value.numerator) / Decimal(value.denominator)
    if Fraction(d) == value:
        return format(d.normalize(), "f")
    return decimal_str(value, 12)


def decimal_str(value: Fraction, places: int) -> str:
    """Locale-independent decimal rendering, rounding half away from zero."""
    scaled = Fraction(value) * 10**places
    n = abs(scaled)
    whole = n.numerator // n.denominator
    if (n - whole) * 2 >= 1:
        whole += 1
    sign = "-" if scaled < 0 and whole else ""
    digits = str(whole).rjust(places + 1, "0")
    if not places:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def exact(value: Fraction | None, places: int) -> dict[str, Any] | None:
    if value is None:
        return None
    return {"num": value.numerator, "den": value.denominator, "decimal": decimal_str(value, places)}


def _from_exact(obj: dict[str, Any] | None) -> Fraction | None:
    return None if obj is None else Fraction(obj["num"], obj["den"])


def _render(columns: list[str], rows: list[list[str]], fmt: str, title: str = "") -> str:
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return out.getvalue()
    if fmt == "markdown":
        lines = [f"**{title}**", ""] if title else []
        lines.append("| " + " | ".join(columns) + " |")
        lines.append("|" + "|".join("---" for _ in columns) + "|")
        lines += ["| " + " | ".join(r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def emit_power_vector(pv: PowerVector, fmt: str = "markdown", places: int = 4,
                      names: dict[str, str] | None = None) -> str:
    """Index values as percentages with ``places`` decimals (raw scores as integers)."""
    raw = pv.kind == "banzhaf_raw_score"
    if fmt == "json":
        return _dump({
            "kind": pv.kind,
            "game": pv.game_fingerprint,
            "values": {p: exact(v, places + 2) for p, v in pv.items()},
        })
    names = names or {}
    header = "score" if raw else f"{pv.kind} (%)"
    rows = [
        [p, names.get(p, p), str(v.numerator) if raw else decimal_str(100 * v, places)]
        for p, v in pv.items()
    ]
    return _render(["code", "name", header], rows, fmt, title=pv.kind)


def load_power_vector(text: str) -> PowerVector:
    obj = json.loads(text)
    return PowerVector(obj["kind"], {p: _from_exact(v) for p, v in obj["values"].items()}, obj["game"])


def emit_matrix(matrix, fmt: str = "markdown") -> str:
    """Leaver columns x survivor rows in basis points; empty diagonal."""
    codes = list(matrix.members)
    if fmt == "json":
        return _dump({
            "baseline": matrix.baseline,
            "members": codes,
            "bp_rounding": matrix.bp_rounding,
            "ratios": {
                leaver: {p: exact(r, 8) for p, r in col.items()}
                for leaver, col in matrix.ratios.items()
            },
        })
    rows = []
    for p in codes:
        row = [p]
        for leaver in codes:
            if leaver == p:
                row.append("")
                continue
            bp = matrix.basis_points(leaver, p)
            row.append("n/a" if bp is None else f"{bp:+d}" if fmt == "markdown" else str(bp))
        rows.append(row)
    return _render([""] + codes, rows, fmt, title=matrix.baseline)


def load_matrix(text: str):
    from .scenario import ChangeMatrix

    obj = json.loads(text)
    ratios = {
        leaver: {p: _from_exact(v) for p, v in col.items()}
        for leaver, col in obj["ratios"].items()
    }
    return ChangeMatrix(obj["baseline"], tuple(obj["members"]), ratios, obj["bp_rounding"])


def emit_blocking(analysis, fmt: str = "markdown", places: int = 6) -> str:
    if fmt == "json":
        return _dump({
            "coalitions": [list(c) for c in analysis.coalitions],
            "deltas": {p: exact(d, places) for p, d in analysis.deltas.items()},
        })
    rows = [[str(i), " ".join(c)] for i, c in enumerate(analysis.coalitions, start=1)]
    text = _render(["#", "coalition"], rows, fmt, title="coalitions that reach the "
                   "blocking population but have too few members")
    if analysis.deltas and fmt == "markdown":
        drows = [[p, f"{d.numerator}/{d.denominator}" if d else "0",
                  decimal_str(d, places)] for p, d in analysis.deltas.items()]
        text += "\n" + _render(["code", "delta (exact)", "delta"], drows, fmt,
                               title="Shapley-Shubik change from the blocking-minority rule")
    return text


def emit_summary(summary, fmt: str = "markdown") -> str:
    if fmt == "json":
        return _dump({
            "member_threshold": summary.member_threshold,
            "population_threshold_millions": exact(summary.population_threshold, 2),
            "rows": [
                {
                    "leaver": r.leaver,
                    "count_increasing": r.count_increasing,
                    "population_increasing_millions": exact(r.population_increasing, 1),
                    "meets_member_quota": r.meets_member_quota,
                    "meets_population_quota": r.meets_population_quota,
                }
                for r in summary.rows
            ],
        })
    rows = [
        [r.leaver, str(r.count_increasing), decimal_str(r.population_increasing, 1),
         _yes(r.meets_member_quota), _yes(r.meets_population_quota)]
        for r in summary.rows
    ]
    title = (f"member line {summary.member_threshold}, population line "
             f"{decimal_str(summary.population_threshold, 2)} million")
    return _render(["leaver", "count_increasing", "population_millions",
                    "meets_member_quota", "meets_population_quota"], rows, fmt, title=title)


def emit_exit_report(report, fmt: str = "markdown", places: int = 4) -> str:
    """Old, new and adjusted index per survivor, with percent-of-old and basis points."""
    if fmt == "json":
        return _dump({
            "leaver": report.leaver,
            "kind": report.old.kind,
            "ratio": exact(report.ratio, 6),
            "members": {
                p: {
                    "old": exact(report.old[p], places + 2),
                    "new": exact(report.new[p], places + 2),
                    "adjusted": exact(report.adjusted[p], places + 2),
                    "percent_of_old": exact(c.percent, 4),
                    "basis_points": c.basis_points(),
                }
                for p, c in report.changes.items()
            },
        })
    rows = []
    for p, c in report.changes.items():
        bp = c.basis_points()
        rows.append([
            p,
            decimal_str(100 * report.old[p], places),
            decimal_str(100 * report.new[p], places),
            decimal_str(100 * report.adjusted[p], places),
            "n/a" if c.ratio is None else decimal_str(c.percent, 4),
            "n/a" if bp is None else str(bp),
        ])
    title = f"{report.leaver} leaves ({report.old.kind}), correction ratio {decimal_str(report.ratio, 6)}"
    return _render(["code", "old (%)", "new (%)", "adjusted (%)", "percent_of_old", "bp"],
                   rows, fmt, title=title)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def emit_table(result, fmt: str = "markdown", **kwargs) -> str:
    """Render any analysis result (dispatch on its type)."""
    from .scenario import BlockingAnalysis, ChangeMatrix, ExitReport, SupportSummary

    if isinstance(result, PowerVector):
        return emit_power_vector(result, fmt, **kwargs)
    if isinstance(result, ChangeMatrix):
        return emit_matrix(result, fmt)
    if isinstance(result, BlockingAnalysis):
        return emit_blocking(result, fmt, **kwargs)
    if isinstance(result, ExitReport):
        return emit_exit_report(result, fmt, **kwargs)
    if isinstance(result, SupportSummary):
        return emit_summary(result, fmt)
    raise TypeError(f"cannot render {type(result).__name__}")
