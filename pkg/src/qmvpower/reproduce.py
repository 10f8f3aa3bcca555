"""Reproduction profiles, checked-in golden data and the validation battery.

The published tables were produced with a tool that takes integer quotas and
prints indices to six decimals. A :class:`Profile` records those settings for
one published table or figure, so the exact engine can be compared with the
printed numbers. Golden files live in ``qmvpower/golden``; ``errata.csv``
lists printed cells that cannot be reproduced from the embedded dataset, with
the discrepancy each one shows.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

from . import dataio
from .core import EXACT, NEAREST, QuotaRule, VotingGame, member_threshold
from .dataio import Dataset
from .engine import (
    BANZHAF_NORMALIZED, SHAPLEY_SHUBIK, banzhaf, brute_force_banzhaf, brute_force_shapley,
    shapley_shubik,
)
from .scenario import (
    TOWARD_ZERO, ChangeMatrix, ExitScenario, blocking_correction_delta, change_matrix,
    exit_support_summary, game_for,
)

BP_TOLERANCE = 1


@dataclass(frozen=True)
class Profile:
    """Settings that reproduce one published result.

    ``dataset`` is a builtin name; ``also_departed`` removes further members
    first (their contributions count as departed). ``leaver`` is ``None`` for
    a full change matrix.
    """

    name: str
    dataset: str
    leaver: str | None = None
    also_departed: tuple[str, ...] = ()
    year: int = 2015
    index_kind: str = SHAPLEY_SHUBIK
    baseline_rounding: str = EXACT
    exit_rounding: str | Mapping[str, str] = EXACT
    index_decimals: int | None = 6
    bp_rounding: str = TOWARD_ZERO
    golden: str = ""

    def data(self, base: Dataset | None = None) -> Dataset:
        ds = derived_dataset(self.dataset, base)
        return ds.without(self.also_departed) if self.also_departed else ds

    def exit_rounding_for(self, leaver: str) -> str:
        if isinstance(self.exit_rounding, str):
            return self.exit_rounding
        return self.exit_rounding.get(leaver, EXACT)

    def matrix(self, base: Dataset | None = None, workers: int | None = None) -> ChangeMatrix:
        return change_matrix(
            self.data(base), self.year, self.index_kind,
            baseline_rounding=self.baseline_rounding, exit_rounding=self.exit_rounding,
            index_decimals=self.index_decimals, bp_rounding=self.bp_rounding, workers=workers,
        )

    def scenario(self, base: Dataset | None = None) -> ExitScenario:
        return ExitScenario(
            self.data(base), self.leaver, self.year, self.index_kind,
            baseline_rounding=self.baseline_rounding,
            exit_rounding=self.exit_rounding_for(self.leaver),
            index_decimals=self.index_decimals,
        )


# The post-Brexit runs typed 2883 (65% of 4436 rounded to nearest) as the
# baseline quota, and the nearest integer for the Czech and Romanian exits too.
_POSTBREXIT_EXITS = {"CZ": NEAREST, "RO": NEAREST}

PROFILES = {
    p.name: p
    for p in (
        Profile("exit_matrix_eu28", "eu28", golden="exit_matrix_eu28.csv"),
        Profile("exit_matrix_eu27_postbrexit", "eu27_postbrexit", baseline_rounding=NEAREST,
                exit_rounding=_POSTBREXIT_EXITS, golden="exit_matrix_eu27_postbrexit.csv"),
        Profile("exit_matrix_eu27_precroatia", "eu27_precroatia", golden="exit_matrix_eu27_precroatia.csv"),
        Profile("czexit_2015", "eu27_postbrexit", "CZ", baseline_rounding=NEAREST,
                exit_rounding=_POSTBREXIT_EXITS),
        Profile("czexit_2030", "eu27_postbrexit", "CZ", year=2030),
        Profile("germany_exit_ss", "eu27_postbrexit", "DE", baseline_rounding=NEAREST),
        Profile("germany_exit_banzhaf", "eu27_postbrexit", "DE", index_kind=BANZHAF_NORMALIZED),
        Profile("czexit_after_germany", "eu27_postbrexit", "CZ", also_departed=("DE",)),
        Profile("brexit_precroatia", "eu27_precroatia", "UK"),
    )
}
MATRIX_PROFILES = ("exit_matrix_eu28", "exit_matrix_eu27_postbrexit", "exit_matrix_eu27_precroatia")
FIGURE_PROFILES = ("czexit_2015", "czexit_2030", "germany_exit_ss", "germany_exit_banzhaf",
                   "czexit_after_germany", "brexit_precroatia")
SUPPORT_PROFILE = "exit_matrix_eu27_postbrexit"


def derived_dataset(name: str, base: Dataset | None = None) -> Dataset:
    """A builtin dataset, optionally rebuilt from a replacement EU-28 ``base``."""
    if base is None:
        return dataio.builtin_dataset(name)
    derived = {"eu28": (), "eu27_postbrexit": ("UK",), "eu27_precroatia": ("HR",)}
    if name not in derived:
        raise dataio.DataError(f"{name!r} cannot be derived from a replacement dataset")
    return base.without(derived[name], name=name) if derived[name] else base


# -- golden data -------------------------------------------------------------------

def _golden_text(filename: str) -> str:
    return resources.files(__package__).joinpath("golden", filename).read_text(encoding="utf-8")


def _rows(filename: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(_golden_text(filename))))


def golden_matrix(filename: str) -> dict[str, dict[str, int]]:
    """``{leaver: {member: bp}}`` from a published matrix (survivor rows, leaver columns)."""
    reader = csv.reader(io.StringIO(_golden_text(filename)))
    leavers = next(reader)[1:]
    out: dict[str, dict[str, int]] = {c: {} for c in leavers}
    for row in reader:
        member, cells = row[0], row[1:]
        for leaver, cell in zip(leavers, cells):
            if cell:
                out[leaver][member] = int(cell)
    return out


def golden_figures() -> dict[str, dict[str, tuple[int, float]]]:
    """``{figure: {code: (population, percent)}}``."""
    out: dict[str, dict[str, tuple[int, float]]] = {}
    for r in _rows("figures.csv"):
        out.setdefault(r["figure"], {})[r["code"]] = (int(r["population"]), float(r["percent"]))
    return out


def golden_exit_support() -> list[tuple[int, Fraction, str]]:
    return [
        (int(r["count_increasing"]), Fraction(r["population_millions"]), r["label"])
        for r in _rows("exit_support.csv")
    ]


def golden_blocking(name: str) -> list[frozenset[str]]:
    return [frozenset(r.values()) for r in _rows(f"blocking_{name}.csv")]


@dataclass(frozen=True)
class Erratum:
    table: str
    leaver: str
    member: str
    reason: str

    def covers(self, table: str, leaver: str, member: str) -> bool:
        return self.table == table and self.leaver == leaver and self.member in ("*", member)


def errata() -> list[Erratum]:
    return [Erratum(r["table"], r["leaver"], r["member"], r["reason"]) for r in _rows("errata.csv")]


def is_erratum(table: str, leaver: str, member: str, known: list[Erratum] | None = None) -> bool:
    return any(e.covers(table, leaver, member) for e in (errata() if known is None else known))


# -- comparisons -------------------------------------------------------------------

@dataclass
class Mismatch:
    where: str
    expected: object
    got: object

    def __str__(self) -> str:
        return f"{self.where}: expected {self.expected}, got {self.got}"


def compare_matrix(matrix: ChangeMatrix, golden_file: str, skip_errata: bool = True,
                   tolerance: int = BP_TOLERANCE) -> list[Mismatch]:
    table = golden_file.removesuffix(".csv")
    known = errata() if skip_errata else []
    bad = []
    for leaver, col in golden_matrix(golden_file).items():
        for member, printed in col.items():
            if is_erratum(table, leaver, member, known):
                continue
            got = matrix.basis_points(leaver, member)
            if got is None or abs(got - printed) > tolerance:
                bad.append(Mismatch(f"{table} leaver {leaver} member {member}", printed, got))
    return bad


def compare_figure(profile: Profile, base: Dataset | None = None, skip_errata: bool = True,
                   tolerance: int = BP_TOLERANCE) -> list[Mismatch]:
    """Percent-of-old per point, within ``tolerance`` basis points."""
    if skip_errata and is_erratum("figures", profile.name, "*"):
        return []
    report = profile.scenario(base).run()
    bad = []
    for code, (_, percent) in golden_figures()[profile.name].items():
        got = report.changes[code].percent
        if abs(float(got) - percent) * 100 > tolerance:
            bad.append(Mismatch(f"figure {profile.name} point {code}", percent,
                                dataio.decimal_str(got, 4)))
    return bad


def compare_exit_support(base: Dataset | None = None) -> list[Mismatch]:
    profile = PROFILES[SUPPORT_PROFILE]
    summary = exit_support_summary(profile.matrix(base), profile.data(base))
    expected = sorted((c, p) for c, p, _ in golden_exit_support())
    got = sorted((r.count_increasing, r.population_increasing) for r in summary.rows)
    bad = [Mismatch("exit support point", e, g) for e, g in zip(expected, got) if e != g]
    labelled = {label: (c, p) for c, p, label in golden_exit_support() if label}
    for leaver, point in labelled.items():
        row = summary.row(leaver)
        if (row.count_increasing, row.population_increasing) != point:
            bad.append(Mismatch(f"exit support leaver {leaver}", point,
                                (row.count_increasing, row.population_increasing)))
    return bad


def compare_blocking(base: Dataset | None = None) -> list[Mismatch]:
    bad = []
    for name in ("eu28", "eu27_postbrexit"):
        analysis = blocking_correction_delta(derived_dataset(name, base))
        expected = set(golden_blocking(name))
        got = {frozenset(c) for c in analysis.coalitions}
        if got != expected:
            bad.append(Mismatch(f"blocking coalitions {name}", sorted(map(sorted, expected)),
                                sorted(map(sorted, got))))
        if sum(analysis.deltas.values()) != 0:
            bad.append(Mismatch(f"blocking deltas {name}", 0, sum(analysis.deltas.values())))
    return bad


def random_game(rng: random.Random, max_players: int = 12) -> VotingGame:
    """Random one- or two-rule game, optionally with the blocking-minority rule."""
    n = rng.randint(1, max_players)
    players = tuple(f"P{i}" for i in range(n))
    rules = []
    for dim in range(rng.randint(1, 2)):
        weights = [rng.randint(0, 12) for _ in range(n)]
        if sum(weights) == 0:
            weights[0] = 1
        if rng.random() < 0.5:
            rules.append(QuotaRule.relative(weights, Fraction(rng.randint(1, 100), 100), f"w{dim}"))
        else:
            rules.append(QuotaRule.absolute(weights, rng.randint(1, sum(weights)), f"w{dim}"))
    blocking = None
    if rng.random() < 0.5:
        rules.append(QuotaRule.relative([1] * n, Fraction(rng.randint(30, 100), 100), "members"))
        blocking = rng.choice([None, 2, 3, 4])
    return VotingGame(players, tuple(rules), blocking_minority_min=blocking)


def oracle_battery(cases: int = 200, seed: int = 0, max_players: int = 12) -> list[Mismatch]:
    rng = random.Random(seed)
    bad = []
    for case in range(cases):
        game = random_game(rng, max_players)
        if shapley_shubik(game).values != brute_force_shapley(game).values:
            bad.append(Mismatch(f"oracle case {case} shapley-shubik", "brute force", "engine"))
        try:
            same = banzhaf(game).values == brute_force_banzhaf(game).values
        except ValueError:
            continue
        if not same:
            bad.append(Mismatch(f"oracle case {case} banzhaf", "brute force", "engine"))
    return bad


def eec_tables() -> list[Mismatch]:
    eec = dataio.builtin_dataset("eec1958")
    game = game_for(eec)
    bad = []
    expected = {"FR": Fraction(7, 30), "BE": Fraction(3, 20), "LU": Fraction(0)}
    ss = shapley_shubik(game)
    for code, value in expected.items():
        if ss[code] != value:
            bad.append(Mismatch(f"EEC Shapley-Shubik {code}", value, ss[code]))
    if member_threshold(25, Fraction(55, 100)) != 14:
        bad.append(Mismatch("member threshold for 25", 14, member_threshold(25, Fraction(55, 100))))
    return bad


@dataclass
class ValidationReport:
    checks: list[tuple[str, list[Mismatch]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not bad for _, bad in self.checks)

    def lines(self) -> list[str]:
        out = []
        for name, bad in self.checks:
            out.append(f"{'PASS' if not bad else 'FAIL'} {name}"
                       + (f" ({len(bad)} mismatches; first: {bad[0]})" if bad else ""))
        return out


def validate(base: Dataset | None = None, oracle_cases: int = 200,
             progress: Callable[[str], None] | None = None) -> ValidationReport:
    """Oracle battery plus every golden comparison, skipping documented errata.

    ``base`` replaces the builtin EU-28 dataset (the other EU datasets are
    derived from it).
    """
    report = ValidationReport()

    def run(name: str, fn: Callable[[], list[Mismatch]]) -> None:
        if progress:
            progress(name)
        report.checks.append((name, fn()))

    run("oracle equivalence", lambda: oracle_battery(oracle_cases))
    run("EEC 1958 indices", eec_tables)
    for name in MATRIX_PROFILES:
        p = PROFILES[name]
        run(f"matrix {name}", lambda p=p: compare_matrix(p.matrix(base), p.golden))
    for name in FIGURE_PROFILES:
        run(f"figure {name}", lambda name=name: compare_figure(PROFILES[name], base))
    run("exit support summary", lambda: compare_exit_support(base))
    run("blocking-minority coalitions", lambda: compare_blocking(base))
    return report


# -- reproduce -------------------------------------------------------------------------

def _figure_csv(report, dataset: Dataset, year: int) -> str:
    pops = dataset.populations(year)
    rows = [
        [str(pops[p] * 100000), dataio.decimal_str(c.percent, 8), p]
        for p, c in sorted(report.changes.items())
    ]
    return dataio._render(["population", "percent", "label"], rows, "csv")


def reproduce(outdir: str | Path, workers: int | None = None,
              progress: Callable[[str], None] | None = None) -> list[Path]:
    """Regenerate every published table and figure dataset into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def write(name: str, text: str) -> None:
        if progress:
            progress(name)
        path = outdir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    eec = dataio.builtin_dataset("eec1958")
    game = game_for(eec)
    names = {m.code: m.name for m in eec.members}
    write("eec1958_shapley_shubik.md", dataio.emit_power_vector(shapley_shubik(game), "markdown", 2, names))
    write("eec1958_banzhaf.md", dataio.emit_power_vector(banzhaf(game), "markdown", 2, names))
    for leaver, quota, stem in (("LU", None, "eec1958_luxembourg_exit"), ("FR", 9, "eec1958_france_exit")):
        for kind, suffix in ((SHAPLEY_SHUBIK, "shapley_shubik"), (BANZHAF_NORMALIZED, "banzhaf")):
            report = ExitScenario(eec, leaver, index_kind=kind, quota=quota).run()
            write(f"{stem}_{suffix}.md", dataio.emit_exit_report(report, "markdown", 2))

    for name in MATRIX_PROFILES:
        matrix = PROFILES[name].matrix(workers=workers)
        write(f"{name}.csv", dataio.emit_matrix(matrix, "csv"))
        write(f"{name}.json", dataio.emit_matrix(matrix, "json"))
        if name == SUPPORT_PROFILE:
            summary = exit_support_summary(matrix, PROFILES[name].data())
            write("figure_exit_support.csv", dataio.emit_summary(summary, "csv"))

    for name in ("eu28", "eu27_postbrexit"):
        analysis = blocking_correction_delta(dataio.builtin_dataset(name))
        write(f"blocking_minority_{name}.md", dataio.emit_blocking(analysis, "markdown"))

    for name in FIGURE_PROFILES:
        p = PROFILES[name]
        write(f"figure_{name}.csv", _figure_csv(p.scenario().run(), p.data(), p.year))
    return written
