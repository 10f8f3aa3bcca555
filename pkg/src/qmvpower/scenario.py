"""Exit scenarios: budget correction, adjusted indices and change matrices.

When a member leaves, its budget contribution disappears, so the survivors'
indices are scaled by a correction ratio before being compared with their
pre-exit values. Shares are fractions of the original budget (taken as 1).

Also here: the blocking-minority analysis (small coalitions that hold enough
population to block but have too few members) and the exit-support summary.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import EXACT, VotingGame, lisbon_game, member_threshold, weighted_game
from .dataio import DataError, Dataset
from .engine import BANZHAF_NORMALIZED, SHAPLEY_SHUBIK, PowerVector, power_index, shapley_shubik

HALF_AWAY = "half_away"
TOWARD_ZERO = "toward_zero"
BP_ROUNDINGS = (HALF_AWAY, TOWARD_ZERO)

MEMBER_QUOTA = Fraction(55, 100)
POPULATION_QUOTA = Fraction(65, 100)
BLOCKING_MINORITY_MIN = 4


class BudgetModel(str, enum.Enum):
    """How the budget lost with a leaver is measured.

    ``renormalized``: the leaver's share of the budget that remains after
    earlier departures, ``1 - s / (1 - departed)``.
    ``cumulative_from_original``: everything lost since the original union,
    ``1 - departed - s``.
    """

    RENORMALIZED = "renormalized"
    CUMULATIVE = "cumulative_from_original"


class ScenarioError(ValueError):
    pass


def correction_ratio(
    dataset: Dataset,
    leaver: str,
    model: BudgetModel | str = BudgetModel.RENORMALIZED,
    departed: Iterable[str] | None = None,
) -> Fraction:
    model = BudgetModel(model)
    if leaver not in dataset.codes:
        raise ScenarioError(f"{leaver!r} is not a member of {dataset.name}")
    share = dataset.share(leaver)
    codes = [m.code for m in dataset.departed] if departed is None else list(departed)
    gone = sum((dataset.share(c) for c in codes), Fraction(0))
    if model is BudgetModel.RENORMALIZED:
        return 1 - share / (1 - gone)
    return 1 - gone - share


def game_for(
    dataset: Dataset,
    year: int = 2015,
    codes: Iterable[str] | None = None,
    blocking_rule: bool = False,
    quota: int | None = None,
    population_rounding: str = EXACT,
    member_floor: int | None = None,
) -> VotingGame:
    """Council game over ``codes`` (default: all members).

    Datasets with an absolute quota (or an explicit ``quota``) give a single
    weighted rule; otherwise the Lisbon dual quota is used.
    """
    pops = dataset.populations(year, codes)
    if quota is not None or dataset.absolute_quota is not None:
        return weighted_game(pops, quota if quota is not None else dataset.absolute_quota)
    return lisbon_game(
        pops,
        MEMBER_QUOTA,
        POPULATION_QUOTA,
        blocking_minority_min=BLOCKING_MINORITY_MIN if blocking_rule else None,
        member_floor=member_floor,
        population_rounding=population_rounding,
    )


def apply_exit(dataset: Dataset, leaver: str, year: int = 2015, **rules) -> VotingGame:
    """Game over the survivors of ``leaver``'s exit, quotas recomputed.

    Keyword arguments go to :func:`game_for` (``quota`` replaces an absolute
    threshold, e.g. 9 for the EEC without France).
    """
    if leaver not in dataset.codes:
        raise ScenarioError(f"{leaver!r} is not a member of {dataset.name}")
    if len(dataset.codes) < 2:
        raise ScenarioError("cannot remove the only member")
    return game_for(dataset, year, [c for c in dataset.codes if c != leaver], **rules)


def adjusted_power(indices: PowerVector | Mapping[str, Fraction], ratio: Fraction) -> dict[str, Fraction]:
    if not 0 < ratio <= 1:
        raise ScenarioError(f"correction ratio {ratio} not in (0, 1]")
    return {p: v * ratio for p, v in indices.items()}


def to_basis_points(ratio: Fraction, rounding: str = HALF_AWAY) -> int:
    """``10000 * (ratio - 1)`` as an integer."""
    value = 10000 * (Fraction(ratio) - 1)
    sign = -1 if value < 0 else 1
    value = abs(value)
    if rounding == HALF_AWAY:
        return sign * math.floor(value + Fraction(1, 2))
    if rounding == TOWARD_ZERO:
        return sign * math.floor(value)
    raise ScenarioError(f"unknown basis-point rounding {rounding!r}")


def quantize(value: Fraction, decimals: int | None) -> Fraction:
    """Round half up to ``decimals`` places; ``None`` leaves the value exact."""
    if decimals is None:
        return value
    scale = 10**decimals
    return Fraction(math.floor(value * scale + Fraction(1, 2)), scale)


@dataclass(frozen=True)
class Change:
    """new adjusted / old; ``None`` ratio means the old index was 0."""

    ratio: Fraction | None

    @property
    def percent(self) -> Fraction | None:
        return None if self.ratio is None else 100 * self.ratio

    def basis_points(self, rounding: str = HALF_AWAY) -> int | None:
        return None if self.ratio is None else to_basis_points(self.ratio, rounding)


def power_change(
    old: Mapping[str, Fraction],
    new_adjusted: Mapping[str, Fraction],
    index_decimals: int | None = None,
) -> dict[str, Change]:
    """Per-survivor change; players whose old index is 0 get a ``None`` ratio."""
    missing = set(new_adjusted) - set(old)
    if missing:
        raise ScenarioError(f"no old index for {sorted(missing)}")
    out = {}
    for p, new in new_adjusted.items():
        before = quantize(old[p], index_decimals)
        out[p] = Change(None if before == 0 else new / before)
    return out


@dataclass(frozen=True)
class ExitReport:
    leaver: str
    old: PowerVector
    new: PowerVector
    ratio: Fraction
    adjusted: dict[str, Fraction]
    changes: dict[str, Change]


@dataclass(frozen=True)
class ExitScenario:
    dataset: Dataset
    leaver: str
    year: int = 2015
    index_kind: str = SHAPLEY_SHUBIK
    budget_model: BudgetModel = BudgetModel.RENORMALIZED
    blocking_rule: bool = False
    quota: int | None = None
    baseline_rounding: str = EXACT
    exit_rounding: str = EXACT
    index_decimals: int | None = None

    def __post_init__(self) -> None:
        if self.leaver not in self.dataset.codes:
            raise ScenarioError(f"{self.leaver!r} is not a member of {self.dataset.name}")
        if len(self.dataset.codes) < 2:
            raise ScenarioError("a scenario needs at least two members")

    def run(self) -> ExitReport:
        before = game_for(self.dataset, self.year, blocking_rule=self.blocking_rule,
                          population_rounding=self.baseline_rounding)
        after = apply_exit(self.dataset, self.leaver, self.year, blocking_rule=self.blocking_rule,
                           quota=self.quota, population_rounding=self.exit_rounding)
        old = power_index(before, self.index_kind)
        new = power_index(after, self.index_kind)
        ratio = correction_ratio(self.dataset, self.leaver, self.budget_model)
        scaled = {p: quantize(v, self.index_decimals) for p, v in new.items()}
        adjusted = adjusted_power(scaled, ratio)
        changes = power_change(old.values, adjusted, self.index_decimals)
        return ExitReport(self.leaver, old, new, ratio, adjusted, changes)


@dataclass(frozen=True)
class ChangeMatrix:
    """``ratios[leaver][member]`` = new adjusted index / old index.

    ``None`` marks a member whose old index was 0. The leaver's own cell is
    absent.
    """

    baseline: str
    members: tuple[str, ...]
    ratios: dict[str, dict[str, Fraction | None]]
    bp_rounding: str = HALF_AWAY
    old: PowerVector | None = field(default=None, compare=False)
    new: dict[str, PowerVector] = field(default_factory=dict, compare=False)
    correction: dict[str, Fraction] = field(default_factory=dict, compare=False)

    def basis_points(self, leaver: str, member: str) -> int | None:
        r = self.ratios[leaver][member]
        return None if r is None else to_basis_points(r, self.bp_rounding)

    def column(self, leaver: str) -> dict[str, int | None]:
        return {p: self.basis_points(leaver, p) for p in self.ratios[leaver]}

    def percent(self, leaver: str, member: str) -> Fraction | None:
        r = self.ratios[leaver][member]
        return None if r is None else 100 * r


def _index_job(args):
    game, kind = args
    return power_index(game, kind)


def change_matrix(
    dataset: Dataset,
    year: int = 2015,
    index_kind: str = SHAPLEY_SHUBIK,
    budget_model: BudgetModel | str = BudgetModel.RENORMALIZED,
    blocking_rule: bool = False,
    leavers: Sequence[str] | None = None,
    baseline_rounding: str = EXACT,
    exit_rounding: str | Mapping[str, str] = EXACT,
    index_decimals: int | None = None,
    bp_rounding: str = HALF_AWAY,
    workers: int | None = None,
) -> ChangeMatrix:
    """Every single-member exit from ``dataset`` against the unadjusted baseline.

    ``exit_rounding`` may map leaver codes to a population-threshold rounding
    (missing codes use :data:`~qmvpower.core.EXACT`). ``index_decimals``
    rounds indices before the ratios are formed, which is what results
    computed from printed index tables amount to.
    """
    if len(dataset.codes) < 3:
        raise ScenarioError("a change matrix needs at least three members")
    if bp_rounding not in BP_ROUNDINGS:
        raise ScenarioError(f"unknown basis-point rounding {bp_rounding!r}")
    leavers = list(dataset.codes if leavers is None else leavers)
    rounding_for = (
        (lambda code: exit_rounding.get(code, EXACT))
        if isinstance(exit_rounding, Mapping) else (lambda code: exit_rounding)
    )
    baseline = game_for(dataset, year, blocking_rule=blocking_rule, population_rounding=baseline_rounding)
    games = [
        apply_exit(dataset, leaver, year, blocking_rule=blocking_rule,
                   population_rounding=rounding_for(leaver))
        for leaver in leavers
    ]
    jobs = [(g, index_kind) for g in [baseline, *games]]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_index_job, jobs))
    else:
        results = [_index_job(j) for j in jobs]
    old, news = results[0], dict(zip(leavers, results[1:]))

    ratios: dict[str, dict[str, Fraction | None]] = {}
    correction = {}
    for leaver in leavers:
        r = correction_ratio(dataset, leaver, budget_model)
        correction[leaver] = r
        adjusted = adjusted_power({p: quantize(v, index_decimals) for p, v in news[leaver].items()}, r)
        ratios[leaver] = {
            p: c.ratio for p, c in power_change(old.values, adjusted, index_decimals).items()
        }
    return ChangeMatrix(dataset.name, dataset.codes, ratios, bp_rounding, old, news, correction)


# -- exit support ------------------------------------------------------------------

@dataclass(frozen=True)
class SupportRow:
    leaver: str
    count_increasing: int
    population_increasing: Fraction  # millions
    meets_member_quota: bool
    meets_population_quota: bool


@dataclass(frozen=True)
class SupportSummary:
    member_threshold: int
    population_threshold: Fraction  # millions
    rows: list[SupportRow]

    def row(self, leaver: str) -> SupportRow:
        for r in self.rows:
            if r.leaver == leaver:
                return r
        raise KeyError(leaver)


def exit_support_summary(matrix: ChangeMatrix, dataset: Dataset, year: int = 2015) -> SupportSummary:
    """Per exit, the members that gain power and whether they could pass a vote.

    A member gains when its basis-point change is positive. The thresholds
    are those of the matrix's baseline union.
    """
    pops = dataset.populations(year, matrix.members)
    total = sum(pops.values())
    m_line = member_threshold(len(matrix.members), MEMBER_QUOTA)
    rows = []
    for leaver in matrix.ratios:
        gainers = [p for p, bp in matrix.column(leaver).items() if bp is not None and bp > 0]
        weight = sum(pops[p] for p in gainers)
        rows.append(SupportRow(
            leaver=leaver,
            count_increasing=len(gainers),
            population_increasing=Fraction(weight, 10),
            meets_member_quota=len(gainers) >= m_line,
            meets_population_quota=weight >= POPULATION_QUOTA * total,
        ))
    return SupportSummary(m_line, POPULATION_QUOTA * total / 10, rows)


# -- blocking minority -----------------------------------------------------------------

def _population_rule(game: VotingGame) -> int:
    for k, rule in enumerate(game.rules):
        if not rule.counts_members:
            return k
    raise ScenarioError("game has no population quota")


def minimal_blocking_shortfall(game: VotingGame, max_size: int | None = None) -> list[tuple[str, ...]]:
    """Coalitions of at most ``max_size`` members whose complement misses the population quota.

    ``max_size`` defaults to one less than the blocking-minority minimum, so
    these are exactly the coalitions the blocking-minority rule stops from
    blocking.
    """
    k = _population_rule(game)
    if max_size is None:
        if game.blocking_minority_min is None:
            raise ScenarioError("game has no blocking-minority rule; pass max_size")
        max_size = game.blocking_minority_min - 1
    weights = game.rules[k].weights
    total = sum(weights)
    required = game.required[k]
    found = []
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(game.n), size):
            if total - sum(weights[i] for i in combo) < required:
                found.append(tuple(game.players[i] for i in combo))
    return found


@dataclass(frozen=True)
class BlockingAnalysis:
    coalitions: list[tuple[str, ...]]
    deltas: dict[str, Fraction]
    without_rule: PowerVector | None = field(default=None, compare=False)
    with_rule: PowerVector | None = field(default=None, compare=False)


def blocking_correction_delta(dataset: Dataset, year: int = 2015) -> BlockingAnalysis:
    """Exact Shapley-Shubik change caused by switching the blocking-minority rule on."""
    if dataset.absolute_quota is not None:
        return BlockingAnalysis([], {})
    game = game_for(dataset, year, blocking_rule=True)
    with_rule = shapley_shubik(game)
    without = shapley_shubik(game.with_blocking_rule(None))
    deltas = {p: with_rule[p] - without[p] for p in game.players}
    return BlockingAnalysis(minimal_blocking_shortfall(game), deltas, without, with_rule)
