"""Game model: players, quota rules and the winning/blocking predicates.

A :class:`VotingGame` is a conjunction of weighted quota rules, optionally
relaxed by the blocking-minority exception used by the Council of the EU
(an opposition smaller than ``blocking_minority_min`` members cannot block,
provided the member-count quota holds).

All comparisons are exact: every rule is reduced to an integer minimum
weight once, and coalitions are compared against it with integers.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np


# How a fractional quota becomes an integer minimum weight. EXACT is the
# meets-or-exceeds reading; FLOOR and NEAREST reproduce integer quotas typed
# into tools that only accept whole numbers.
EXACT = "exact"
FLOOR = "floor"
NEAREST = "nearest"
ROUNDINGS = (EXACT, FLOOR, NEAREST)


class GameError(ValueError):
    """Invalid game definition or coalition."""


def round_threshold(value: Fraction, rounding: str = EXACT) -> int:
    if rounding == EXACT:
        return math.ceil(value)
    if rounding == FLOOR:
        return math.floor(value)
    if rounding == NEAREST:
        return math.floor(value + Fraction(1, 2))
    raise GameError(f"unknown threshold rounding {rounding!r}")


def member_threshold(n: int, quota: Fraction, floor: int | None = None) -> int:
    """Smallest member count m with m >= quota * n, raised to ``floor`` if set."""
    quota = Fraction(quota)
    if n < 1:
        raise GameError(f"player count must be positive, got {n}")
    if not 0 < quota <= 1:
        raise GameError(f"quota must lie in (0, 1], got {quota}")
    m = math.ceil(quota * n)
    if floor is not None and floor > m:
        m = floor
    return m


def weight_threshold_met(total: int, quota: Fraction, coalition_weight: int) -> bool:
    quota = Fraction(quota)
    return coalition_weight * quota.denominator >= quota.numerator * total


@dataclass(frozen=True)
class QuotaRule:
    """One weighted quota: ``sum(weights[S]) >= threshold``.

    Use :meth:`relative` for a fraction of the total weight (Lisbon) or
    :meth:`absolute` for a fixed integer quota (EEC 1958).
    """

    weights: tuple[int, ...]
    fraction: Fraction | None = None
    minimum: int | None = None
    name: str = ""
    rounding: str = EXACT

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if any(w < 0 for w in self.weights):
            raise GameError(f"rule {self.name!r}: negative weight")
        if (self.fraction is None) == (self.minimum is None):
            raise GameError("a rule needs exactly one of fraction / minimum")
        if self.rounding not in ROUNDINGS:
            raise GameError(f"unknown threshold rounding {self.rounding!r}")
        if self.fraction is not None:
            object.__setattr__(self, "fraction", Fraction(self.fraction))
            if not 0 < self.fraction <= 1:
                raise GameError(f"rule {self.name!r}: fraction {self.fraction} not in (0, 1]")
        else:
            if not 1 <= self.minimum <= max(self.total, 1):
                raise GameError(
                    f"rule {self.name!r}: absolute threshold {self.minimum} "
                    f"not in [1, {self.total}]"
                )

    @classmethod
    def relative(
        cls, weights: Iterable[int], fraction: Fraction, name: str = "", rounding: str = EXACT
    ) -> QuotaRule:
        return cls(tuple(weights), fraction=Fraction(fraction), name=name, rounding=rounding)

    @classmethod
    def absolute(cls, weights: Iterable[int], minimum: int, name: str = "") -> QuotaRule:
        return cls(tuple(weights), minimum=int(minimum), name=name)

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def counts_members(self) -> bool:
        return all(w == 1 for w in self.weights)

    def required(self) -> int:
        """Minimum integer coalition weight satisfying the rule."""
        if self.minimum is not None:
            return self.minimum
        return round_threshold(self.fraction * self.total, self.rounding)

    def restricted(self, keep: Sequence[int]) -> QuotaRule:
        """Same rule over the players at positions ``keep``.

        Relative thresholds are re-evaluated on the survivors' total;
        absolute thresholds are kept as given.
        """
        weights = tuple(self.weights[i] for i in keep)
        return QuotaRule(weights, self.fraction, self.minimum, self.name, self.rounding)

    def with_rounding(self, rounding: str) -> QuotaRule:
        return QuotaRule(self.weights, self.fraction, self.minimum, self.name, rounding)


@dataclass(frozen=True)
class VotingGame:
    players: tuple[str, ...]
    rules: tuple[QuotaRule, ...]
    blocking_minority_min: int | None = None
    member_floor: int | None = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _required: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "rules", tuple(self.rules))
        n = len(self.players)
        if n < 1:
            raise GameError("a game needs at least one player")
        if len(set(self.players)) != n:
            raise GameError("duplicate player ids")
        if not self.rules:
            raise GameError("a game needs at least one quota rule")
        for rule in self.rules:
            if len(rule.weights) != n:
                raise GameError(
                    f"rule {rule.name!r} has {len(rule.weights)} weights for {n} players"
                )
        if self.blocking_minority_min is not None and not any(r.counts_members for r in self.rules):
            raise GameError("the blocking-minority rule needs a member-count quota")
        required = []
        for rule in self.rules:
            req = rule.required()
            if self.member_floor is not None and rule.counts_members:
                req = max(req, self.member_floor)
            required.append(req)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.players)})
        object.__setattr__(self, "_required", tuple(required))

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def required(self) -> tuple[int, ...]:
        """Per-rule minimum coalition weight (after the member floor)."""
        return self._required

    def index(self, player: str) -> int:
        try:
            return self._index[player]
        except KeyError:
            raise GameError(f"unknown player {player!r}") from None

    def weights_of(self, player: str) -> tuple[int, ...]:
        i = self.index(player)
        return tuple(rule.weights[i] for rule in self.rules)

    def mask(self, coalition: Iterable[str]) -> int:
        m = 0
        for p in coalition:
            m |= 1 << self.index(p)
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(p for i, p in enumerate(self.players) if mask >> i & 1)

    @property
    def grand_mask(self) -> int:
        return (1 << self.n) - 1

    def wins(self, size: int, weights: Sequence[int]) -> bool:
        """Verdict for a coalition described by its size and per-rule weights.

        Every rule is a function of these summaries alone, which is what
        lets the engine count coalitions by (size, weight) instead of
        enumerating them.
        """
        quotas = [w >= r for w, r in zip(weights, self._required)]
        if all(quotas):
            return True
        if self.blocking_minority_min is None:
            return False
        members_ok = all(q for q, rule in zip(quotas, self.rules) if rule.counts_members)
        return members_ok and self.n - size < self.blocking_minority_min

    def wins_array(self, sizes: np.ndarray, weights: Sequence[np.ndarray]) -> np.ndarray:
        """Vectorised :meth:`wins` over broadcastable integer arrays."""
        members_ok = all_ok = np.True_
        for rule, w, r in zip(self.rules, weights, self._required):
            ok = np.asarray(w) >= r
            all_ok = all_ok & ok
            if rule.counts_members:
                members_ok = members_ok & ok
        if self.blocking_minority_min is None:
            return np.broadcast_to(all_ok, np.broadcast(sizes, *weights).shape)
        return all_ok | (members_ok & (self.n - np.asarray(sizes) < self.blocking_minority_min))

    def wins_mask(self, mask: int) -> bool:
        size = bin(mask).count("1")
        weights = [
            sum(w for i, w in enumerate(rule.weights) if mask >> i & 1) for rule in self.rules
        ]
        return self.wins(size, weights)

    def fingerprint(self) -> str:
        payload = repr((
            self.players,
            tuple((r.weights, r.fraction, r.minimum, r.rounding) for r in self.rules),
            self.blocking_minority_min,
            self.member_floor,
        ))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def subgame(self, keep: Iterable[str]) -> VotingGame:
        """The game restricted to ``keep`` (relative quotas recomputed)."""
        keep = set(keep)
        positions = [i for i, p in enumerate(self.players) if p in keep]
        if len(positions) != len(keep):
            unknown = sorted(keep - set(self.players))
            raise GameError(f"unknown players {unknown}")
        return VotingGame(
            players=tuple(self.players[i] for i in positions),
            rules=tuple(r.restricted(positions) for r in self.rules),
            blocking_minority_min=self.blocking_minority_min,
            member_floor=self.member_floor,
        )

    def with_blocking_rule(self, minimum: int | None) -> VotingGame:
        return VotingGame(self.players, self.rules, minimum, self.member_floor)


def is_winning(game: VotingGame, coalition: Iterable[str]) -> bool:
    return game.wins_mask(game.mask(coalition))


def is_blocking(game: VotingGame, coalition: Iterable[str]) -> bool:
    """True iff the complement of ``coalition`` cannot win."""
    return not game.wins_mask(game.grand_mask & ~game.mask(coalition))


def lisbon_game(
    populations: Mapping[str, int],
    member_quota: Fraction = Fraction(55, 100),
    population_quota: Fraction = Fraction(65, 100),
    blocking_minority_min: int | None = 4,
    member_floor: int | None = None,
    population_rounding: str = EXACT,
) -> VotingGame:
    """Dual-quota Council game over ``populations`` (player id -> weight).

    The member threshold is always the exact ceiling; ``population_rounding``
    only affects the population quota.
    """
    players = tuple(populations)
    return VotingGame(
        players=players,
        rules=(
            QuotaRule.relative([1] * len(players), member_quota, name="members"),
            QuotaRule.relative(
                [populations[p] for p in players], population_quota,
                name="population", rounding=population_rounding,
            ),
        ),
        blocking_minority_min=blocking_minority_min,
        member_floor=member_floor,
    )


def weighted_game(weights: Mapping[str, int], quota: int | Fraction) -> VotingGame:
    """Single-rule weighted majority game; an ``int`` quota is absolute."""
    players = tuple(weights)
    w = [weights[p] for p in players]
    if isinstance(quota, int):
        rule = QuotaRule.absolute(w, quota, name="weight")
    else:
        rule = QuotaRule.relative(w, quota, name="weight")
    return VotingGame(players=players, rules=(rule,))


def is_proper(game: VotingGame) -> bool:
    """Whether no coalition and its complement are both winning (exhaustive)."""
    full = game.grand_mask
    for mask in range(1 << game.n):
        if game.wins_mask(mask) and game.wins_mask(full & ~mask):
            return False
    return True
