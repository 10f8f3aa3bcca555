"""Exact Shapley-Shubik and Banzhaf indices.

The counting engine never enumerates orderings. For a fixed player ``i`` it
builds ``f[k][w]``, the number of coalitions of the other players with ``k``
members and weight ``w``, by adding players one at a time (a generating
function in two variables). Because every quota rule depends only on the
coalition's size and weight, the number of size-``k`` coalitions for which
``i`` is pivotal is a masked sum over that table.

The brute-force functions enumerate all subsets and exist to validate the
engine on small games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import GameError, VotingGame

SHAPLEY_SHUBIK = "shapley_shubik"
BANZHAF_NORMALIZED = "banzhaf_normalized"
BANZHAF_RAW_SCORE = "banzhaf_raw_score"
BANZHAF_VALUE = "banzhaf_value"
KINDS = (SHAPLEY_SHUBIK, BANZHAF_NORMALIZED, BANZHAF_RAW_SCORE, BANZHAF_VALUE)

BRUTE_FORCE_MAX_PLAYERS = 20
MAX_DP_DIMENSIONS = 2


class EngineLimit(GameError):
    """The game has too many non-trivial weight dimensions for the DP."""


class DegenerateGame(GameError):
    """No player is ever critical, so normalised Banzhaf is undefined."""


@dataclass(frozen=True)
class PowerVector:
    """Exact per-player index values, ordered like the game's players."""

    kind: str
    values: dict[str, Fraction]
    game_fingerprint: str

    def __getitem__(self, player: str) -> Fraction:
        return self.values[player]

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()

    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))


@dataclass(frozen=True)
class PivotCountTable:
    """``counts[k]``: size-k coalitions without ``player`` that it turns winning."""

    player: str
    counts: tuple[int, ...]

    @property
    def banzhaf_score(self) -> int:
        return sum(self.counts)


def _layout(game: VotingGame) -> tuple[list[tuple[int, ...]], list[tuple[str, int]]]:
    """Split the rules into size-proportional rules and real weight dimensions.

    Returns the distinct non-trivial weight vectors and, per rule, either
    ``("size", c)`` (rule weight = c * size) or ``("dim", d)``.
    """
    dims: list[tuple[int, ...]] = []
    plan: list[tuple[str, int]] = []
    for rule in game.rules:
        w = rule.weights
        if all(x == w[0] for x in w):
            plan.append(("size", w[0]))
            continue
        if w not in dims:
            dims.append(w)
        plan.append(("dim", dims.index(w)))
    return dims, plan


def _count_dtype(n: int) -> type:
    # every count is at most 2**(n-1)
    return np.int64 if n <= 62 else object


def _subset_table(dims: list[tuple[int, ...]], skip: int, n: int) -> np.ndarray:
    """Counts of subsets of players != ``skip`` by (size, weight per dimension)."""
    shape = (n,) + tuple(sum(d) - d[skip] + 1 for d in dims)
    f = np.zeros(shape, dtype=_count_dtype(n))
    f[(0,) * len(shape)] = 1
    size = 0
    for j in range(n):
        if j == skip:
            continue
        shift = tuple(d[j] for d in dims)
        src = (slice(0, size + 1),) + tuple(slice(0, s - t) for s, t in zip(shape[1:], shift))
        dst = (slice(1, size + 2),) + tuple(slice(t, s) for s, t in zip(shape[1:], shift))
        f[dst] = f[dst] + f[src]
        size += 1
    return f


def _win_grid(game: VotingGame, plan, grids, sizes) -> np.ndarray:
    weights = [
        sizes * c if kind == "size" else grids[c]
        for kind, c in plan
    ]
    return game.wins_array(sizes, weights)


def pivot_counts(game: VotingGame, player: str) -> PivotCountTable:
    i = game.index(player)
    n = game.n
    dims, plan = _layout(game)
    if len(dims) > MAX_DP_DIMENSIONS:
        raise EngineLimit(
            f"{len(dims)} non-trivial weight dimensions; use the brute-force functions"
        )
    f = _subset_table(dims, i, n)
    extents = f.shape[1:]
    sizes = np.arange(n).reshape((n,) + (1,) * len(dims))
    grids = [
        np.arange(e).reshape((1,) + tuple(e if a == b else 1 for b in range(len(dims))))
        for a, e in enumerate(extents)
    ]
    own = [d[i] for d in dims]
    without = _win_grid(game, plan, grids, sizes)
    with_i = _win_grid(game, plan, [g + o for g, o in zip(grids, own)], sizes + 1)
    pivotal = with_i & ~without
    axes = tuple(range(1, 1 + len(dims)))
    per_size = np.where(pivotal, f, 0).sum(axis=axes) if dims else np.where(pivotal, f, 0)
    return PivotCountTable(player, tuple(int(c) for c in np.ravel(per_size)))


def _shapley_weights(n: int) -> list[Fraction]:
    nf = math.factorial(n)
    return [Fraction(math.factorial(k) * math.factorial(n - k - 1), nf) for k in range(n)]


def _all_pivot_counts(game: VotingGame) -> dict[str, tuple[int, ...]]:
    try:
        return {p: pivot_counts(game, p).counts for p in game.players}
    except EngineLimit:
        if game.n > BRUTE_FORCE_MAX_PLAYERS:
            raise
        return _brute_force_counts(game)


def shapley_shubik(game: VotingGame) -> PowerVector:
    weights = _shapley_weights(game.n)
    counts = _all_pivot_counts(game)
    values = {
        p: sum((c * w for c, w in zip(counts[p], weights)), Fraction(0))
        for p in game.players
    }
    return PowerVector(SHAPLEY_SHUBIK, values, game.fingerprint())


def banzhaf_scores(game: VotingGame) -> PowerVector:
    counts = _all_pivot_counts(game)
    values = {p: Fraction(sum(counts[p])) for p in game.players}
    return PowerVector(BANZHAF_RAW_SCORE, values, game.fingerprint())


def _normalize(scores: PowerVector) -> PowerVector:
    total = scores.total()
    if total == 0:
        raise DegenerateGame("no player is critical in any coalition")
    values = {p: v / total for p, v in scores.items()}
    return PowerVector(BANZHAF_NORMALIZED, values, scores.game_fingerprint)


def banzhaf(game: VotingGame) -> PowerVector:
    return _normalize(banzhaf_scores(game))


def banzhaf_value(game: VotingGame) -> PowerVector:
    """Unnormalised Banzhaf value, score / 2**(n-1)."""
    scores = banzhaf_scores(game)
    scale = Fraction(1, 2 ** (game.n - 1))
    return PowerVector(BANZHAF_VALUE, {p: v * scale for p, v in scores.items()},
                       scores.game_fingerprint)


def power_index(game: VotingGame, kind: str) -> PowerVector:
    if kind == SHAPLEY_SHUBIK:
        return shapley_shubik(game)
    if kind == BANZHAF_NORMALIZED:
        return banzhaf(game)
    if kind == BANZHAF_RAW_SCORE:
        return banzhaf_scores(game)
    if kind == BANZHAF_VALUE:
        return banzhaf_value(game)
    raise ValueError(f"unknown index kind {kind!r}")


# -- brute force ---------------------------------------------------------------

def _all_subset_wins(game: VotingGame) -> np.ndarray:
    n = game.n
    if n > BRUTE_FORCE_MAX_PLAYERS:
        raise GameError(f"brute force is capped at {BRUTE_FORCE_MAX_PLAYERS} players, got {n}")
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros_like(masks)
    weights = [np.zeros_like(masks) for _ in game.rules]
    for j in range(n):
        bit = (masks >> j) & 1
        sizes += bit
        for w, rule in zip(weights, game.rules):
            w += bit * rule.weights[j]
    return np.asarray(game.wins_array(sizes, weights)), sizes


def _brute_force_counts(game: VotingGame) -> dict[str, tuple[int, ...]]:
    n = game.n
    win, sizes = _all_subset_wins(game)
    masks = np.arange(1 << n, dtype=np.int64)
    out = {}
    for i, p in enumerate(game.players):
        without = masks[(masks >> i) & 1 == 0]
        pivotal = win[without | (1 << i)] & ~win[without]
        counts = np.bincount(sizes[without][pivotal], minlength=n)[:n]
        out[p] = tuple(int(c) for c in counts)
    return out


def brute_force_shapley(game: VotingGame) -> PowerVector:
    """Explicit subset sum with factorial weights (validation oracle)."""
    counts = _brute_force_counts(game)
    weights = _shapley_weights(game.n)
    values = {
        p: sum((c * w for c, w in zip(counts[p], weights)), Fraction(0))
        for p in game.players
    }
    return PowerVector(SHAPLEY_SHUBIK, values, game.fingerprint())


def brute_force_banzhaf_scores(game: VotingGame) -> PowerVector:
    counts = _brute_force_counts(game)
    values = {p: Fraction(sum(counts[p])) for p in game.players}
    return PowerVector(BANZHAF_RAW_SCORE, values, game.fingerprint())


def brute_force_banzhaf(game: VotingGame) -> PowerVector:
    return _normalize(brute_force_banzhaf_scores(game))
