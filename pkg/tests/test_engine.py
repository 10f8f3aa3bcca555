import math
import random
import time
from fractions import Fraction

import pytest

from qmvpower.core import GameError, QuotaRule, VotingGame, lisbon_game, weighted_game
from qmvpower.engine import (
    BANZHAF_VALUE, DegenerateGame, EngineLimit, banzhaf, banzhaf_scores, banzhaf_value,
    brute_force_banzhaf, brute_force_banzhaf_scores, brute_force_shapley, pivot_counts,
    power_index, shapley_shubik,
)
from qmvpower.reproduce import random_game
from qmvpower.scenario import game_for

ORACLE_CASES = 520


def _games(seed, count, max_players=12):
    rng = random.Random(seed)
    return [random_game(rng, max_players) for _ in range(count)]


def test_oracle_equivalence_random_games():
    for game in _games(1, ORACLE_CASES):
        assert shapley_shubik(game).values == brute_force_shapley(game).values
        assert banzhaf_scores(game).values == brute_force_banzhaf_scores(game).values


def test_efficiency_random_games():
    for game in _games(2, 500, 14):
        assert shapley_shubik(game).total() == 1


def test_banzhaf_normalized_sums_to_one():
    for game in _games(3, 100):
        try:
            assert banzhaf(game).total() == 1
        except DegenerateGame:
            assert all(v == 0 for v in banzhaf_scores(game).values.values())


def test_eec_golden(eec):
    game = game_for(eec)
    ss = shapley_shubik(game)
    bz = banzhaf(game)
    assert [ss[c] for c in ("FR", "DE", "IT", "BE", "NL", "LU")] == [Fraction(7, 30)] * 3 + [Fraction(3, 20)] * 2 + [0]
    assert [bz[c] for c in ("FR", "DE", "IT", "BE", "NL", "LU")] == [Fraction(5, 21)] * 3 + [Fraction(1, 7)] * 2 + [0]
    assert pivot_counts(game, "LU").counts == (0,) * 6
    assert brute_force_shapley(game).values == ss.values
    assert brute_force_banzhaf(game).values == bz.values


def test_eec_without_france(eec):
    game = game_for(eec, codes=["DE", "IT", "BE", "NL", "LU"], quota=9)
    ss, bz = shapley_shubik(game), banzhaf(game)
    assert ss["DE"] == Fraction(3, 10) and ss["LU"] == Fraction(2, 15)
    assert round(float(bz["DE"]) * 100, 2) == 30.43
    assert round(float(bz["LU"]) * 100, 2) == 13.04


def test_dictator_and_single_player():
    game = weighted_game({"A": 5, "B": 1, "C": 1}, 5)
    assert shapley_shubik(game).values == {"A": 1, "B": 0, "C": 0}
    assert banzhaf(game)["A"] == 1
    assert banzhaf_scores(game)["A"] == 4
    solo = weighted_game({"A": 1}, 1)
    assert pivot_counts(solo, "A").counts == (1,)
    assert shapley_shubik(solo)["A"] == 1


def test_symmetric_majority():
    game = weighted_game({"A": 1, "B": 1, "C": 1}, 2)
    assert set(shapley_shubik(game).values.values()) == {Fraction(1, 3)}
    assert set(banzhaf(game).values.values()) == {Fraction(1, 3)}


def test_symmetry_axiom():
    for game in _games(4, 150, 10):
        ss, bz = shapley_shubik(game), banzhaf_scores(game)
        for i, p in enumerate(game.players):
            for q in game.players[i + 1:]:
                if game.weights_of(p) == game.weights_of(q):
                    assert ss[p] == ss[q] and bz[p] == bz[q]


def test_null_player_axiom():
    game = VotingGame(
        ("A", "B", "C", "N"),
        (QuotaRule.absolute([3, 2, 2, 0], 5),),
    )
    assert shapley_shubik(game)["N"] == 0
    assert banzhaf_scores(game)["N"] == 0
    assert brute_force_shapley(game)["N"] == 0


def test_permutation_determinism():
    rng = random.Random(7)
    for game in _games(5, 60, 10):
        order = list(range(game.n))
        rng.shuffle(order)
        permuted = VotingGame(
            tuple(game.players[i] for i in order),
            tuple(QuotaRule(tuple(r.weights[i] for i in order), r.fraction, r.minimum, r.name, r.rounding)
                  for r in game.rules),
            game.blocking_minority_min,
        )
        assert shapley_shubik(permuted).values == shapley_shubik(game).values
        assert banzhaf_scores(permuted).values == banzhaf_scores(game).values


def test_pivot_count_bounds(eu28):
    game = game_for(eu28)
    n = game.n
    for p in ("DE", "MT"):
        table = pivot_counts(game, p)
        assert len(table.counts) == n
        assert all(0 <= c <= math.comb(n - 1, k) for k, c in enumerate(table.counts))
    assert banzhaf_scores(game)["DE"] == pivot_counts(game, "DE").banzhaf_score


def test_eu28_malta(eu28):
    ss = shapley_shubik(game_for(eu28))
    assert ss.total() == 1
    assert f"{float(ss['MT']):.4g}" == "0.008487"


def test_twelve_player_truncation_matches_brute_force(eu28):
    pops = eu28.populations(2015, eu28.codes[:12])
    game = lisbon_game(pops, blocking_minority_min=4)
    assert shapley_shubik(game).values == brute_force_shapley(game).values
    assert banzhaf_scores(game).values == brute_force_banzhaf_scores(game).values


def test_three_dimensions_fall_back_to_brute_force():
    rules = tuple(QuotaRule.relative(w, Fraction(1, 2)) for w in ([1, 2, 3, 4], [4, 3, 2, 1], [2, 2, 1, 3]))
    game = VotingGame(("A", "B", "C", "D"), rules)
    with pytest.raises(EngineLimit):
        pivot_counts(game, "A")
    assert shapley_shubik(game).values == brute_force_shapley(game).values


def test_brute_force_cap():
    game = lisbon_game({f"P{i}": 1 for i in range(21)})
    with pytest.raises(GameError):
        brute_force_shapley(game)


def test_degenerate_banzhaf():
    game = VotingGame(("A", "B"), (QuotaRule.relative([0, 0], Fraction(1, 2)),))
    with pytest.raises(DegenerateGame):
        banzhaf(game)


def test_banzhaf_value_and_kind_dispatch(eec):
    game = game_for(eec)
    assert banzhaf_value(game)["FR"] == Fraction(5, 16)
    assert power_index(game, BANZHAF_VALUE).values == banzhaf_value(game).values
    with pytest.raises(ValueError):
        power_index(game, "johnston")


def test_unknown_player(eec):
    with pytest.raises(GameError):
        pivot_counts(game_for(eec), "XX")


def test_eec_runtime(eec):
    game = game_for(eec)
    shapley_shubik(game)
    start = time.perf_counter()
    for _ in range(20):
        shapley_shubik(game)
    assert (time.perf_counter() - start) / 20 < 0.01
