import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qmvpower.core import (
    EXACT, FLOOR, NEAREST, GameError, QuotaRule, VotingGame, is_blocking, is_proper, is_winning,
    lisbon_game, member_threshold, round_threshold, weight_threshold_met, weighted_game,
)
from qmvpower.scenario import game_for

Q55 = Fraction(55, 100)
Q65 = Fraction(65, 100)


@pytest.mark.parametrize("n,expected", [(28, 16), (27, 15), (26, 15), (25, 14), (1, 1)])
def test_member_threshold(n, expected):
    assert member_threshold(n, Q55) == expected


def test_member_threshold_floor():
    assert member_threshold(25, Q55, floor=15) == 15
    assert member_threshold(28, Q55, floor=15) == 16


@pytest.mark.parametrize("n,q", [(0, Q55), (5, Fraction(0)), (5, Fraction(11, 10))])
def test_member_threshold_rejects(n, q):
    with pytest.raises(GameError):
        member_threshold(n, q)


@given(st.integers(1, 200), st.integers(1, 100))
def test_member_threshold_is_unique_bracket(n, pct):
    q = Fraction(pct, 100)
    m = member_threshold(n, q)
    assert Fraction(m - 1, n) < q <= Fraction(m, n)


def test_weight_threshold():
    assert weight_threshold_met(4436, Q65, 2884)
    assert not weight_threshold_met(4436, Q65, 2883)
    assert weight_threshold_met(4436, Q65, 4436)
    assert weight_threshold_met(100, Q65, 65)


def test_round_threshold():
    x = Fraction(28834, 10)
    assert round_threshold(x, EXACT) == 2884
    assert round_threshold(x, FLOOR) == 2883
    assert round_threshold(x, NEAREST) == 2883
    assert round_threshold(Fraction(5, 2), NEAREST) == 3
    assert round_threshold(Fraction(3), EXACT) == 3
    with pytest.raises(GameError):
        round_threshold(x, "up")


def test_quota_rule_validation():
    with pytest.raises(GameError):
        QuotaRule.relative([1, 2], Fraction(0))
    with pytest.raises(GameError):
        QuotaRule.absolute([1, 2], 4)
    with pytest.raises(GameError):
        QuotaRule.absolute([1, 2], 0)
    with pytest.raises(GameError):
        QuotaRule((1, -1), fraction=Fraction(1, 2))
    with pytest.raises(GameError):
        QuotaRule((1, 1))


def test_game_validation():
    rule = QuotaRule.relative([1, 1], Q55)
    with pytest.raises(GameError):
        VotingGame(("A", "A"), (rule,))
    with pytest.raises(GameError):
        VotingGame(("A",), (rule,))
    with pytest.raises(GameError):
        VotingGame((), ())


def test_eec_predicates(eec):
    game = game_for(eec)
    assert is_winning(game, ["FR", "DE", "IT"])
    assert not is_winning(game, ["BE", "NL", "LU"])
    assert not is_winning(game, ["FR", "DE", "LU"])
    with pytest.raises(GameError):
        is_winning(game, ["XX"])


def test_eu28_blocking_exception(eu28):
    game = game_for(eu28, blocking_rule=True)
    others = [c for c in eu28.codes if c not in ("DE", "FR", "UK")]
    assert is_winning(game, others)
    assert not is_winning(game.with_blocking_rule(None), others)
    assert not is_blocking(game, ["DE", "FR", "UK"])
    assert is_blocking(game, ["DE", "FR", "UK", "MT"])
    assert is_blocking(game, eu28.codes)


def test_empty_and_grand_coalition(eu28):
    game = game_for(eu28, blocking_rule=True)
    assert not is_winning(game, [])
    assert is_winning(game, eu28.codes)


def _random_lisbon(rng, n):
    pops = {f"P{i}": rng.randint(1, 900) for i in range(n)}
    return lisbon_game(pops, blocking_minority_min=rng.choice([None, 4]))


def test_monotone_on_random_chains():
    rng = random.Random(3)
    for _ in range(200):
        game = _random_lisbon(rng, rng.randint(1, 20))
        order = list(game.players)
        rng.shuffle(order)
        verdicts = [is_winning(game, order[:k]) for k in range(game.n + 1)]
        assert verdicts == sorted(verdicts)
        assert verdicts[-1] and not verdicts[0]


def test_blocking_rule_only_adds_winners():
    rng = random.Random(5)
    for _ in range(30):
        game = _random_lisbon(rng, rng.randint(1, 12)).with_blocking_rule(4)
        plain = game.with_blocking_rule(None)
        for mask in range(1 << game.n):
            if plain.wins_mask(mask):
                assert game.wins_mask(mask)


def test_blocking_rule_superset_sampled_eu28(eu28):
    game = game_for(eu28, blocking_rule=True)
    plain = game.with_blocking_rule(None)
    rng = random.Random(11)
    for _ in range(3000):
        mask = rng.getrandbits(game.n)
        if plain.wins_mask(mask):
            assert game.wins_mask(mask)


@settings(max_examples=100)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=10), st.integers(2, 50), st.data())
def test_common_scaling_invariance(pops, factor, data):
    base = {f"P{i}": p for i, p in enumerate(pops)}
    scaled = {k: v * factor for k, v in base.items()}
    g1, g2 = lisbon_game(base), lisbon_game(scaled)
    mask = data.draw(st.integers(0, (1 << len(pops)) - 1))
    assert g1.wins_mask(mask) == g2.wins_mask(mask)


def test_properness(eec, eu28):
    assert is_proper(game_for(eec))
    assert is_proper(lisbon_game({f"P{i}": i + 1 for i in range(10)}))
    assert not is_proper(weighted_game({"A": 1, "B": 1}, 1))


def test_subgame_recomputes_relative_quota():
    game = lisbon_game({"A": 10, "B": 20, "C": 30, "D": 40}, blocking_minority_min=None)
    sub = game.subgame(["A", "B", "C"])
    assert sub.required == (2, 39)
    with pytest.raises(GameError):
        game.subgame(["A", "Z"])


def test_zero_weight_dimension_always_satisfied():
    game = VotingGame(("A", "B"), (QuotaRule.relative([0, 0], Q65), QuotaRule.relative([1, 1], Q55)))
    assert game.required == (0, 2)
    assert is_winning(game, ["A", "B"])


def test_member_floor_applies_to_member_rule():
    pops = {f"P{i}": 10 for i in range(25)}
    assert lisbon_game(pops).required[0] == 14
    assert lisbon_game(pops, member_floor=15).required[0] == 15


def test_fingerprint_tracks_rounding():
    pops = {"A": 3, "B": 4, "C": 5}
    assert lisbon_game(pops).fingerprint() != lisbon_game(pops, population_rounding=FLOOR).fingerprint()
    assert lisbon_game(pops).fingerprint() == lisbon_game(dict(pops)).fingerprint()


def test_wins_matches_mask_enumeration():
    game = lisbon_game({"A": 5, "B": 3, "C": 2, "D": 1, "E": 1}, blocking_minority_min=3)
    for size in range(1, 6):
        for combo in itertools.combinations(game.players, size):
            w = sum(game.rules[1].weights[game.index(p)] for p in combo)
            assert game.wins(size, [size, w]) == is_winning(game, combo)


def test_blocking_rule_requires_member_quota():
    with pytest.raises(GameError):
        VotingGame(("A", "B"), (QuotaRule.relative([1, 2], Q65),), blocking_minority_min=4)
