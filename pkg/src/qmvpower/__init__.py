"""Exact voting-power indices for weighted and dual-quota Council games.

Typical use::

    from qmvpower import builtin_dataset, game_for, shapley_shubik
    game = game_for(builtin_dataset("eu28"), 2015)
    shapley_shubik(game)["MT"]
"""

from .core import (
    GameError, QuotaRule, VotingGame, is_blocking, is_proper, is_winning, lisbon_game,
    member_threshold, weight_threshold_met, weighted_game,
)
from .dataio import DataError, Dataset, MemberState, builtin_dataset, emit_table, load_dataset
from .engine import (
    DegenerateGame, EngineLimit, PowerVector, banzhaf, banzhaf_scores, banzhaf_value,
    brute_force_banzhaf, brute_force_shapley, pivot_counts, power_index, shapley_shubik,
)
from .scenario import (
    BudgetModel, ChangeMatrix, ExitScenario, adjusted_power, apply_exit,
    blocking_correction_delta, change_matrix, correction_ratio, exit_support_summary, game_for,
    minimal_blocking_shortfall, power_change,
)

__version__ = "0.1.0"
