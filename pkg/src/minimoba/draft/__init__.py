"""Hero drafting: UCT search with learned evaluation, plus baselines."""

from .baselines import (MINIMAX_MAX_POOL, make_hwr_strategy, make_minimax_strategy,
                        make_random_strategy, minimax_value)
from .data import (duel, gen_draft_dataset, gen_match_dataset, hero_winrates,
                   random_disjoint_lineups, run_draft)
from .mcts import (MctsNode, make_mcts_strategy, mcts_pick, rollout_evaluator,
                   uct_score, value_net_evaluator)
from .models import (DraftValueNet, WinratePredictor, encode_draft, encode_lineup,
                     train_value_net, train_winrate_predictor)
from .state import (DraftState, alternating_order, fresh_draft, legal_picks,
                    snake_order)

__all__ = [
    "DraftState", "alternating_order", "snake_order", "fresh_draft",
    "legal_picks", "MctsNode", "uct_score", "mcts_pick", "make_mcts_strategy",
    "rollout_evaluator", "value_net_evaluator", "WinratePredictor",
    "DraftValueNet", "encode_lineup", "encode_draft",
    "train_winrate_predictor", "train_value_net", "make_random_strategy",
    "make_hwr_strategy", "make_minimax_strategy", "minimax_value",
    "MINIMAX_MAX_POOL", "gen_match_dataset", "hero_winrates",
    "gen_draft_dataset", "random_disjoint_lineups", "run_draft", "duel",
]
