from .cspl import CsplPlan, random_lineup_factory, run_baseline, run_cspl
from .evaluate import (estimate_winrate, make_table_estimator,
                       policy_elo_profile, policy_elo_vs_scripted)
from .grouping import LineupGroup, elo_converged, group_heroes

__all__ = [
    "CsplPlan",
    "LineupGroup",
    "elo_converged",
    "estimate_winrate",
    "group_heroes",
    "make_table_estimator",
    "policy_elo_vs_scripted",
    "random_lineup_factory",
    "run_baseline",
    "run_cspl",
]
