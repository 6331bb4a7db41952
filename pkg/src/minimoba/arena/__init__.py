from .elo import EloTable
from .ci import exact_ci, display_ci
from .bots import NeverActBot, RandomBot, ScriptedBot, PolicyPlayer
from .series import play_match, play_series

__all__ = [
    "EloTable", "exact_ci", "display_ci", "NeverActBot", "RandomBot",
    "ScriptedBot", "PolicyPlayer", "play_match", "play_series",
]
