from .actions import Action, ActionKind, head_relevance
from .engine import MobaEnv
from .observe import Observation, obs_sizes
from .replay import ReplayReader, ReplayWriter, replay_file, verify_replay

__all__ = [
    "Action", "ActionKind", "head_relevance", "MobaEnv", "Observation",
    "obs_sizes", "ReplayReader", "ReplayWriter", "replay_file", "verify_replay",
]
