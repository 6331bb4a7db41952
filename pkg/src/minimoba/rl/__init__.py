from .gae import gae
from .losses import (dual_clip_objective, entropy_masked, masked_log_softmax,
                     multi_head_value_loss, total_value)
from .adam import Adam
from .trajectory import Trajectory, TrajectoryBatch
from .learner import Learner, LearnerConfig

__all__ = [
    "gae", "dual_clip_objective", "entropy_masked", "masked_log_softmax",
    "multi_head_value_loss", "total_value",
    "Adam", "Trajectory", "TrajectoryBatch", "Learner", "LearnerConfig",
]
