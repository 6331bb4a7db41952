"""Student-driven multi-teacher policy distillation."""

from .loss import distill_loss
from .rollout import DistillUnroll, TeacherSpec, distill_rollout
from .train import DistillConfig, distill_train

__all__ = ["TeacherSpec", "DistillUnroll", "distill_rollout", "distill_loss",
           "DistillConfig", "distill_train"]
