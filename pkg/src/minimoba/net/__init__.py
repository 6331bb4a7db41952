from .layers import (affine, affine_bwd, lstm_step, lstm_step_bwd, masked_softmax,
                     relu, relu_bwd, sample_masked)
from .model import ModelConfig, PolicyValueNet, teacher_config, final_config
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "affine", "affine_bwd", "lstm_step", "lstm_step_bwd", "masked_softmax",
    "relu", "relu_bwd", "sample_masked", "ModelConfig", "PolicyValueNet",
    "teacher_config", "final_config", "load_checkpoint", "save_checkpoint",
]
