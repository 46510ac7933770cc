"""Learned set-level scan orders: weight generator/evaluator networks, their
alternating training loop, simulated annealing, and a finite-difference audit."""

from .anneal import AnnealResult, AnnealSchedule, anneal, mean_dafner_weights, set_energy
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .gradcheck import finite_diff_check
from .networks import Evaluator, Generator, NetConfig, batch_mean_weights
from .training import History, TrainConfig, TrainingDivergedError, TrainResult, set_weights, train

__all__ = [
    "AnnealResult",
    "AnnealSchedule",
    "CheckpointError",
    "Evaluator",
    "Generator",
    "History",
    "NetConfig",
    "TrainConfig",
    "TrainResult",
    "TrainingDivergedError",
    "anneal",
    "batch_mean_weights",
    "finite_diff_check",
    "load_checkpoint",
    "mean_dafner_weights",
    "save_checkpoint",
    "set_energy",
    "set_weights",
    "train",
]
