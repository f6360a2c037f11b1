from .dataset import Dataset, NormStats, Trial
from .network import PBNet, load_weights, save_weights
from .rollout import Rollout, rollout
from .train import TrainConfig, TrainingDiverged, TrainResult, gradient_check, train

__all__ = [
    "Dataset",
    "NormStats",
    "PBNet",
    "Rollout",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "Trial",
    "gradient_check",
    "load_weights",
    "rollout",
    "save_weights",
    "train",
]
