from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .estimator import GINEmotionClassifier
from .loss import LossConfig, combined_loss, loss
from .model import GinModel, GraphBatch, Prediction, backward, forward, forward_batch, gin_layer
from .optim import Adadelta
from .train import TrainConfig, TrainingDiverged, loss_and_grads, train

__all__ = [
    "Adadelta",
    "CheckpointError",
    "GINEmotionClassifier",
    "GinModel",
    "GraphBatch",
    "LossConfig",
    "Prediction",
    "TrainConfig",
    "TrainingDiverged",
    "backward",
    "combined_loss",
    "forward",
    "forward_batch",
    "gin_layer",
    "load_checkpoint",
    "loss",
    "loss_and_grads",
    "save_checkpoint",
    "train",
]
