"""Spherical latent-space clustering of pair features."""

from .model import (
    POSTERIOR_FLOOR,
    LatentModel,
    TrainConfig,
    clustering_objective,
    encode_pair,
    reconstruction_objective,
    sharpen,
    vmf_posterior,
)
from .train import (
    Assignment,
    encode_all,
    evaluate_reconstruction,
    init_centers,
    load_checkpoint,
    pretrain,
    rank_pairs_per_type,
    save_checkpoint,
    train,
)

__all__ = [
    "POSTERIOR_FLOOR",
    "LatentModel",
    "TrainConfig",
    "Assignment",
    "clustering_objective",
    "encode_pair",
    "encode_all",
    "evaluate_reconstruction",
    "init_centers",
    "load_checkpoint",
    "pretrain",
    "rank_pairs_per_type",
    "reconstruction_objective",
    "save_checkpoint",
    "sharpen",
    "train",
    "vmf_posterior",
]
