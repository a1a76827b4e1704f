"""Pipeline configuration: one declarative JSON file, flag overrides, one seed.

The seed is resolved with precedence: command-line flag, then the
EVTYPES_SEED environment variable, then the config file, then 0. A single
seed drives every stage, including latent training; config files must not
carry a nested train.seed.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .cluster import TrainConfig
from .formats import InputFormatError

SEED_ENV_VAR = "EVTYPES_SEED"

DEFAULT_KEEP_FRACTION = 0.8
DEFAULT_MWP_LENGTH = 10
DEFAULT_RBO_P = 0.9
DEFAULT_PCA_DIM = 500
DEFAULT_CLUSTER_COUNT = 10


@dataclass(frozen=True)
class PipelinePaths:
    parses: str | None = None
    background: str | None = None
    senses: str | None = None
    mention_features: str | None = None
    out_dir: str = "."


@dataclass(frozen=True)
class PipelineConfig:
    keep_fraction: float = DEFAULT_KEEP_FRACTION
    mwp_length: int = DEFAULT_MWP_LENGTH
    rbo_p: float = DEFAULT_RBO_P
    pca_dim: int = DEFAULT_PCA_DIM
    seed: int = 0
    paths: PipelinePaths = field(default_factory=PipelinePaths)
    train: TrainConfig = field(default_factory=lambda: TrainConfig(k=DEFAULT_CLUSTER_COUNT))

    def __post_init__(self):
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ValueError("keep_fraction must lie in (0, 1]")
        if self.mwp_length < 1:
            raise ValueError("mwp_length must be >= 1")
        if not 0.0 < self.rbo_p < 1.0:
            raise ValueError("rbo_p must lie in (0, 1)")
        if self.pca_dim < 1:
            raise ValueError("pca_dim must be >= 1")

    def with_seed(self, seed: int) -> "PipelineConfig":
        train = dataclasses.replace(self.train, seed=seed)
        return dataclasses.replace(self, seed=seed, train=train)


def config_to_dict(config: PipelineConfig) -> dict:
    out = dataclasses.asdict(config)
    out["train"]["hidden"] = list(config.train.hidden)
    return out


def config_hash(config: PipelineConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


_TOP_KEYS = {"keep_fraction", "mwp_length", "rbo_p", "pca_dim", "seed", "paths", "train"}
_PATH_KEYS = {"parses", "background", "senses", "mention_features", "out_dir"}
_TRAIN_KEYS = {
    "k",
    "latent_dim",
    "hidden",
    "kappa",
    "lam",
    "delta",
    "max_iters",
    "learning_rate",
    "batch_size",
    "pretrain_epochs",
}


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse a config file; None yields the defaults."""
    if path is None:
        return PipelineConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise InputFormatError(str(path), err.lineno, f"invalid JSON: {err.msg}") from err
    if not isinstance(raw, dict):
        raise InputFormatError(str(path), 1, "config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise InputFormatError(str(path), 1, f"unknown config keys: {sorted(unknown)}")

    kwargs = {k: raw[k] for k in ("keep_fraction", "mwp_length", "rbo_p", "pca_dim", "seed") if k in raw}

    if "paths" in raw:
        paths_raw = raw["paths"]
        unknown = set(paths_raw) - _PATH_KEYS
        if unknown:
            raise InputFormatError(str(path), 1, f"unknown paths keys: {sorted(unknown)}")
        kwargs["paths"] = PipelinePaths(**paths_raw)

    train_raw = dict(raw.get("train", {}))
    if "seed" in train_raw:
        raise InputFormatError(
            str(path), 1, "train.seed is not configurable; set the top-level seed"
        )
    unknown = set(train_raw) - _TRAIN_KEYS
    if unknown:
        raise InputFormatError(str(path), 1, f"unknown train keys: {sorted(unknown)}")
    train_raw.setdefault("k", DEFAULT_CLUSTER_COUNT)
    if "hidden" in train_raw:
        train_raw["hidden"] = tuple(train_raw["hidden"])
    try:
        kwargs["train"] = TrainConfig(seed=raw.get("seed", 0), **train_raw)
        config = PipelineConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise InputFormatError(str(path), 1, str(err)) from err
    return config


def resolve_seed(flag_seed: int | None, config: PipelineConfig) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as err:
            raise InputFormatError(
                SEED_ENV_VAR, 0, f"environment seed must be an integer, got {env!r}"
            ) from err
    return config.seed
