"""Run configuration: model identifiers and inference-shape knobs.

The config hash stamped into every output header covers all fields, so any
setting that could change an output also changes the hash.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

DEFAULT_PARSER_MODEL = "builtin-rules-v1"
DEFAULT_MLM_MODEL = "builtin-hash-v1"
DEFAULT_MWP_LENGTH = 10
DEFAULT_BATCH_SIZE = 8


@dataclass(frozen=True)
class ExtractorConfig:
    parser_model: str = DEFAULT_PARSER_MODEL
    mlm_model: str = DEFAULT_MLM_MODEL
    mwp_length: int = DEFAULT_MWP_LENGTH
    batch_size: int = DEFAULT_BATCH_SIZE
    device: str = "cpu"

    def __post_init__(self):
        if self.mwp_length < 1:
            raise ValueError("mwp_length must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.parser_model:
            raise ValueError("parser_model must be non-empty")
        if not self.mlm_model:
            raise ValueError("mlm_model must be non-empty")


_KEYS = {f.name for f in fields(ExtractorConfig)}


def load_config(path) -> ExtractorConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown config key(s): {', '.join(unknown)}")
    return ExtractorConfig(**raw)


def config_hash(config: ExtractorConfig) -> str:
    blob = json.dumps(asdict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]
