"""Inference backends producing contextual embeddings and masked predictions.

The builtin backend derives every word vector from a keyed hash, so it needs
no model files, no network, and no mutable state: the same input always
yields the same output, on any machine. Transformer-based backends live in
`hfglue` and are imported only when a non-builtin model is configured.
"""

from __future__ import annotations

import hashlib
from collections.abc import Sequence

import numpy as np

from .config import ExtractorConfig
from .features import finalize_predictions
from .lexicon import ADJ_WORDS, GENERAL_VOCAB, NOUN_VOCAB, VERB_BASES

_WINDOW = 4  # context words on each side of the target
_OFFSET_CLIP = 3  # positions beyond this share one relative-position vector


class BuiltinEncoder:
    """Deterministic hash-seeded encoder with a fixed 64-dimension space.

    A word's base vector is drawn from a generator seeded by the hash of the
    word itself, so vectors are reproducible without any stored weights. The
    context vector for a target blends the target's own vector with
    distance-discounted vectors of nearby words keyed by word plus relative
    offset, which makes the embedding genuinely contextual: the same target
    in different company lands in a different direction.
    """

    hidden_size = 64
    name = "builtin-hash-v1"

    def __init__(self):
        self._vectors: dict[str, np.ndarray] = {}
        self._pools: dict[str, tuple[list[str], np.ndarray]] = {}

    def _wv(self, key: str) -> np.ndarray:
        cached = self._vectors.get(key)
        if cached is None:
            digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "big"))
            cached = rng.standard_normal(self.hidden_size)
            self._vectors[key] = cached
        return cached

    def _context(self, words: Sequence[str], index: int) -> np.ndarray:
        vector = 2.0 * self._wv(words[index].lower())
        for j in range(max(0, index - _WINDOW), min(len(words), index + _WINDOW + 1)):
            if j == index:
                continue
            distance = abs(j - index)
            offset = max(-_OFFSET_CLIP, min(_OFFSET_CLIP, j - index))
            vector = vector + self._wv(f"{words[j].lower()}@{offset}") / (1 + distance)
        norm = float(np.linalg.norm(vector))
        if norm > 0.0:
            vector = vector / norm
        return vector.astype(np.float32)

    def _pool(self, pos: str) -> tuple[list[str], np.ndarray]:
        key = pos if pos in ("VERB", "NOUN", "ADJ") else "GENERAL"
        cached = self._pools.get(key)
        if cached is None:
            words = {
                "VERB": sorted(VERB_BASES),
                "NOUN": sorted(NOUN_VOCAB),
                "ADJ": sorted(ADJ_WORDS),
                "GENERAL": list(GENERAL_VOCAB),
            }[key]
            matrix = np.stack([self._wv(w) for w in words])
            matrix = matrix / np.linalg.norm(matrix, axis=1, keepdims=True)
            cached = (words, matrix)
            self._pools[key] = cached
        return cached

    def embed_batch(self, items: Sequence[tuple[Sequence[str], int]]) -> list[np.ndarray]:
        """items: (words, target_index) pairs; returns unit float32 vectors."""
        return [self._context(words, index) for words, index in items]

    def predict_batch(
        self, items: Sequence[tuple[Sequence[str], int, str]], length: int
    ) -> list[list[str]]:
        """items: (words, target_index, pos_hint) triples.

        The target is masked out, the masked context is scored against the
        vocabulary pool for the pos hint by cosine, and ties break
        alphabetically so rankings are stable.
        """
        out: list[list[str]] = []
        for words, index, pos in items:
            masked = list(words)
            masked[index] = "[MASK]"
            context = self._context(masked, index).astype(np.float64)
            pool_words, pool_matrix = self._pool(pos)
            scores = pool_matrix @ context
            ranked = sorted(zip(pool_words, scores), key=lambda ws: (-ws[1], ws[0]))
            out.append(
                finalize_predictions(
                    (w for w, _ in ranked), length, reserve=GENERAL_VOCAB
                )
            )
        return out


def load_encoder(config: ExtractorConfig):
    """Builtin encoder for builtin model ids, transformer backend otherwise."""
    if config.mlm_model.startswith("builtin"):
        return BuiltinEncoder()
    from .hfglue import HFEncoder

    return HFEncoder(config)
