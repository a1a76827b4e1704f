"""Transformer masked-language-model backend.

torch and transformers are imported lazily inside HFEncoder so the rest of
the package works without them; install the `hf` extra to use this backend.
Models are loaded from local files only — configure a downloaded model path
or id that exists in the local cache.

The window and pooling helpers are plain numpy so they stay testable without
any model weights.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from .config import ExtractorConfig
from .features import finalize_predictions
from .lexicon import GENERAL_VOCAB

log = logging.getLogger(__name__)

_FALLBACK_MAX_TOKENS = 512


def centered_window(n: int, max_len: int, center: int) -> tuple[int, int, bool]:
    """Half-open [start, end) covering `center`, at most `max_len` wide.

    Returns (start, end, truncated). The window is centered on `center` and
    clamped to [0, n], so the target always survives truncation.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if not 0 <= center < max(n, 1):
        raise ValueError(f"center {center} out of range for length {n}")
    if n <= max_len:
        return 0, n, False
    start = center - max_len // 2
    start = max(0, min(start, n - max_len))
    return start, start + max_len, True


def mean_pool(matrix: np.ndarray, rows: Sequence[int]) -> np.ndarray:
    """Mean of the selected rows, as float32."""
    if len(rows) == 0:
        raise ValueError("cannot pool zero rows")
    return np.asarray(matrix, dtype=np.float64)[list(rows)].mean(axis=0).astype(np.float32)


class HFEncoder:
    """Masked-language-model encoder over locally available weights."""

    def __init__(self, config: ExtractorConfig):
        import torch
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(
            config.mlm_model, local_files_only=True
        )
        self.model = AutoModelForMaskedLM.from_pretrained(
            config.mlm_model, local_files_only=True
        )
        self.device = torch.device(config.device)
        self.model.to(self.device)
        self.model.eval()
        self.hidden_size = int(self.model.config.hidden_size)
        self.name = config.mlm_model
        limit = getattr(self.tokenizer, "model_max_length", _FALLBACK_MAX_TOKENS)
        self.max_tokens = limit if 0 < limit <= 100_000 else _FALLBACK_MAX_TOKENS

    # ------------------------------------------------------------------

    def _window_words(self, words: Sequence[str], index: int) -> tuple[list[str], int]:
        """Shrink long inputs to a window around the target, flagged in the log."""
        budget = max(1, self.max_tokens // 4)
        start, end, truncated = centered_window(len(words), budget, index)
        if truncated:
            log.warning(
                "sentence of %d words exceeds the model budget; "
                "using a centered window of %d words around the target",
                len(words),
                budget,
            )
        return list(words[start:end]), index - start

    def _encode(self, batch: Sequence[tuple[Sequence[str], int]]):
        windowed = [self._window_words(words, index) for words, index in batch]
        encoding = self.tokenizer(
            [words for words, _ in windowed],
            is_split_into_words=True,
            padding=True,
            truncation=True,
            max_length=self.max_tokens,
            return_tensors="pt",
        ).to(self.device)
        return windowed, encoding

    def embed_batch(self, items: Sequence[tuple[Sequence[str], int]]) -> list[np.ndarray]:
        torch = self._torch
        out: list[np.ndarray] = []
        windowed, encoding = self._encode(items)
        with torch.no_grad():
            hidden = self.model(
                **encoding, output_hidden_states=True
            ).hidden_states[-1]
        states = hidden.cpu().numpy()
        for i, (_, target) in enumerate(windowed):
            word_ids = encoding.word_ids(batch_index=i)
            rows = [r for r, w in enumerate(word_ids) if w == target]
            if not rows:
                raise ValueError(
                    f"target word {target} produced no sub-tokens after encoding"
                )
            out.append(mean_pool(states[i], rows))
        return out

    def predict_batch(
        self, items: Sequence[tuple[Sequence[str], int, str]], length: int
    ) -> list[list[str]]:
        torch = self._torch
        masked_items = []
        for words, index, _ in items:
            masked = list(words)
            masked[index] = self.tokenizer.mask_token
            masked_items.append((masked, index))
        windowed, encoding = self._encode(masked_items)
        with torch.no_grad():
            logits = self.model(**encoding).logits
        scores = logits.cpu().numpy()
        mask_id = self.tokenizer.mask_token_id
        input_ids = encoding["input_ids"].cpu().numpy()
        out: list[list[str]] = []
        for i in range(len(items)):
            positions = np.nonzero(input_ids[i] == mask_id)[0]
            if positions.size == 0:
                raise ValueError("mask token vanished during encoding")
            row = scores[i, int(positions[0])]
            order = np.argsort(-row, kind="stable")
            ranked = self.tokenizer.convert_ids_to_tokens(order.tolist())
            out.append(finalize_predictions(ranked, length, reserve=GENERAL_VOCAB))
        return out
