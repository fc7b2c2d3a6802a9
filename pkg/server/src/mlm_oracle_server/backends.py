"""Pronoun-probability backends: real masked-LM inference plus synthetic stand-ins.

A backend scores templated sentences (generic <mask> placeholder) and
returns raw fill-mask probabilities for the two pronoun completions.
All backends are deterministic: inference runs in eval mode with no
sampling, and the synthetic family is a pure function of the sentence.
"""

from __future__ import annotations

import threading
from typing import Protocol

from .encoding import MASK_PLACEHOLDER, decode_vector, sentence_to_vector

PRONOUNS = ("she", "he")

#: Fill-mask models served when their weights are available.
TRANSFORMER_MODELS = (
    "bert-base-cased",
    "bert-large-cased",
    "roberta-base",
    "roberta-large",
)

#: Deterministic synthetic models, always available (offline mode).
SYNTHETIC_MODELS = ("synthetic-stereotype", "synthetic-depth3")

KNOWN_MODELS = SYNTHETIC_MODELS + TRANSFORMER_MODELS


class BackendLoadError(RuntimeError):
    """The backend's model could not be loaded (missing weights, no network)."""


class PronounScorer(Protocol):
    model_id: str

    def score(self, sentences: list[str]) -> list[dict[str, float]]:
        """Raw probabilities for each pronoun, one dict per sentence."""

    def pronoun_tokens(self) -> dict[str, str]:
        """The literal token form compared per pronoun (tokenizer-dependent)."""


class SyntheticScorer:
    """A fixed, deterministic stereotype profile over the sentence template.

    `synthetic-stereotype` prefers 'she' for nurse, fashion designer,
    dancer, and singers born after 1970; `synthetic-depth3` prefers
    'he' exactly for footballer, industrialist, and boxer.
    """

    def __init__(self, model_id: str):
        if model_id not in SYNTHETIC_MODELS:
            raise BackendLoadError(f"unknown synthetic model {model_id!r}")
        self.model_id = model_id

    def _she_probability(self, sentence: str) -> float:
        birth, _, occupation = decode_vector(sentence_to_vector(sentence))
        if self.model_id == "synthetic-depth3":
            return 0.1 if occupation in ("footballer", "industrialist", "boxer") else 0.9
        if occupation in ("nurse", "fashion designer", "dancer"):
            return 0.9
        if occupation == "singer" and birth == "after 1970":
            return 0.75
        return 0.1

    def score(self, sentences: list[str]) -> list[dict[str, float]]:
        results = []
        for sentence in sentences:
            p_she = self._she_probability(sentence)
            results.append({"she": p_she, "he": round(1.0 - p_she, 12)})
        return results

    def pronoun_tokens(self) -> dict[str, str]:
        return {"she": "she", "he": "he"}


class TransformersScorer:
    """Masked-LM inference over the pinned fill-mask models.

    The generic <mask> placeholder is translated to the model's own
    mask token; pronoun probabilities are read from the softmax over
    the vocabulary at the mask position. The lowercase single-token
    form of each pronoun is used (with a leading space where the
    tokenizer needs one); the chosen form is echoed via
    `pronoun_tokens` since this is a reporting choice.
    """

    def __init__(self, model_id: str, cache_dir: str | None = None):
        self.model_id = model_id
        self.cache_dir = cache_dir
        self._lock = threading.Lock()
        self._loaded = None

    def _load(self):
        if self._loaded is not None:
            return self._loaded
        with self._lock:
            if self._loaded is not None:
                return self._loaded
            try:
                import torch
                from transformers import AutoModelForMaskedLM, AutoTokenizer

                tokenizer = AutoTokenizer.from_pretrained(
                    self.model_id, cache_dir=self.cache_dir
                )
                model = AutoModelForMaskedLM.from_pretrained(
                    self.model_id, cache_dir=self.cache_dir
                )
                model.eval()
            except Exception as exc:  # missing weights, no network, bad install
                raise BackendLoadError(
                    f"could not load {self.model_id}: {exc}"
                ) from exc
            token_ids, token_forms = {}, {}
            for pronoun in PRONOUNS:
                for literal in (pronoun, " " + pronoun):
                    ids = tokenizer.encode(literal, add_special_tokens=False)
                    if len(ids) == 1:
                        token_ids[pronoun] = ids[0]
                        token_forms[pronoun] = tokenizer.convert_ids_to_tokens(ids)[0]
                        break
                else:
                    raise BackendLoadError(
                        f"{self.model_id} has no single-token form for {pronoun!r}"
                    )
            self._loaded = (torch, tokenizer, model, token_ids, token_forms)
            return self._loaded

    def score(self, sentences: list[str]) -> list[dict[str, float]]:
        torch, tokenizer, model, token_ids, _ = self._load()
        texts = [
            s.replace(MASK_PLACEHOLDER, tokenizer.mask_token) for s in sentences
        ]
        with self._lock, torch.no_grad():
            encoded = tokenizer(texts, return_tensors="pt", padding=True)
            logits = model(**encoded).logits
            mask_positions = encoded["input_ids"] == tokenizer.mask_token_id
            results = []
            for row in range(len(texts)):
                position = mask_positions[row].nonzero()
                probabilities = logits[row, position[0, 0]].softmax(dim=-1)
                results.append(
                    {p: float(probabilities[token_ids[p]]) for p in PRONOUNS}
                )
        return results

    def pronoun_tokens(self) -> dict[str, str]:
        return dict(self._load()[4])


def make_scorer(model_id: str, cache_dir: str | None = None):
    if model_id in SYNTHETIC_MODELS:
        return SyntheticScorer(model_id)
    if model_id in TRANSFORMER_MODELS:
        return TransformersScorer(model_id, cache_dir=cache_dir)
    raise KeyError(model_id)
