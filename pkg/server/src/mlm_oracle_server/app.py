"""The HTTP surface: health, single classification, and ordered batches.

POST /classify takes either a templated sentence with exactly one
generic <mask> placeholder or a 22-bit one-hot vector, plus a model id;
the response carries the argmax label (she -> 0, he -> 1), both raw
pronoun probabilities, and the model id. POST /batch applies the same
contract to a list of items and preserves order. Errors: 400 for bad
masks/vectors, 404 for unknown models, 503 when a model cannot load.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .backends import (
    BackendLoadError,
    KNOWN_MODELS,
    make_scorer,
)
from .encoding import (
    EncodingError,
    MASK_PLACEHOLDER,
    sentence_to_vector,
    vector_to_sentence,
)


class ClassifyRequest(BaseModel):
    model: str
    sentence: str | None = None
    vector: list[int] | None = None


class BatchItem(BaseModel):
    sentence: str | None = None
    vector: list[int] | None = None


class BatchRequest(BaseModel):
    model: str
    items: list[BatchItem] = Field(default_factory=list)


class ClassifyResponse(BaseModel):
    label: int
    scores: dict[str, float]
    model: str
    pronoun_tokens: dict[str, str] | None = None


class BatchResponse(BaseModel):
    results: list[ClassifyResponse]


class HealthResponse(BaseModel):
    status: str
    models: list[str]


def _normalize_sentence(item) -> str:
    """One canonical templated sentence per item; 400 on contract violations."""
    has_sentence = item.sentence is not None
    has_vector = item.vector is not None
    if has_sentence == has_vector:
        raise HTTPException(400, "each item needs exactly one of sentence or vector")
    if has_vector:
        try:
            return vector_to_sentence(item.vector)
        except EncodingError as exc:
            raise HTTPException(400, str(exc)) from exc
    masks = item.sentence.count(MASK_PLACEHOLDER)
    if masks != 1:
        raise HTTPException(
            400, f"sentence must contain exactly one {MASK_PLACEHOLDER}, found {masks}"
        )
    try:
        # round-trip through the vector form: rejects off-template sentences
        # and canonicalizes whitespace, so sentence and vector forms of the
        # same example produce identical responses
        return vector_to_sentence(sentence_to_vector(item.sentence))
    except EncodingError as exc:
        raise HTTPException(400, str(exc)) from exc


def create_app(cache_dir: str | None = None, models: tuple[str, ...] = KNOWN_MODELS) -> FastAPI:
    app = FastAPI(title="mlm-oracle-server", version="0.1.0")
    scorers: dict[str, object] = {}

    def scorer_for(model_id: str):
        if model_id not in models:
            raise HTTPException(404, f"unknown model {model_id!r}")
        if model_id not in scorers:
            scorers[model_id] = make_scorer(model_id, cache_dir=cache_dir)
        return scorers[model_id]

    def classify_sentences(model_id: str, sentences: list[str]) -> list[ClassifyResponse]:
        scorer = scorer_for(model_id)
        try:
            scored = scorer.score(sentences)
            tokens = scorer.pronoun_tokens()
        except BackendLoadError as exc:
            raise HTTPException(503, str(exc)) from exc
        responses = []
        for scores in scored:
            label = 1 if scores["he"] > scores["she"] else 0
            responses.append(
                ClassifyResponse(
                    label=label, scores=scores, model=model_id, pronoun_tokens=tokens
                )
            )
        return responses

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", models=list(models))

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(request: ClassifyRequest):
        sentence = _normalize_sentence(request)
        return classify_sentences(request.model, [sentence])[0]

    @app.post("/batch", response_model=BatchResponse)
    def batch(request: BatchRequest):
        sentences = [_normalize_sentence(item) for item in request.items]
        if not sentences:
            return BatchResponse(results=[])
        return BatchResponse(results=classify_sentences(request.model, sentences))

    return app
