"""Membership-query oracles and explicit distributions over finite example spaces.

Every stochastic operation takes a seeded `random.Random`; there is no
ambient randomness. Sampling is with replacement (draws are i.i.d.), so
training multisets may repeat examples even on small spaces.
"""

from __future__ import annotations

import bisect
import csv
import io
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from random import Random
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    DomainError,
    MissingLabelError,
    OracleError,
    TrainingSetError,
    TransportError,
)
from .features import Example, FeatureSpace, FiniteDomain, Value
from .tree import DecisionTree


class ClassifiedExample(NamedTuple):
    example: Example
    label: int


@dataclass(frozen=True)
class Distribution:
    """A probability distribution over an explicit, finite example space.

    Weights are exact rationals; `uniform` leaves them implicit. Float
    weights are accepted and normalized when they sum to 1 within 1e-12.
    """

    examples: tuple[Example, ...]
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        examples = tuple(tuple(e) for e in self.examples)
        object.__setattr__(self, "examples", examples)
        if len(set(examples)) != len(examples):
            raise DomainError("distribution space contains duplicate examples")
        if self.weights is not None:
            if len(self.weights) != len(examples):
                raise DomainError("one weight per example required")
            weights = tuple(Fraction(w) for w in self.weights)
            if any(w < 0 for w in weights):
                raise DomainError("weights must be non-negative")
            total = sum(weights)
            if total == 0:
                raise DomainError("weights sum to zero")
            if total != 1:
                if abs(float(total) - 1.0) > 1e-12:
                    raise DomainError(f"weights sum to {float(total)}, not 1")
                weights = tuple(w / total for w in weights)
            object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, examples: Sequence[Example]) -> "Distribution":
        return cls(tuple(examples), None)

    def __len__(self) -> int:
        return len(self.examples)

    def prob(self, example: Example) -> Fraction:
        if self.weights is None:
            return Fraction(1, len(self.examples)) if example in self._index else Fraction(0)
        i = self._index.get(example)
        return self.weights[i] if i is not None else Fraction(0)

    @cached_property
    def _index(self) -> dict[Example, int]:
        return {e: i for i, e in enumerate(self.examples)}

    @cached_property
    def _cumulative(self) -> list[float]:
        total = 0.0
        cumulative = []
        for w in self.weights:
            total += float(w)
            cumulative.append(total)
        return cumulative

    def support(self) -> list[tuple[Example, Fraction]]:
        if self.weights is None:
            p = Fraction(1, len(self.examples))
            return [(e, p) for e in self.examples]
        return [(e, w) for e, w in zip(self.examples, self.weights) if w > 0]

    def draw(self, rng: Random) -> Example:
        """One i.i.d. draw."""
        if not self.examples:
            raise DomainError("cannot draw from an empty example space")
        if self.weights is None:
            return self.examples[rng.randrange(len(self.examples))]
        i = bisect.bisect_right(self._cumulative, rng.random())
        return self.examples[min(i, len(self.examples) - 1)]

    def draw_many(self, rng: Random, count: int) -> list[Example]:
        return [self.draw(rng) for _ in range(count)]


# -- oracles -------------------------------------------------------------------


class MembershipOracle:
    """Answers classification queries for examples; deterministic per example.

    `calls` counts answered queries (cache hits included).
    """

    def __init__(self):
        self.calls = 0

    def _label(self, example: Example) -> int:
        raise NotImplementedError

    def query(self, example: Example) -> int:
        label = self._label(example)
        self.calls += 1
        return label

    def query_many(self, examples: Sequence[Example]) -> list[int]:
        labels = []
        for i, example in enumerate(examples):
            try:
                labels.append(self.query(example))
            except OracleError as exc:
                exc.completed = i
                raise
        return labels


def membership_query(oracle: MembershipOracle, example: Example) -> int:
    return oracle.query(example)


class TreeOracle(MembershipOracle):
    """Oracle backed by a known target decision tree."""

    def __init__(self, tree: DecisionTree):
        super().__init__()
        self.tree = tree

    def _label(self, example: Example) -> int:
        return self.tree.classify(example)


class FixtureOracle(MembershipOracle):
    """Oracle backed by a recorded (example -> label) table."""

    def __init__(self, labels: Mapping[Example, int]):
        super().__init__()
        self.labels = {tuple(e): int(v) for e, v in labels.items()}
        if any(v not in (0, 1) for v in self.labels.values()):
            raise DomainError("fixture labels must be 0 or 1")

    def _label(self, example: Example) -> int:
        try:
            return self.labels[tuple(example)]
        except KeyError:
            raise MissingLabelError(f"fixture has no label for {example!r}") from None

    @classmethod
    def from_function(
        cls, examples: Iterable[Example], fn: Callable[[Example], int]
    ) -> "FixtureOracle":
        return cls({tuple(e): fn(tuple(e)) for e in examples})

    @classmethod
    def from_file(cls, path: str | Path, space: FeatureSpace) -> "FixtureOracle":
        labels: dict[Example, int] = {}
        text = Path(path).read_text(encoding="utf-8")
        for row in _fixture_rows(text):
            if len(row) != len(space.features) + 1:
                raise DomainError(
                    f"fixture row has {len(row)} fields, expected {len(space.features) + 1}"
                )
            example = space.validate_example(
                tuple(_parse_value(v, space.features[i].domain) for i, v in enumerate(row[:-1]))
            )
            labels[example] = int(row[-1])
        if not labels:
            raise DomainError(f"fixture file {path} contains no rows")
        return cls(labels)

    def to_file(self, path: str | Path) -> None:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        for example in sorted(self.labels):
            writer.writerow(list(example) + [self.labels[example]])
        Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def _fixture_rows(text: str):
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield next(csv.reader([line]))


def _parse_value(raw: str, domain) -> Value:
    raw = raw.strip()
    if isinstance(domain, FiniteDomain):
        for value in domain.values:
            if str(value) == raw:
                return value
        return raw
    try:
        return int(raw)
    except ValueError:
        return float(raw)


class RemoteOracle(MembershipOracle):
    """Oracle speaking the model-server HTTP protocol.

    Queries are batched (`batch_size`, default 32) and responses cached
    per example vector: membership queries are deterministic within a
    session, so the cache is sound. Access to the transport is
    serialized through a lock.
    """

    def __init__(
        self,
        url: str,
        model: str,
        timeout: float = 60.0,
        batch_size: int = 32,
        retries: int = 2,
        backoff: float = 0.5,
        client=None,
    ):
        super().__init__()
        if batch_size < 1:
            raise DomainError("batch size must be at least 1")
        self.url = url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.batch_size = batch_size
        self.retries = retries
        self.backoff = backoff
        self.http_requests = 0
        self.cache: dict[Example, int] = {}
        self._lock = threading.Lock()
        if client is None:
            import httpx

            client = httpx.Client(timeout=timeout)
        self._client = client

    def _post_batch(self, vectors: list[list]) -> list[int]:
        import httpx

        payload = {"model": self.model, "items": [{"vector": v} for v in vectors]}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt and self.backoff:
                time.sleep(self.backoff * attempt)
            try:
                self.http_requests += 1
                response = self._client.post(f"{self.url}/batch", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(
                    f"server error {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"oracle rejected batch ({response.status_code}): {response.text[:200]}"
                )
            body = response.json()
            results = body.get("results")
            if not isinstance(results, list) or len(results) != len(vectors):
                raise TransportError("oracle returned a malformed batch response")
            return [int(item["label"]) for item in results]
        raise TransportError(f"oracle unreachable after {self.retries + 1} attempts: {last_error}")

    def _resolve(self, examples: Sequence[Example]) -> None:
        pending: list[Example] = []
        for example in examples:
            if example not in self.cache and example not in pending:
                pending.append(example)
        for start in range(0, len(pending), self.batch_size):
            chunk = pending[start : start + self.batch_size]
            labels = self._post_batch([list(e) for e in chunk])
            for example, label in zip(chunk, labels):
                self.cache[example] = label

    def _label(self, example: Example) -> int:
        example = tuple(example)
        with self._lock:
            self._resolve([example])
            return self.cache[example]

    def query_many(self, examples: Sequence[Example]) -> list[int]:
        examples = [tuple(e) for e in examples]
        with self._lock:
            try:
                self._resolve(examples)
            except OracleError as exc:
                exc.completed = sum(1 for e in examples if e in self.cache)
                raise
        labels = [self.cache[e] for e in examples]
        self.calls += len(examples)
        return labels


# -- training sets ---------------------------------------------------------------


@dataclass(frozen=True)
class TrainingSet:
    """Multiset of classified examples; duplicates preserved with multiplicity."""

    items: tuple[ClassifiedExample, ...]
    source_seed: int | None = None

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def build_training_set(
    oracle: MembershipOracle,
    dist: Distribution,
    m: int,
    rng: Random,
    source_seed: int | None = None,
) -> TrainingSet:
    """Draw m examples i.i.d. from `dist` and label them via the oracle."""
    if m < 1:
        raise DomainError("training-set size must be at least 1")
    examples = dist.draw_many(rng, m)
    try:
        labels = oracle.query_many(examples)
    except OracleError as exc:
        raise TrainingSetError(
            f"aborted after {exc.completed} of {m} queries: {exc}",
            completed=exc.completed,
        ) from exc
    return TrainingSet(
        tuple(ClassifiedExample(e, l) for e, l in zip(examples, labels)),
        source_seed=source_seed,
    )
