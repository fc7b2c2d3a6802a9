"""Feature spaces, tabular examples, candidate splits, and constraints.

An example is a plain tuple of values, positionally aligned with the
feature order of its space. Constraints are an immutable recursive
algebra over candidate splits; satisfaction is a pure function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from numbers import Real
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import ConfigError, DomainError

Value = Union[int, float, str]
Example = tuple[Value, ...]

COMPARATORS = ("=", "<", "<=", ">=", ">")
ORDERED_COMPARATORS = frozenset(("<", "<=", ">=", ">"))


def _is_number(v) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool)


@dataclass(frozen=True)
class FiniteDomain:
    """An explicit, non-empty set of admissible values (order fixed)."""

    values: tuple[Value, ...]

    def __post_init__(self):
        if not self.values:
            raise DomainError("feature domain must be non-empty")
        if len(set(self.values)) != len(self.values):
            raise DomainError(f"duplicate values in domain {self.values!r}")

    @property
    def ordered(self) -> bool:
        return all(_is_number(v) for v in self.values)

    def __contains__(self, value) -> bool:
        return value in self.values


@dataclass(frozen=True)
class NumericDomain:
    """A numeric range; splits require an explicit threshold list.

    Thresholds are never inferred from data: they are part of the space
    configuration.
    """

    minimum: float | None = None
    maximum: float | None = None
    thresholds: tuple[float, ...] = ()

    ordered = True

    def __contains__(self, value) -> bool:
        if not _is_number(value):
            return False
        if self.minimum is not None and value < self.minimum:
            return False
        if self.maximum is not None and value > self.maximum:
            return False
        return True


Domain = Union[FiniteDomain, NumericDomain]


@dataclass(frozen=True)
class Feature:
    name: str
    domain: Domain


@dataclass(frozen=True)
class FeatureSpace:
    """An ordered, fixed list of named features."""

    space_id: str
    features: tuple[Feature, ...]

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ConfigError("feature names must be unique")

    def __len__(self) -> int:
        return len(self.features)

    def index_of(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise DomainError(f"unknown feature {name!r}")

    def validate_example(self, example: Sequence[Value]) -> Example:
        """Check arity and per-feature domain membership; return the tuple."""
        if len(example) != len(self.features):
            raise DomainError(
                f"example has {len(example)} values, space has {len(self.features)} features"
            )
        for i, (v, f) in enumerate(zip(example, self.features)):
            if v not in f.domain:
                raise DomainError(f"value {v!r} not in domain of feature {i} ({f.name})")
        return tuple(example)

    def validate_split(self, split: "CandidateSplit") -> None:
        if not 0 <= split.feature_index < len(self.features):
            raise DomainError(f"split feature index {split.feature_index} out of range")
        feature = self.features[split.feature_index]
        if split.value not in feature.domain:
            raise DomainError(
                f"split value {split.value!r} not in domain of feature {feature.name}"
            )
        if split.comparator in ORDERED_COMPARATORS and not feature.domain.ordered:
            raise DomainError(
                f"comparator {split.comparator!r} needs an ordered domain ({feature.name})"
            )

    def enumerate_examples(self) -> list[Example]:
        """All value tuples of the full product space, in domain order.

        Only defined when every domain is finite.
        """
        import itertools

        value_lists = []
        for f in self.features:
            if not isinstance(f.domain, FiniteDomain):
                raise DomainError(f"feature {f.name} has a non-enumerable domain")
            value_lists.append(f.domain.values)
        return [tuple(vs) for vs in itertools.product(*value_lists)]


class Constraint:
    """Base class of the constraint algebra; use `satisfies` to evaluate."""

    __slots__ = ()


@dataclass(frozen=True)
class CandidateSplit(Constraint):
    """An atomic comparison `feature ∘ value`; every split is a constraint."""

    feature_index: int
    comparator: str
    value: Value

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise DomainError(f"unknown comparator {self.comparator!r}")
        if self.feature_index < 0:
            raise DomainError("feature index must be non-negative")

    def holds(self, example: Example) -> bool:
        if self.feature_index >= len(example):
            raise DomainError(
                f"example of arity {len(example)} has no feature {self.feature_index}"
            )
        left = example[self.feature_index]
        op = self.comparator
        try:
            if op == "=":
                return left == self.value
            if op == "<":
                return left < self.value
            if op == "<=":
                return left <= self.value
            if op == ">=":
                return left >= self.value
            return left > self.value
        except TypeError as exc:
            raise DomainError(
                f"comparator {op!r} not applicable to {left!r} vs {self.value!r}"
            ) from exc


@dataclass(frozen=True)
class Not(Constraint):
    inner: Constraint


@dataclass(frozen=True)
class And(Constraint):
    left: Constraint
    right: Constraint


@dataclass(frozen=True)
class Or(Constraint):
    left: Constraint
    right: Constraint


@dataclass(frozen=True)
class _Const(Constraint):
    value: bool


#: Tautology / contradiction markers (the `1` and `0` abbreviations).
TRUE = _Const(True)
FALSE = _Const(False)


def satisfies(example: Example, constraint: Constraint) -> bool:
    """Truth of the recursive satisfaction relation for one example."""
    if isinstance(constraint, CandidateSplit):
        return constraint.holds(example)
    if isinstance(constraint, Not):
        return not satisfies(example, constraint.inner)
    if isinstance(constraint, And):
        return satisfies(example, constraint.left) and satisfies(example, constraint.right)
    if isinstance(constraint, Or):
        return satisfies(example, constraint.left) or satisfies(example, constraint.right)
    if isinstance(constraint, _Const):
        return constraint.value
    raise DomainError(f"not a constraint: {constraint!r}")


def satisfies_all(example: Example, constraints: Iterable[Constraint]) -> bool:
    """A constraint set is read as the conjunction of its elements."""
    return all(satisfies(example, c) for c in constraints)


def conjoin(constraints: Sequence[Constraint]) -> Constraint:
    """Fold a constraint set into one formula; the empty set is TRUE."""
    if not constraints:
        return TRUE
    result = constraints[0]
    for c in constraints[1:]:
        result = And(result, c)
    return result


def enumerate_candidate_splits(space: FeatureSpace) -> list[CandidateSplit]:
    """Deterministic split pool for a space, ordered by (feature, value).

    Finite domains yield one equality split per value, except {0, 1}
    domains which yield the single split `f = 1` (the `= 0` variant is
    its negation). Numeric domains yield one `<=` split per configured
    threshold and reject configurations without thresholds.
    """
    splits: list[CandidateSplit] = []
    for i, feature in enumerate(space.features):
        domain = feature.domain
        if isinstance(domain, FiniteDomain):
            if set(domain.values) == {0, 1}:
                splits.append(CandidateSplit(i, "=", 1))
            else:
                for v in domain.values:
                    splits.append(CandidateSplit(i, "=", v))
        else:
            if not domain.thresholds:
                raise ConfigError(
                    f"numeric feature {feature.name} has no threshold list; "
                    "thresholds must be configured, never inferred"
                )
            for t in domain.thresholds:
                splits.append(CandidateSplit(i, "<=", t))
    return splits


def format_split(split: CandidateSplit, space: FeatureSpace | None = None) -> str:
    name = f"f{split.feature_index}"
    if space is not None and split.feature_index < len(space.features):
        name = space.features[split.feature_index].name
    return f"{name} {split.comparator} {split.value}"


# -- feature-space configuration files ------------------------------------


def space_to_config(space: FeatureSpace) -> dict:
    features = []
    for f in space.features:
        if isinstance(f.domain, FiniteDomain):
            features.append({"name": f.name, "values": list(f.domain.values)})
        else:
            features.append(
                {
                    "name": f.name,
                    "range": {"min": f.domain.minimum, "max": f.domain.maximum},
                    "thresholds": list(f.domain.thresholds),
                }
            )
    return {"id": space.space_id, "features": features}


def space_from_config(config: dict) -> FeatureSpace:
    try:
        space_id = config["id"]
        raw_features = config["features"]
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"feature-space config missing key: {exc}") from exc
    features = []
    for entry in raw_features:
        try:
            name = entry["name"]
        except (TypeError, KeyError) as exc:
            raise ConfigError("feature entry without a name") from exc
        if "values" in entry:
            domain: Domain = FiniteDomain(tuple(entry["values"]))
        elif "range" in entry or "thresholds" in entry:
            rng = entry.get("range") or {}
            domain = NumericDomain(
                minimum=rng.get("min"),
                maximum=rng.get("max"),
                thresholds=tuple(entry.get("thresholds", ())),
            )
        else:
            raise ConfigError(f"feature {name!r} has neither values nor a range")
        features.append(Feature(name, domain))
    return FeatureSpace(space_id, tuple(features))


def load_space(path: str | Path) -> FeatureSpace:
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid feature-space file {path}: {exc}") from exc
    return space_from_config(config)


def save_space(space: FeatureSpace, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(space_to_config(space), indent=2) + "\n", encoding="utf-8"
    )
