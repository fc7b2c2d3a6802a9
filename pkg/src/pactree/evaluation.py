"""Error and fidelity metrics, plus the empirical validation harness.

True error and fidelity are computed in exact rational arithmetic over
enumerable spaces; callers convert to float for reporting. Two
independent routes compute the true error — direct enumeration and the
per-leaf decomposition — and must agree exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, Sequence

from .errors import DomainError
from .extraction import ExtractionConfig, trepac
from .features import CandidateSplit, Example, satisfies_all
from .oracles import Distribution, MembershipOracle, TrainingSet, TreeOracle
from .seeding import derive_seed
from .tree import DecisionTree, node_class

LabelFn = Callable[[Example], int]


def as_label_fn(target) -> LabelFn:
    """Accept a tree, a membership oracle, or a plain callable as target."""
    if isinstance(target, DecisionTree):
        return target.classify
    if isinstance(target, MembershipOracle):
        return target.query
    if callable(target):
        return target
    raise DomainError(f"cannot use {target!r} as a classification target")


def training_error(tree: DecisionTree, samples: TrainingSet | Sequence) -> float:
    """Fraction of the training multiset the tree misclassifies."""
    return training_misclassification(tree, samples) / len(tuple(samples))


def training_misclassification(tree: DecisionTree, samples: TrainingSet | Sequence) -> int:
    """Misclassified-example count, with multiplicity."""
    items = tuple(samples)
    if not items:
        raise DomainError("training set is empty")
    return sum(1 for example, label in items if tree.classify(example) != label)


def true_error_enumerate(tree: DecisionTree, target, dist: Distribution) -> Fraction:
    """Probability mass of the disagreement region, by direct enumeration."""
    label = as_label_fn(target)
    total = Fraction(0)
    for example, weight in dist.support():
        if tree.classify(example) != label(example):
            total += weight
    return total


def true_error_by_leaves(tree: DecisionTree, target, dist: Distribution) -> Fraction:
    """Same quantity via the leaf decomposition.

    Sums, over 0-leaves, the mass of reaching positives and, over
    1-leaves, the mass of reaching negatives. Must equal
    `true_error_enumerate` exactly; the two routes share only the
    satisfaction primitive.
    """
    label = as_label_fn(target)
    support = dist.support()
    total = Fraction(0)
    for leaf in tree.leaves():
        constraints = tree.constraints_to_reach(leaf)
        wrong = 1 - node_class(leaf)
        for example, weight in support:
            if label(example) == wrong and satisfies_all(example, constraints):
                total += weight
    return total


def true_misclassification(tree: DecisionTree, target, dist: Distribution) -> int:
    """Number of support examples on which tree and target disagree."""
    label = as_label_fn(target)
    return sum(
        1 for example, _ in dist.support() if tree.classify(example) != label(example)
    )


def fidelity(tree: DecisionTree, target, examples: Sequence[Example]) -> Fraction:
    """Agreement rate between the tree and the target over an example set."""
    if not examples:
        raise DomainError("fidelity needs a non-empty example set")
    label = as_label_fn(target)
    agree = sum(1 for e in examples if tree.classify(e) == label(e))
    return Fraction(agree, len(examples))


def probabilistic_fidelity(tree: DecisionTree, target, dist: Distribution) -> Fraction:
    """Distribution-weighted agreement: exactly 1 - true error."""
    return 1 - true_error_enumerate(tree, target, dist)


@dataclass(frozen=True)
class EvalResult:
    training_error: float | None
    true_error: float
    true_misclassified: int
    fidelity: float
    probabilistic_fidelity: float


def evaluate(
    tree: DecisionTree,
    target,
    dist: Distribution,
    training_set: TrainingSet | None = None,
) -> EvalResult:
    err = true_error_enumerate(tree, target, dist)
    return EvalResult(
        training_error=(
            training_error(tree, training_set) if training_set is not None else None
        ),
        true_error=float(err),
        true_misclassified=true_misclassification(tree, target, dist),
        fidelity=float(fidelity(tree, target, [e for e, _ in dist.support()])),
        probabilistic_fidelity=float(1 - err),
    )


# -- random target trees -------------------------------------------------------


def random_tree(
    splits: Sequence[CandidateSplit],
    n_internal: int,
    examples: Sequence[Example],
    rng: Random,
) -> DecisionTree:
    """Grow a random tree by n_internal uniform (leaf, split) choices.

    Vacuous choices — a split leaving either child region empty over
    `examples` — are rejected, which keeps every leaf reachable and the
    target inside the hypothesis space of same-sized trees.
    """
    if n_internal < 0:
        raise DomainError("n_internal must be non-negative")
    tree = DecisionTree.root_only()
    reach: dict[str, list[Example]] = {"": list(examples)}
    for _ in range(n_internal):
        candidates = []
        for leaf in tree.leaves():
            region = reach[leaf]
            if not region:
                continue
            for split in splits:
                n_sat = sum(1 for e in region if split.holds(e))
                if 0 < n_sat < len(region):
                    candidates.append((leaf, split))
        if not candidates:
            raise DomainError(
                f"no non-vacuous (leaf, split) choice left at size {tree.size}"
            )
        leaf, split = candidates[rng.randrange(len(candidates))]
        tree = tree.split_leaf(leaf, split)
        region = reach.pop(leaf)
        reach[leaf + "1"] = [e for e in region if split.holds(e)]
        reach[leaf + "0"] = [e for e in region if not split.holds(e)]
    return tree


# -- empirical PAC validation ----------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    trials: int
    failures: int
    failure_fraction: float
    tolerance: float
    passed: bool
    epsilon: float
    delta: float
    k: int
    m: int
    n_internal: int
    size_limit: int
    seed: int
    true_errors: tuple[float, ...]


def validate_pac(
    splits: Sequence[CandidateSplit],
    examples: Sequence[Example],
    n_internal: int,
    epsilon: float,
    delta: float,
    k: int,
    trials: int,
    seed: int,
    m: int | None = None,
    size_limit: int | None = None,
    workers: int = 1,
) -> ValidationReport:
    """Monte-Carlo check of the sample-size guarantee.

    Each trial grows a random target with `n_internal` nodes, extracts a
    tree from m membership queries under the uniform distribution, and
    computes its exact true error over the space. The run passes when
    the fraction of trials with true error above epsilon stays within
    delta plus a three-sigma binomial allowance.
    """
    from .bounds import sample_size_for_tree_space

    if trials < 1:
        raise DomainError("trials must be at least 1")
    num_features = max(s.feature_index for s in splits) + 1
    if m is None:
        m = sample_size_for_tree_space(
            epsilon, delta, k, n_internal, num_features, rounding="ceil"
        )
    if size_limit is None:
        size_limit = max(n_internal, 1)
    dist = Distribution.uniform(tuple(examples))

    def run_trial(index: int) -> float:
        target_rng = Random(derive_seed(seed, index, "target"))
        target = random_tree(splits, n_internal, examples, target_rng)
        config = ExtractionConfig(
            size_limit=size_limit,
            k=k,
            training_size=m,
            candidate_splits=tuple(splits),
            seed=derive_seed(seed, index, "extract"),
        )
        report = trepac(TreeOracle(target), config, dist)
        return float(true_error_enumerate(report.tree, target, dist))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(run_trial, range(trials)))
    else:
        errors = [run_trial(i) for i in range(trials)]

    failures = sum(1 for e in errors if e > epsilon)
    fraction = failures / trials
    tolerance = delta + 3 * math.sqrt(delta * (1 - delta) / trials)
    return ValidationReport(
        trials=trials,
        failures=failures,
        failure_fraction=fraction,
        tolerance=tolerance,
        passed=fraction <= tolerance,
        epsilon=epsilon,
        delta=delta,
        k=k,
        m=m,
        n_internal=n_internal,
        size_limit=size_limit,
        seed=seed,
        true_errors=tuple(errors),
    )
