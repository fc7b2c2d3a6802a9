"""Tree extraction from membership oracles, and the exact greedy reference grower.

`trepac` is the practical algorithm: it draws one training multiset up
front, grows the tree breadth-first, picks splits by minimum weighted
binary entropy, and stops on an empty queue, the size limit, or a
training error within the misclassification budget k. `topdown` is the
theoretical grower driven by an exact true-error functional; it exists
for cross-checking, not for practical use.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from math import log2
from random import Random
from typing import Callable, Sequence

from .errors import DomainError
from .features import CandidateSplit, Constraint, Not
from .oracles import (
    ClassifiedExample,
    Distribution,
    MembershipOracle,
    TrainingSet,
    build_training_set,
)
from .tree import DecisionTree, NodePath, node_class

TERMINATION_QUEUE_EMPTY = "queue_empty"
TERMINATION_SIZE_LIMIT = "size_limit"
TERMINATION_ERROR_BUDGET = "error_budget_met"


def binary_entropy(q: float) -> float:
    """-q*log2(q) - (1-q)*log2(1-q), with 0*log(0) taken as 0."""
    if q < 0 or q > 1:
        raise DomainError(f"entropy argument must lie in [0, 1], got {q}")
    if q in (0, 1):
        return 0.0
    return -q * log2(q) - (1 - q) * log2(1 - q)


def _split_counts(
    samples: Sequence[ClassifiedExample], split: CandidateSplit
) -> tuple[int, int]:
    """(satisfying count, positives among them) in one pass."""
    n_sat = pos_sat = 0
    holds = split.holds
    for s in samples:
        if holds(s.example):
            n_sat += 1
            pos_sat += s.label
    return n_sat, pos_sat


def _weighted_entropy_from_counts(
    total: int, total_pos: int, n_sat: int, pos_sat: int
) -> float:
    score = 0.0
    if n_sat:
        score += n_sat / total * binary_entropy(pos_sat / n_sat)
    n_unsat = total - n_sat
    if n_unsat:
        score += n_unsat / total * binary_entropy((total_pos - pos_sat) / n_unsat)
    return score


def weighted_split_entropy(
    samples: Sequence[ClassifiedExample], split: CandidateSplit
) -> float:
    """Size-weighted entropy of the two sample subsets a split induces."""
    if not samples:
        raise DomainError("cannot score a split on an empty sample set")
    n_sat, pos_sat = _split_counts(samples, split)
    total_pos = sum(s.label for s in samples)
    return _weighted_entropy_from_counts(len(samples), total_pos, n_sat, pos_sat)


def best_split(
    samples: Sequence[ClassifiedExample], splits: Sequence[CandidateSplit]
) -> tuple[CandidateSplit, bool]:
    """The split with the lowest weighted entropy, plus its orientation.

    Ties keep the first split in the given order, so a canonically
    ordered split pool makes extraction deterministic. The returned flag
    asks for the split to be negated: leaf classes are fixed by path
    bits, so the constraint is oriented so that the two implied child
    classes misclassify as few of the reaching samples as possible
    (ties keep the split as-is). In particular a perfect separator is
    never attached backwards, and a negated split lets the tree carve
    positive regions that live on the non-satisfying side.
    """
    if not samples:
        raise DomainError("cannot choose a split for an empty sample set")
    if not splits:
        raise DomainError("the candidate-split pool is empty")
    total = len(samples)
    total_pos = sum(s.label for s in samples)
    best = None
    best_score = None
    best_counts = (0, 0)
    for split in splits:
        n_sat, pos_sat = _split_counts(samples, split)
        score = _weighted_entropy_from_counts(total, total_pos, n_sat, pos_sat)
        if best_score is None or score < best_score:
            best, best_score, best_counts = split, score, (n_sat, pos_sat)
    n_sat, pos_sat = best_counts
    neg_sat = n_sat - pos_sat
    pos_unsat = total_pos - pos_sat
    neg_unsat = (total - n_sat) - pos_unsat
    # as-is: satisfiers go to the 1-child; negated: they go to the 0-child
    mis_as_is = neg_sat + pos_unsat
    mis_negated = neg_unsat + pos_sat
    return best, mis_negated < mis_as_is


@dataclass(frozen=True)
class ExtractionConfig:
    size_limit: int
    k: int
    training_size: int
    candidate_splits: tuple[CandidateSplit, ...]
    seed: int | None = None
    queue_discipline: str = "fifo"

    def __post_init__(self):
        if self.size_limit < 1:
            raise DomainError("size_limit must be at least 1")
        if self.training_size < 1:
            raise DomainError("training_size must be at least 1")
        if self.k < 0:
            raise DomainError("k must be non-negative")
        if not self.candidate_splits:
            raise DomainError("candidate_splits must be non-empty")
        if self.queue_discipline != "fifo":
            raise DomainError("only the fifo queue discipline is supported")
        object.__setattr__(self, "candidate_splits", tuple(self.candidate_splits))


@dataclass(frozen=True)
class ExtractionReport:
    tree: DecisionTree
    training_error: float
    training_misclassified: int
    termination_reason: str
    oracle_calls: int
    querying_seconds: float
    extraction_seconds: float
    training_size: int
    k: int
    size_limit: int
    seed: int | None
    distribution: str
    queue_discipline: str = "fifo"
    tie_break: str = "first-lowest-entropy-in-split-order"
    skipped_empty_nodes: tuple[NodePath, ...] = ()

    def comparable(self) -> dict:
        """Report fields with wall-clock timings stripped, for equality checks."""
        return {
            "tree": self.tree,
            "training_error": self.training_error,
            "training_misclassified": self.training_misclassified,
            "termination_reason": self.termination_reason,
            "oracle_calls": self.oracle_calls,
            "training_size": self.training_size,
            "k": self.k,
            "size_limit": self.size_limit,
            "seed": self.seed,
            "distribution": self.distribution,
            "queue_discipline": self.queue_discipline,
            "tie_break": self.tie_break,
            "skipped_empty_nodes": self.skipped_empty_nodes,
        }


def _misclassified(reach: dict[NodePath, list[ClassifiedExample]]) -> int:
    return sum(
        sum(1 for s in samples if s.label != node_class(leaf))
        for leaf, samples in reach.items()
    )


def trepac(
    oracle: MembershipOracle,
    config: ExtractionConfig,
    dist: Distribution,
    training_set: TrainingSet | None = None,
) -> ExtractionReport:
    """Extract a decision tree from a membership oracle.

    The training multiset is built once up front (`training_set`
    overrides this for replay). The loop guard is re-checked at the top
    of every iteration, so an already-satisfied error budget terminates
    before the first split. A child is queued only when its
    misclassification count exceeds k/(size_limit+1); that cutoff is
    what makes an empty-queue run end within the budget k.
    """
    rng = Random(config.seed)
    calls_before = oracle.calls

    t0 = time.perf_counter()
    if training_set is None:
        training_set = build_training_set(
            oracle, dist, config.training_size, rng, source_seed=config.seed
        )
    querying_seconds = time.perf_counter() - t0

    samples = list(training_set.items)
    if len(samples) != config.training_size:
        raise DomainError(
            f"training set has {len(samples)} items, config wants {config.training_size}"
        )

    t1 = time.perf_counter()
    tree = DecisionTree.root_only()
    queue: deque[NodePath] = deque([""])
    reach: dict[NodePath, list[ClassifiedExample]] = {"": samples}
    skipped: list[NodePath] = []
    k, size_limit, m = config.k, config.size_limit, config.training_size

    while True:
        if not queue:
            reason = TERMINATION_QUEUE_EMPTY
            break
        if tree.size >= size_limit:
            reason = TERMINATION_SIZE_LIMIT
            break
        # error_S(T) > k/m, compared exactly on integer counts
        if _misclassified(reach) <= k:
            reason = TERMINATION_ERROR_BUDGET
            break
        node = queue.popleft()
        node_samples = reach[node]
        if not node_samples:
            # No evidence to split on; leave the node as a leaf.
            skipped.append(node)
            continue
        split, negate = best_split(node_samples, config.candidate_splits)
        constraint: Constraint = Not(split) if negate else split
        tree = tree.split_leaf(node, constraint)
        sat, unsat = [], []
        for s in node_samples:
            (sat if split.holds(s.example) != negate else unsat).append(s)
        del reach[node]
        reach[node + "1"] = sat
        reach[node + "0"] = unsat
        for bit in ("0", "1"):
            child = node + bit
            wrong = sum(1 for s in reach[child] if s.label != int(bit))
            # misclassification(child) > k/(size_limit+1), exact on integers
            if wrong * (size_limit + 1) > k:
                queue.append(child)
    extraction_seconds = time.perf_counter() - t1

    misclassified = _misclassified(reach)
    return ExtractionReport(
        tree=tree,
        training_error=misclassified / m,
        training_misclassified=misclassified,
        termination_reason=reason,
        oracle_calls=oracle.calls - calls_before,
        querying_seconds=querying_seconds,
        extraction_seconds=extraction_seconds,
        training_size=m,
        k=k,
        size_limit=size_limit,
        seed=config.seed,
        distribution=f"uniform over {len(dist)} examples"
        if dist.weights is None
        else f"weighted over {len(dist)} examples",
        skipped_empty_nodes=tuple(skipped),
    )


def topdown(
    true_error_fn: Callable[[DecisionTree], float],
    size_limit: int,
    splits: Sequence[CandidateSplit],
) -> DecisionTree:
    """Greedy exact-error tree growth; theoretical reference only.

    Each iteration scans every (leaf, split) pair, keeps the pair with
    the largest error decrease (later pairs win ties, matching a >=
    update), and applies it. Pairs that would increase the error never
    qualify; if none qualifies the tree is returned as is.
    """
    if size_limit < 1:
        raise DomainError("size_limit must be at least 1")
    if not splits:
        raise DomainError("the candidate-split pool is empty")
    tree = DecisionTree.root_only()
    while tree.size < size_limit:
        current_error = true_error_fn(tree)
        best_delta = 0
        best_pair = None
        for leaf in tree.leaves():
            for split in splits:
                candidate = tree.split_leaf(leaf, split)
                delta = current_error - true_error_fn(candidate)
                if delta >= best_delta:
                    best_delta = delta
                    best_pair = (leaf, split)
        if best_pair is None:
            break
        tree = tree.split_leaf(*best_pair)
    return tree
