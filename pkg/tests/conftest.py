"""Shared fixtures and strategies for small binary feature spaces."""

from __future__ import annotations

import itertools
from random import Random

import pytest
from hypothesis import strategies as st

from pactree.features import (
    CandidateSplit,
    Feature,
    FeatureSpace,
    FiniteDomain,
    Not,
)
from pactree.tree import DecisionTree


def binary_space(num_features: int, space_id: str = "test-space") -> FeatureSpace:
    return FeatureSpace(
        space_id,
        tuple(Feature(f"f{i}", FiniteDomain((0, 1))) for i in range(num_features)),
    )


def all_binary_examples(num_features: int) -> list[tuple[int, ...]]:
    return [tuple(bits) for bits in itertools.product((0, 1), repeat=num_features)]


def grow_random_tree(
    num_features: int, n_internal: int, rng: Random, allow_negated: bool = True
) -> DecisionTree:
    """Random tree via repeated split_leaf; may create unreachable leaves."""
    tree = DecisionTree.root_only()
    for _ in range(n_internal):
        leaf = rng.choice(tree.leaves())
        split = CandidateSplit(rng.randrange(num_features), "=", 1)
        constraint = Not(split) if allow_negated and rng.random() < 0.5 else split
        tree = tree.split_leaf(leaf, constraint)
    return tree


@st.composite
def small_trees(draw, num_features: int = 4, max_internal: int = 4):
    n = draw(st.integers(min_value=0, max_value=max_internal))
    tree = DecisionTree.root_only()
    for _ in range(n):
        leaf = draw(st.sampled_from(tree.leaves()))
        split = CandidateSplit(draw(st.integers(0, num_features - 1)), "=", 1)
        if draw(st.booleans()):
            tree = tree.split_leaf(leaf, Not(split))
        else:
            tree = tree.split_leaf(leaf, split)
    return tree


@st.composite
def small_constraints(draw, num_features: int = 4):
    from pactree.features import And, Or, TRUE, FALSE

    base = st.builds(
        lambda i: CandidateSplit(i, "=", 1), st.integers(0, num_features - 1)
    ) | st.just(TRUE) | st.just(FALSE)
    return draw(
        st.recursive(
            base,
            lambda inner: st.builds(Not, inner)
            | st.builds(And, inner, inner)
            | st.builds(Or, inner, inner),
            max_leaves=6,
        )
    )


@pytest.fixture(scope="session")
def space4() -> FeatureSpace:
    return binary_space(4)
