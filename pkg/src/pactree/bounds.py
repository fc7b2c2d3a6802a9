"""Sample-size bound for learning with a bounded number of training errors.

Implements the closed forms behind the bundled (c, k) parameter grid:
the minimum training-set size m for accuracy/confidence targets
(epsilon, delta) over a finite hypothesis space when up to k training
examples may be misclassified, the exact hypothesis-space count for
trees of a given size, and the tree-size curve derived from the
weak-learning constant c. The grid values are pinned by regression
tests; `rounding="nearest"` reproduces the published grid, while
`rounding="ceil"` gives the smallest integer that provably satisfies
the bound.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

#: The bundled experiment grid: delta, epsilon, feature count, and the
#: (c, k) axes. Tree sizes n = [3, 6, 10, 18] follow from the c values.
GRID_EPSILON = 0.2
GRID_DELTA = 0.1
GRID_NUM_FEATURES = 22
GRID_C_VALUES = (0.04, 0.06, 0.08, 0.1)
GRID_K_VALUES = (0, 5, 10, 15)

ROUNDINGS = ("nearest", "ceil")


def _check_unit_interval(name: str, value: float) -> None:
    if not 0 < value < 0.5:
        raise DomainError(f"{name} must lie strictly in (0, 1/2), got {value}")


def _round(value: float, rounding: str) -> int:
    if rounding == "nearest":
        return math.floor(value + 0.5)
    if rounding == "ceil":
        return math.ceil(value)
    raise DomainError(f"unknown rounding mode {rounding!r}")


def _sample_size_from_log(
    epsilon: float, delta: float, k: int, ln_hypotheses: float, rounding: str
) -> int:
    _check_unit_interval("epsilon", epsilon)
    _check_unit_interval("delta", delta)
    if k < 0:
        raise DomainError("k must be non-negative")
    raw = (
        ln_hypotheses
        + math.log(k + 1)
        + (1 - k) * math.log(epsilon)
        - math.log(delta)
        + k
    ) / epsilon + k
    # Side condition m >= k/epsilon, evaluated exactly on the binary float.
    floor_side = math.ceil(Fraction(k) / Fraction(epsilon)) if k else 0
    return max(_round(raw, rounding), floor_side)


def sample_size(
    epsilon: float,
    delta: float,
    k: int,
    hypothesis_count: int,
    rounding: str = "nearest",
) -> int:
    """Training-set size sufficient for the (epsilon, delta) guarantee.

    Evaluates (1/eps)*[ln(|H|*(k+1)*eps^(1-k)/delta) + k] + k and takes
    the larger of its rounding and ceil(k/eps).
    """
    if hypothesis_count < 1:
        raise DomainError("hypothesis count must be positive")
    return _sample_size_from_log(
        epsilon, delta, k, math.log(hypothesis_count), rounding
    )


def sample_size_for_tree_space(
    epsilon: float,
    delta: float,
    k: int,
    tree_size: int,
    num_features: int,
    rounding: str = "nearest",
) -> int:
    """Same bound with |H| = tree_size ** num_features.

    ln|H| is computed analytically as num_features * ln(tree_size) so
    huge counts (18**22 and beyond) lose no precision.
    """
    if tree_size < 1 or num_features < 1:
        raise DomainError("tree size and feature count must be positive")
    return _sample_size_from_log(
        epsilon, delta, k, num_features * math.log(tree_size), rounding
    )


def hypothesis_count(tree_size: int, num_features: int) -> int:
    """Number of decision trees with `tree_size` internal nodes: n ** |F|, exact."""
    if tree_size < 1 or num_features < 1:
        raise DomainError("tree size and feature count must be positive")
    return tree_size**num_features


def tree_size_estimate(c: float, epsilon: float) -> int:
    """Internal-node count for weak-learning constant c at accuracy epsilon.

    Evaluates round((1/eps)^(c*ln(1/eps)/gamma^2)) with gamma = 0.5 - eps.
    The closed form is reconstructed from the cited top-down induction
    analysis and is pinned by the grid regression tests (c values
    0.04/0.06/0.08/0.1 at eps 0.2 must yield 3/6/10/18).
    """
    if c <= 0:
        raise DomainError("c must be positive")
    _check_unit_interval("epsilon", epsilon)
    gamma = 0.5 - epsilon
    if gamma <= 0:
        raise DomainError("gamma = 0.5 - epsilon must be positive")
    inverse = 1.0 / epsilon
    raw = inverse ** (c * math.log(inverse) / gamma**2)
    return math.floor(raw + 0.5)


def binomial_upper_bound(m: int, j: int) -> float:
    """The (e*m/j)**j bound on C(m, j); requires 1 <= j <= m."""
    if j < 1 or j > m:
        raise DomainError(f"need 1 <= j <= m, got j={j}, m={m}")
    return (math.e * m / j) ** j


def check_binomial_lemma(m_max: int) -> bool:
    """Exhaustively verify C(m, j) <= (e*m/j)**j for all 1 <= j <= m <= m_max."""
    for m in range(1, m_max + 1):
        for j in range(1, m + 1):
            if math.comb(m, j) > binomial_upper_bound(m, j):
                return False
    return True


def grid_rows(
    epsilon: float = GRID_EPSILON,
    delta: float = GRID_DELTA,
    num_features: int = GRID_NUM_FEATURES,
    rounding: str = "nearest",
) -> list[dict]:
    """The full sample-size grid, one row per c value with one m per k."""
    rows = []
    for c in GRID_C_VALUES:
        n = tree_size_estimate(c, epsilon)
        row = {"c": c, "n": n}
        for k in GRID_K_VALUES:
            row[f"m_k{k}"] = sample_size_for_tree_space(
                epsilon, delta, k, n, num_features, rounding
            )
        rows.append(row)
    return rows
