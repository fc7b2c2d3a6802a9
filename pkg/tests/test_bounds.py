"""Sample-size bound, tree-size curve, hypothesis counts, and the binomial bound."""

import math

import pytest

from pactree.bounds import (
    GRID_C_VALUES,
    GRID_K_VALUES,
    binomial_upper_bound,
    check_binomial_lemma,
    grid_rows,
    hypothesis_count,
    sample_size,
    sample_size_for_tree_space,
    tree_size_estimate,
)
from pactree.errors import DomainError

# the published 16-cell grid: k -> (m for n = 3, 6, 10, 18)
EXPECTED_GRID = {
    0: (124, 201, 257, 321),
    5: (204, 280, 336, 401),
    10: (277, 353, 409, 474),
    15: (349, 425, 481, 546),
}
EXPECTED_N = (3, 6, 10, 18)


class TestSampleSize:
    def test_published_probe_values(self):
        assert sample_size(0.2, 0.1, 0, 3**22) == 124
        assert sample_size(0.2, 0.1, 10, 10**22) == 409
        assert sample_size(0.2, 0.1, 15, 18**22) == 546
        assert sample_size(0.2, 0.1, 5, 3**22) == 204

    def test_full_grid_reproduces(self):
        for k, expected in EXPECTED_GRID.items():
            got = tuple(
                sample_size_for_tree_space(0.2, 0.1, k, n, 22) for n in EXPECTED_N
            )
            assert got == expected

    def test_exact_count_agrees_with_analytic_log(self):
        for n in EXPECTED_N:
            for k in GRID_K_VALUES:
                assert sample_size(0.2, 0.1, k, n**22) == sample_size_for_tree_space(
                    0.2, 0.1, k, n, 22
                )

    def test_monotone_in_hypothesis_count(self):
        values = [sample_size(0.2, 0.1, 0, n**22) for n in (1, 2, 3, 5, 10, 18, 40)]
        assert values == sorted(values)

    def test_monotone_in_k_over_grid(self):
        for n in EXPECTED_N:
            values = [sample_size_for_tree_space(0.2, 0.1, k, n, 22) for k in GRID_K_VALUES]
            assert values == sorted(values)

    def test_monotone_in_inverse_delta(self):
        values = [
            sample_size(0.2, d, 5, 3**22) for d in (0.4, 0.2, 0.1, 0.05, 0.01)
        ]
        assert values == sorted(values)

    def test_strictly_increasing_in_inverse_epsilon(self):
        values = [
            sample_size(e, 0.1, 5, 3**22) for e in (0.4, 0.3, 0.2, 0.1, 0.05)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_ceil_vs_nearest(self):
        for n in EXPECTED_N:
            for k in GRID_K_VALUES:
                nearest = sample_size_for_tree_space(0.2, 0.1, k, n, 22, "nearest")
                ceil = sample_size_for_tree_space(0.2, 0.1, k, n, 22, "ceil")
                assert nearest <= ceil <= nearest + 1

    def test_domain_validation(self):
        for eps, delta in ((0.0, 0.1), (0.5, 0.1), (0.2, 0.0), (0.2, 0.5), (-0.1, 0.1)):
            with pytest.raises(DomainError):
                sample_size(eps, delta, 0, 10)
        with pytest.raises(DomainError):
            sample_size(0.2, 0.1, -1, 10)
        with pytest.raises(DomainError):
            sample_size(0.2, 0.1, 0, 0)
        with pytest.raises(DomainError):
            sample_size(0.2, 0.1, 0, 10, rounding="floor")

    def test_side_condition_floor(self):
        # result always covers ceil(k / epsilon)
        m = sample_size(0.2, 0.1, 15, 18**22)
        assert m >= math.ceil(15 / 0.2)


class TestHypothesisCount:
    def test_exact_values(self):
        assert hypothesis_count(3, 22) == 31381059609
        assert hypothesis_count(1, 22) == 1
        assert hypothesis_count(10, 22) == 10**22

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            hypothesis_count(0, 22)
        with pytest.raises(DomainError):
            hypothesis_count(3, 0)


class TestTreeSizeEstimate:
    def test_grid_values(self):
        assert tuple(tree_size_estimate(c, 0.2) for c in GRID_C_VALUES) == EXPECTED_N

    def test_pre_rounding_value_near_ten(self):
        # independent evaluation of the closed form for c = 0.08
        raw = 5 ** (0.08 * math.log(5) / 0.09)
        assert 9.9 <= raw <= 10.1
        assert tree_size_estimate(0.08, 0.2) == 10

    def test_domain_validation(self):
        with pytest.raises(DomainError):
            tree_size_estimate(0.0, 0.2)
        with pytest.raises(DomainError):
            tree_size_estimate(0.04, 0.5)
        with pytest.raises(DomainError):
            tree_size_estimate(0.04, 0.6)


class TestBinomialBound:
    def test_j_equals_m_edge(self):
        assert math.comb(4, 4) == 1
        assert binomial_upper_bound(4, 4) == pytest.approx(math.e**4)
        assert 1 <= binomial_upper_bound(4, 4)

    def test_j_one(self):
        assert math.comb(10, 1) == 10
        assert binomial_upper_bound(10, 1) == pytest.approx(math.e * 10)
        assert 10 <= binomial_upper_bound(10, 1)

    def test_exhaustive_up_to_thirty(self):
        assert check_binomial_lemma(30)

    def test_domain_validation(self):
        with pytest.raises(DomainError):
            binomial_upper_bound(10, 0)
        with pytest.raises(DomainError):
            binomial_upper_bound(10, 11)


class TestGridRows:
    def test_shape_and_values(self):
        rows = grid_rows()
        assert len(rows) == 4
        for row, n, c in zip(rows, EXPECTED_N, GRID_C_VALUES):
            assert row["c"] == c
            assert row["n"] == n
            for k in GRID_K_VALUES:
                assert row[f"m_k{k}"] == EXPECTED_GRID[k][EXPECTED_N.index(n)]

    def test_ceil_rows_dominate(self):
        nearest = grid_rows(rounding="nearest")
        ceil = grid_rows(rounding="ceil")
        for a, b in zip(nearest, ceil):
            for k in GRID_K_VALUES:
                assert b[f"m_k{k}"] >= a[f"m_k{k}"]
