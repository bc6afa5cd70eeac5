import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moljunction.errors import InputError
from moljunction.hafnian import (
    _exp_series_coefficient,
    loop_hafnian,
    loop_hafnian_enumerate,
    loop_hafnian_trace,
)

# number of matchings with loops on n vertices (involutions of n elements)
TELEPHONE = [1, 1, 2, 4, 10, 26, 76, 232, 764]
DOUBLE_FACTORIAL = {2: 1, 4: 3, 6: 15, 8: 105}


def _random_symmetric(seed, size, complex_=False):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(size, size))
    if complex_:
        a = a + 1j * rng.normal(size=(size, size))
    return 0.5 * (a + a.T)


class TestSmallCases:
    @pytest.mark.parametrize("method", ["trace", "enumerate"])
    def test_empty_matrix_is_one(self, method):
        assert loop_hafnian(np.zeros((0, 0)), method=method) == 1.0

    @pytest.mark.parametrize("method", ["trace", "enumerate"])
    def test_two_by_two(self, method):
        a = np.array([[2.0, 3.0], [3.0, 5.0]])
        assert loop_hafnian(a, method=method) == pytest.approx(2.0 * 5.0 + 3.0)

    @pytest.mark.parametrize("method", ["trace", "enumerate"])
    def test_three_by_three(self, method):
        a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 5.0], [3.0, 5.0, 6.0]])
        expected = 1 * 4 * 6 + 2 * 6 + 3 * 4 + 5 * 1
        assert loop_hafnian(a, method=method) == pytest.approx(expected)

    @pytest.mark.parametrize("n", range(1, 9))
    @pytest.mark.parametrize("method", ["trace", "enumerate"])
    def test_all_ones_counts_involutions(self, n, method):
        assert loop_hafnian(np.ones((n, n)), method=method) == pytest.approx(TELEPHONE[n], rel=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_zero_diagonal_gives_perfect_matchings(self, n):
        a = np.ones((n, n)) - np.eye(n)
        assert loop_hafnian_trace(a) == pytest.approx(DOUBLE_FACTORIAL[n], rel=1e-12)

    def test_odd_size_without_loops_vanishes(self):
        a = np.ones((5, 5)) - np.eye(5)
        assert abs(loop_hafnian_trace(a)) < 1e-12

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            loop_hafnian(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_unknown_method(self):
        with pytest.raises(InputError):
            loop_hafnian(np.eye(2), method="magic")


class TestExpSeries:
    def test_matches_exponential_taylor(self):
        # exp(x) has [x^k] = 1/k!
        poly = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
        assert _exp_series_coefficient(poly, 4) == pytest.approx(1.0 / 24.0)

    def test_quadratic_exponent(self):
        # exp(x^2) has [x^4] = 1/2
        poly = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
        assert _exp_series_coefficient(poly, 4) == pytest.approx(0.5)


class TestAgreement:
    @given(st.integers(1, 8), st.integers(0, 10**6), st.booleans())
    def test_routes_agree(self, size, seed, complex_):
        a = _random_symmetric(seed, size, complex_)
        exact = loop_hafnian_enumerate(a)
        assert abs(loop_hafnian_trace(a) - exact) <= 1e-10 * max(1.0, abs(exact))

    @given(st.integers(2, 7), st.integers(0, 10**6))
    def test_permutation_invariance(self, size, seed):
        a = _random_symmetric(seed, size)
        perm = np.random.default_rng(seed).permutation(size)
        np.testing.assert_allclose(loop_hafnian(a[np.ix_(perm, perm)]), loop_hafnian(a), rtol=1e-10, atol=1e-12)

    def test_brute_force_definition(self):
        a = _random_symmetric(5, 5)

        def matchings(vertices):
            if not vertices:
                yield []
                return
            first, rest = vertices[0], vertices[1:]
            for m in matchings(rest):
                yield [(first, first)] + m
            for k, other in enumerate(rest):
                for m in matchings(rest[:k] + rest[k + 1:]):
                    yield [(first, other)] + m

        total = sum(np.prod([a[i, j] for i, j in m]) for m in matchings(list(range(5))))
        assert loop_hafnian_trace(a) == pytest.approx(total, rel=1e-12)

    def test_repeated_rows_mimic_photon_patterns(self):
        a = _random_symmetric(9, 2)
        idx = [0, 0, 1, 1, 1]
        sub = a[np.ix_(idx, idx)]
        assert loop_hafnian_trace(sub) == pytest.approx(loop_hafnian_enumerate(sub), rel=1e-12)

    def test_scaling_homogeneity(self):
        # lhaf(c*A) for even n with zero diagonal scales as c^(n/2)
        a = _random_symmetric(3, 6)
        np.fill_diagonal(a, 0.0)
        assert loop_hafnian(2.0 * a) == pytest.approx(8.0 * loop_hafnian(a), rel=1e-12)


def test_combinations_agree_exhaustively():
    # small exhaustive sweep over integer matrices
    for entries in itertools.product([-1.0, 0.0, 2.0], repeat=3):
        a = np.array([[entries[0], entries[1]], [entries[1], entries[2]]])
        assert loop_hafnian_trace(a) == pytest.approx(a[0, 0] * a[1, 1] + a[0, 1], abs=1e-14)
