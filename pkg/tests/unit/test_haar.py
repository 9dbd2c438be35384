"""
Unit tests for the weighted Haar basis
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from dyadic.families import WeightFamilySpec, generate_weight
from dyadic.tree import DyadicTree
from haar.basis import HaarBasis, analyze, expectation, haar_function, martingale_difference, project_good, synthesize
from models.data_models import DyadicInterval, GoodnessParams, HaarCoefficients, Weight, WeightedFunction
from models.errors import DomainError, UndefinedHaarError


@pytest.fixture
def two_atoms():
    """Masses 1 at 1/8 and 3 at 5/8"""
    return Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [1.0, 3.0])


@pytest.mark.unit
class TestHaarFunction:
    """Test suite for haar_function"""

    def test_values(self, two_atoms):
        """Test hand values of h_I on two unequal atoms"""
        h = haar_function(two_atoms, DyadicInterval.root())

        assert h.values[0] == pytest.approx(math.sqrt(3) / 2)
        assert h.values[1] == pytest.approx(-1 / (2 * math.sqrt(3)))
        assert h.norm() == pytest.approx(1.0)
        assert h.integral() == pytest.approx(0.0, abs=1e-15)

    def test_equal_masses(self):
        """Test that two equal half masses give ±1"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [0.5, 0.5])
        h = haar_function(weight, DyadicInterval.root())

        np.testing.assert_allclose(h.values, [1.0, -1.0])

    def test_undefined(self, two_atoms):
        """Test that a massless child leaves h_I undefined"""
        with pytest.raises(UndefinedHaarError):
            haar_function(two_atoms, DyadicInterval(1, 0))

    def test_expectation(self, two_atoms):
        """Test averages on intervals"""
        f = WeightedFunction(two_atoms, [4.0, 0.0])

        assert expectation(two_atoms, f, DyadicInterval.root()) == pytest.approx(1.0)
        assert expectation(two_atoms, f, DyadicInterval(1, 0)) == pytest.approx(4.0)
        assert expectation(two_atoms, f, DyadicInterval(2, 1)) == 0.0

    def test_martingale_difference(self, random_pair):
        """Test Δ_I of a constant and the identity Δ_I f = ⟨f, h_I⟩h_I"""
        sigma = random_pair.sigma
        tree = DyadicTree(5)
        interval = DyadicInterval(2, 1)

        constant = WeightedFunction.constant(sigma, 3.0)
        np.testing.assert_allclose(martingale_difference(sigma, constant, interval).values, 0.0, atol=1e-12)

        f = WeightedFunction(sigma, np.random.default_rng(0).standard_normal(len(sigma)))
        h = haar_function(sigma, interval)
        delta = martingale_difference(sigma, f, interval, tree)
        np.testing.assert_allclose(delta.values, f.inner(h) * h.values, atol=1e-10)

        with pytest.raises(DomainError):
            martingale_difference(sigma, f, DyadicInterval(5, 0), tree)


@pytest.mark.unit
class TestHaarBasis:
    """Test suite for HaarBasis, analyze and synthesize"""

    def test_orthonormal_columns(self, random_pair):
        """Test that the columns are orthonormal in L²(σ)"""
        sigma = random_pair.sigma
        basis = HaarBasis(sigma, DyadicTree(5))
        gram = basis.matrix.T @ (sigma.masses[:, None] * basis.matrix)

        np.testing.assert_allclose(gram, np.eye(len(basis)), atol=1e-10)
        assert basis.resolved

    def test_columns_match_haar_function(self, random_pair):
        """Test the dense matrix against haar_function"""
        sigma = random_pair.sigma
        basis = HaarBasis(sigma, DyadicTree(5))

        for column, interval in enumerate(basis.intervals[:10]):
            np.testing.assert_allclose(basis.matrix[:, column], haar_function(sigma, interval).values)

    def test_constant_has_no_coefficients(self, random_pair):
        """Test analysis of a constant"""
        sigma = random_pair.sigma
        coefficients = analyze(sigma, WeightedFunction.constant(sigma, 2.5), DyadicTree(5))

        assert coefficients.root_mean == pytest.approx(2.5)
        assert all(abs(value) < 1e-12 for value in coefficients.coeffs.values())

    def test_analyze_haar_function(self, random_pair):
        """Test that h_I has coefficient 1 at I and 0 elsewhere"""
        sigma = random_pair.sigma
        interval = DyadicInterval(3, 2)
        coefficients = analyze(sigma, haar_function(sigma, interval), DyadicTree(5))

        assert coefficients.get(interval) == pytest.approx(1.0)
        others = [abs(v) for I, v in coefficients.coeffs.items() if I != interval]
        assert max(others, default=0.0) < 1e-10

    def test_parseval_and_synthesis(self):
        """Test ‖f‖² = energy and synthesize ∘ analyze = identity"""
        tree = DyadicTree(4)
        sigma = generate_weight(WeightFamilySpec.parse("random_masses"), tree, 11, "sigma")
        f = WeightedFunction(sigma, np.random.default_rng(1).standard_normal(len(sigma)))
        coefficients = analyze(sigma, f, tree)

        assert coefficients.energy() == pytest.approx(f.norm() ** 2, rel=1e-10)
        np.testing.assert_allclose(synthesize(coefficients, sigma, tree).values, f.values, atol=1e-10)

    def test_child_bound(self, random_pair):
        """Test |E_{I±}h_I|·m±^{1/2} ≤ 1"""
        basis = HaarBasis(random_pair.w, DyadicTree(5))

        assert np.all(basis.child_bound() <= 1.0 + 1e-12)

    def test_foreign_coefficient(self, two_atoms):
        """Test that a coefficient on an interval without h_I is rejected"""
        coefficients = HaarCoefficients(0.0, {DyadicInterval(1, 0): 1.0}, 4.0)
        with pytest.raises(DomainError):
            synthesize(coefficients, two_atoms, DyadicTree(2))


@pytest.mark.unit
class TestProjectGood:
    """Test suite for project_good"""

    def test_identity_on_coarse_tree(self, two_atoms):
        """Test that every interval of a shallow tree is good"""
        tree = DyadicTree(2)
        f = WeightedFunction(two_atoms, [1.0, -2.0])
        coefficients = analyze(two_atoms, f, tree)

        assert project_good(coefficients, GoodnessParams(0.2, 2), tree).coeffs == coefficients.coeffs

    def test_drops_bad_intervals(self, random_pair, params):
        """Test that bad intervals lose their coefficients"""
        tree = DyadicTree(5)
        sigma = random_pair.sigma
        f = WeightedFunction(sigma, np.random.default_rng(2).standard_normal(len(sigma)))
        projected = project_good(analyze(sigma, f, tree), params, tree)
        basis = HaarBasis(sigma, tree)
        good = dict(zip(basis.intervals, basis.good_columns(params)))

        assert projected.coeffs
        assert all(good[interval] for interval in projected.coeffs)
        assert DyadicInterval(4, 0) not in projected.coeffs
