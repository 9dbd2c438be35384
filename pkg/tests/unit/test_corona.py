"""
Unit tests for stopping constructions, corona regroupings and the stop form
"""

from fractions import Fraction

import numpy as np
import pytest

from constants.dini import dini_constant
from constants.profile import DiniProfile
from corona.bf import bf_function, bf_reduction_check, fluctuation, stop_form, stop_form_matrix
from corona.dini import dini_stopping_tree, nontrivial_dini_tree, packing_holds, stop_form_split
from corona.split import corona_projections, cz_corona_split
from corona.stopping import classify_pair, f_stopping_tree, j_star_family, quasi_orthogonality
from dyadic.families import leaf_positions
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.split import FormContext, split_form
from models.data_models import CoronaClass, DyadicInterval, GoodnessParams, Weight, WeightedFunction, WeightPair
from models.errors import ConfigurationError, DomainError
from models.forest import StoppingForest
from tests.conftest import make_pair


def random_functions(pair: WeightPair, seed: int):
    rng = np.random.default_rng(seed)
    f = WeightedFunction(pair.sigma, rng.standard_normal(len(pair.sigma)))
    phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))
    return f, phi


@pytest.fixture
def skewed_sigma():
    """σ with masses 0.7, 0.1, 0.1, 0.1 on the depth-2 leaves"""
    return Weight.from_arrays(leaf_positions(DyadicTree(2), "sigma"), [0.7, 0.1, 0.1, 0.1])


@pytest.mark.unit
class TestStoppingTree:
    """Test suite for Calderón–Zygmund stopping intervals"""

    def test_hand_example(self, skewed_sigma):
        """Test one stop where |f| concentrates"""
        tree = DyadicTree(2)
        f = WeightedFunction(skewed_sigma, [0.0, 0.0, 0.0, 10.0])
        forest = f_stopping_tree(skewed_sigma, f, tree.root, tree)

        assert forest.nodes() == [DyadicInterval(0, 0), DyadicInterval(1, 1)]
        assert forest.value[DyadicInterval(1, 1)] == pytest.approx(5.0)
        assert forest.packing[DyadicInterval.root()] == pytest.approx(0.2)
        assert quasi_orthogonality(forest, skewed_sigma, f, tree) == pytest.approx(0.6)

    def test_below_threshold(self):
        """Test that averages under four times the parent's do not stop"""
        tree = DyadicTree(2)
        sigma = make_pair("uniform", "uniform", 2).sigma
        f = WeightedFunction(sigma, [1.0, 1.0, 1.0, 9.0])

        assert len(f_stopping_tree(sigma, f, tree.root, tree)) == 1

    def test_constant_function(self, random_pair):
        """Test a constant f: the root alone, quasi-orthogonality 1"""
        tree = DyadicTree(5)
        f = WeightedFunction.constant(random_pair.sigma, 2.0)
        forest = f_stopping_tree(random_pair.sigma, f, tree.root, tree)

        assert forest.nodes() == [tree.root]
        assert quasi_orthogonality(forest, random_pair.sigma, f, tree) == pytest.approx(1.0)

    def test_quasi_orthogonality_bound(self):
        """Test Σγ(F)²σ(F) ≤ 64‖f‖² on heavy-tailed f"""
        tree = DyadicTree(7)
        pair = make_pair("random_masses", "random_masses", 7, seed=5)
        rng = np.random.default_rng(0)
        for _ in range(5):
            f = WeightedFunction(pair.sigma, rng.pareto(1.5, len(pair.sigma)))
            forest = f_stopping_tree(pair.sigma, f, tree.root, tree)
            assert forest.is_grid()
            assert quasi_orthogonality(forest, pair.sigma, f, tree) <= 64.0

    def test_massless_root(self):
        """Test that the root must carry σ mass"""
        tree = DyadicTree(3)
        sigma = Weight.from_arrays([Fraction(1, 12)], [1.0])
        f = WeightedFunction.constant(sigma, 1.0)

        with pytest.raises(DomainError):
            f_stopping_tree(sigma, f, DyadicInterval(1, 1), tree)


@pytest.mark.unit
class TestCoronaClasses:
    """Test suite for the corona classification"""

    def _forest(self):
        forest = StoppingForest(DyadicInterval.root())
        forest.add(DyadicInterval(2, 3), DyadicInterval.root(), 1.0)
        return forest

    def test_classes(self, params):
        """Test C_o and C_sup"""
        forest = self._forest()
        root = DyadicInterval.root()

        assert classify_pair(forest, root, DyadicInterval(4, 15), params) == CoronaClass.C_SUP
        assert classify_pair(forest, root, DyadicInterval(4, 0), params) == CoronaClass.C_O
        assert classify_pair(forest, DyadicInterval(1, 1), DyadicInterval(5, 31), params) == CoronaClass.C_O

    def test_invalid_pairs(self, params):
        """Test J outside the forest root and pairs that are not nested"""
        forest = StoppingForest(DyadicInterval(1, 0))

        with pytest.raises(DomainError):
            classify_pair(forest, DyadicInterval.root(), DyadicInterval(4, 15), params)
        with pytest.raises(DomainError):
            classify_pair(self._forest(), DyadicInterval(2, 0), DyadicInterval(3, 0), params)

    def test_j_star_family(self):
        """Test that J* intervals are disjoint, deep enough and owned by F"""
        params = GoodnessParams(0.45, 4)
        tree = DyadicTree(7)
        forest = self._forest()
        root = DyadicInterval.root()
        family = j_star_family(forest, root, params, tree)

        assert DyadicInterval(5, 7) in family
        assert DyadicInterval(5, 24) not in family
        for K in family:
            assert K.level >= params.r + 1
            assert forest.parent_of(K) == root
        for a in family:
            for b in family:
                assert a == b or not (a.contains(b) or b.contains(a))
        with pytest.raises(DomainError):
            j_star_family(forest, DyadicInterval(1, 0), params, tree)


@pytest.mark.unit
class TestCoronaSplit:
    """Test suite for the corona regrouping and projections"""

    def test_regrouping(self, params):
        """Test B₁ + B₂ + B₃ = B_⋐ along the stopping tree of f"""
        tree = DyadicTree(6)
        pair = make_pair("random_masses", "random_masses", 6, seed=8)
        f, phi = random_functions(pair, 1)
        forest = f_stopping_tree(pair.sigma, f, tree.root, tree, threshold=1.5)
        ctx = FormContext(pair, tree)

        report = cz_corona_split(pair, f, phi, forest, params, tree, ctx)
        split = split_form(pair, f, phi, params, tree, context=ctx)
        assert report.relative_residual <= 1e-9
        assert report.B_sub == pytest.approx(split.B_sub, rel=1e-9, abs=1e-12)
        assert len(report.per_stop) == len(forest)

    def test_projections(self, params):
        """Test the projection bookkeeping"""
        tree = DyadicTree(6)
        pair = make_pair("random_masses", "random_masses", 6, seed=8)
        f, phi = random_functions(pair, 2)
        forest = f_stopping_tree(pair.sigma, f, tree.root, tree, threshold=1.5)
        report = corona_projections(pair, f, phi, forest, tree)

        assert report.max_w_multiplicity <= 1
        assert report.max_sigma_multiplicity <= 2
        assert report.w_energy <= report.phi_norm_squared * (1 + 1e-9)
        assert report.sigma_energy <= 2 * report.f_norm_squared * (1 + 1e-9)
        assert report.w_orthogonality <= 1e-9


@pytest.mark.unit
class TestStopForm:
    """Test suite for the stop form and bounded fluctuation"""

    def test_whole_tree_is_nested_form(self, random_pair, params):
        """Test that without stops the stop form on the root is B_⋐"""
        tree = DyadicTree(5)
        f, phi = random_functions(random_pair, 3)

        value = stop_form(random_pair, f, phi, tree.root, params, tree)
        assert value == pytest.approx(split_form(random_pair, f, phi, params, tree).B_sub, rel=1e-9)

    def test_matrix(self, random_pair, params):
        """Test B_stop(f, g) = g·M·f with a stopping child"""
        tree = DyadicTree(5)
        forest = StoppingForest(tree.root)
        forest.add(DyadicInterval(2, 1), tree.root, 1.0)
        ctx = FormContext(random_pair, tree)
        f, phi = random_functions(random_pair, 4)

        M = stop_form_matrix(ctx, tree.root, params.r, forest)
        value = stop_form(random_pair, f, phi, tree.root, params, tree, forest, ctx)
        assert phi.values @ M @ f.values == pytest.approx(value, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("family", ["random", "spike", "two_level"])
    def test_bf_function(self, random_pair, family):
        """Test support, constancy on stopping children and unit fluctuation"""
        tree = DyadicTree(5)
        F = DyadicInterval(1, 0)
        forest = StoppingForest(F)
        child = DyadicInterval(3, 1)
        forest.add(child, F, 1.0)
        f = bf_function(random_pair, F, tree, np.random.default_rng(1), family, forest)
        index = TreeIndex(random_pair.sigma, tree)

        outside = np.ones(len(f.values), dtype=bool)
        outside[index.atom_slice(F)] = False
        assert np.all(f.values[outside] == 0.0)
        run = f.values[index.atom_slice(child)]
        assert np.allclose(run, run[0])
        assert fluctuation(f, F, tree, forest) == pytest.approx(1.0)

    def test_unknown_bf_family(self, random_pair):
        """Test an unknown bounded-fluctuation family"""
        with pytest.raises(DomainError):
            bf_function(random_pair, DyadicInterval.root(), DyadicTree(5), np.random.default_rng(0), "smooth")

    def test_bf_reduction(self, random_pair, params):
        """Test the telescoping and the B_stop/B_⋐ identity on F"""
        tree = DyadicTree(5)
        F = DyadicInterval(1, 1)
        rng = np.random.default_rng(9)
        f = bf_function(random_pair, F, tree, rng)
        g_values = np.zeros(len(random_pair.w))
        run = TreeIndex(random_pair.w, tree).atom_slice(F)
        g_values[run] = rng.standard_normal(run.stop - run.start)
        g = WeightedFunction(random_pair.w, g_values)

        report = bf_reduction_check(random_pair, F, f, g, params, tree)
        assert report.holds
        assert report.telescoping_residual <= 1e-9

    def test_bf_reduction_support(self, random_pair, params):
        """Test that f must be supported on F"""
        tree = DyadicTree(5)
        f, g = random_functions(random_pair, 0)

        with pytest.raises(DomainError):
            bf_reduction_check(random_pair, DyadicInterval(1, 1), f, g, params, tree)


@pytest.mark.unit
class TestDiniStopping:
    """Test suite for Dini stopping intervals and the stop-form split"""

    params = GoodnessParams(0.45, 2)

    def _setup(self):
        tree = DyadicTree(6)
        pair = make_pair("random_masses", "random_masses", 6, seed=4)
        profile = DiniProfile(self.params.epsilon)
        psi = dini_constant(pair, tree, profile, self.params)
        return tree, pair, profile, psi

    def test_packing(self):
        """Test Σσ(S) ≤ σ(I₀)/4 in every generation"""
        tree, pair, profile, psi = self._setup()
        assert psi > 0
        forest = dini_stopping_tree(pair, tree.root, profile, psi, self.params, tree)
        assert forest.kind == "dini"
        assert forest.is_grid()
        assert packing_holds(forest)

    def test_no_energy_no_stops(self):
        """Test that w without mass under F never stops"""
        tree = DyadicTree(5)
        sigma = make_pair("uniform", "uniform", 5).sigma
        right = [p for p in leaf_positions(tree, "w") if p > Fraction(1, 2)]
        pair = WeightPair(sigma, Weight.from_arrays(right, [1.0] * len(right)))

        forest = dini_stopping_tree(pair, DyadicInterval(1, 0), DiniProfile(0.45), 1.0, self.params, tree)
        assert len(forest) == 1

    def test_requires_positive_constant(self, random_pair):
        """Test that Ψ must be positive"""
        tree = DyadicTree(5)

        with pytest.raises(ConfigurationError):
            dini_stopping_tree(random_pair, tree.root, DiniProfile(0.45), 0.0, self.params, tree)

    def test_stop_form_split(self):
        """Test B_stop = Σ B₁ + B₂ − B₃ and |b_J| ≤ 2 for bounded fluctuation f"""
        tree, pair, profile, psi = self._setup()
        dini = dini_stopping_tree(pair, tree.root, profile, psi, self.params, tree, threshold=1.0)
        rng = np.random.default_rng(3)
        f = bf_function(pair, tree.root, tree, rng)
        phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))

        report = stop_form_split(pair, f, phi, tree.root, dini, self.params, tree)
        assert report.relative_residual <= 1e-9
        assert report.b_bounded
        assert report.B_stop == pytest.approx(stop_form(pair, f, phi, tree.root, self.params, tree), rel=1e-9, abs=1e-12)

    def test_nontrivial_tree_reaches_stop_form_split(self):
        """Test that a Dini forest with at least two intervals feeds the stop-form split"""
        tree, pair, profile, psi = self._setup()
        dini = nontrivial_dini_tree(pair, tree.root, profile, psi, self.params, tree)
        rng = np.random.default_rng(5)
        f = bf_function(pair, tree.root, tree, rng)
        phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))

        assert len(dini) >= 2
        assert dini.root == tree.root
        report = stop_form_split(pair, f, phi, tree.root, dini, self.params, tree)
        assert len(report.per_stop) == len(dini)
        assert report.relative_residual <= 1e-9
        assert report.B_stop == pytest.approx(stop_form(pair, f, phi, tree.root, self.params, tree), rel=1e-9, abs=1e-12)

    def test_nontrivial_tree_without_energy(self):
        """Test that the forest stays {F} when Ψ_w vanishes below F"""
        tree = DyadicTree(5)
        sigma = make_pair("uniform", "uniform", 5).sigma
        right = [p for p in leaf_positions(tree, "w") if p > Fraction(1, 2)]
        pair = WeightPair(sigma, Weight.from_arrays(right, [1.0] * len(right)))

        assert len(nontrivial_dini_tree(pair, DyadicInterval(1, 0), DiniProfile(0.45), 1.0, self.params, tree)) == 1

    def test_stop_form_split_root_mismatch(self, random_pair, params):
        """Test that the Dini forest must be rooted at F"""
        tree = DyadicTree(5)
        f, phi = random_functions(random_pair, 0)

        with pytest.raises(DomainError):
            stop_form_split(random_pair, f, phi, tree.root, StoppingForest(DyadicInterval(1, 0)), params, tree)
