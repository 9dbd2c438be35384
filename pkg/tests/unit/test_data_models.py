"""
Unit tests for data models
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from models.data_models import (
    Atom,
    DyadicInterval,
    GoodnessParams,
    HaarCoefficients,
    PairClass,
    SignedDensity,
    Weight,
    WeightedFunction,
    WeightPair,
    format_position,
    parse_position,
)
from models.errors import ConfigurationError, DomainError, TwoWeightError
from models.forest import StoppingForest
from models.reports import CONSTANT_NAMES, CheckResult, ConstantsReport, SplitReport, safe_ratio, to_jsonable


@pytest.mark.unit
class TestDyadicInterval:
    """Test suite for DyadicInterval"""

    def test_endpoints(self):
        """Test exact endpoints, length and center"""
        interval = DyadicInterval(2, 1)

        assert interval.left == Fraction(1, 4)
        assert interval.right == Fraction(1, 2)
        assert interval.length == Fraction(1, 4)
        assert interval.center == Fraction(3, 8)
        assert str(interval) == "[1/4, 1/2)"

    def test_invalid_index(self):
        """Test that an index outside the level raises"""
        with pytest.raises(DomainError):
            DyadicInterval(2, 4)
        with pytest.raises(DomainError):
            DyadicInterval(-1, 0)

    def test_node_id_round_trip(self):
        """Test heap ids: root 0, children of n at 2n+1 and 2n+2"""
        assert DyadicInterval.root().node_id == 0
        assert DyadicInterval(1, 0).node_id == 1
        assert DyadicInterval(1, 1).node_id == 2
        assert DyadicInterval(2, 3).node_id == 6
        for node_id in range(63):
            assert DyadicInterval.from_node_id(node_id).node_id == node_id

    def test_children_and_parent(self):
        """Test children and parent"""
        interval = DyadicInterval(1, 1)

        assert interval.children() == (DyadicInterval(2, 2), DyadicInterval(2, 3))
        assert DyadicInterval(2, 3).parent() == interval
        assert DyadicInterval.root().parent() is None

    def test_ancestor(self):
        """Test ancestors at coarser levels"""
        interval = DyadicInterval(3, 5)

        assert interval.ancestor(1) == DyadicInterval(1, 1)
        assert interval.ancestor(3) == interval
        assert list(interval.ancestors()) == [DyadicInterval(2, 2), DyadicInterval(1, 1), DyadicInterval(0, 0)]
        with pytest.raises(DomainError):
            interval.ancestor(4)

    def test_containment(self):
        """Test contains, strictly_contains and child_containing"""
        root = DyadicInterval.root()
        inner = DyadicInterval(3, 5)

        assert root.contains(inner)
        assert root.strictly_contains(inner)
        assert inner.contains(inner)
        assert not inner.strictly_contains(inner)
        assert not DyadicInterval(1, 0).contains(inner)
        assert root.child_containing(inner) == DyadicInterval(1, 1)
        with pytest.raises(DomainError):
            inner.child_containing(inner)

    def test_triple_and_distance(self):
        """Test membership of 3I and distances between intervals"""
        interval = DyadicInterval(2, 1)

        assert interval.in_triple(DyadicInterval(2, 2))
        assert interval.in_triple(DyadicInterval(3, 0))
        assert not interval.in_triple(DyadicInterval(2, 3))
        assert not interval.in_triple(DyadicInterval.root())
        assert DyadicInterval(2, 0).distance(DyadicInterval(2, 3)) == Fraction(1, 2)
        assert interval.distance_to_point(Fraction(7, 8)) == Fraction(3, 8)

    def test_to_dict(self):
        """Test JSON form"""
        assert DyadicInterval(3, 5).to_dict() == {"level": 3, "index": 5}


@pytest.mark.unit
class TestPositions:
    """Test suite for exact position strings"""

    def test_format_and_parse(self):
        """Test that positions are written and read as exact fractions"""
        assert format_position(Fraction(5, 12)) == "5/12"
        assert parse_position("3/8") == Fraction(3, 8)
        assert parse_position(Fraction(1, 3)) == Fraction(1, 3)

    def test_float_position_rejected(self):
        """Test that floats never silently become positions"""
        with pytest.raises(ConfigurationError):
            parse_position(0.5)

    def test_invalid_position(self):
        """Test malformed position strings"""
        with pytest.raises(ConfigurationError):
            parse_position("three eighths")
        with pytest.raises(ConfigurationError):
            parse_position("1/0")


@pytest.mark.unit
class TestWeight:
    """Test suite for Atom and Weight"""

    def test_atom_validation(self):
        """Test atom position and mass checks"""
        with pytest.raises(DomainError):
            Atom(Fraction(1), 1.0)
        with pytest.raises(DomainError):
            Atom(Fraction(1, 2), 0.0)
        with pytest.raises(DomainError):
            Atom(Fraction(1, 2), math.nan)

    def test_from_arrays_sorts(self):
        """Test that from_arrays sorts atoms by position"""
        weight = Weight.from_arrays([Fraction(3, 4), Fraction(1, 8)], [2.0, 1.0])

        assert weight.exact_positions == (Fraction(1, 8), Fraction(3, 4))
        np.testing.assert_array_equal(weight.masses, [1.0, 2.0])
        assert weight.total_mass == 3.0
        assert len(weight) == 2

    def test_unsorted_atoms_rejected(self):
        """Test that atoms must be strictly increasing"""
        with pytest.raises(DomainError):
            Weight((Atom(Fraction(1, 2), 1.0), Atom(Fraction(1, 4), 1.0)))
        with pytest.raises(DomainError):
            Weight.from_arrays([Fraction(1, 4), Fraction(1, 4)], [1.0, 1.0])

    def test_length_mismatch(self):
        """Test from_arrays with mismatched inputs"""
        with pytest.raises(DomainError):
            Weight.from_arrays([Fraction(1, 4)], [1.0, 2.0])

    def test_interval_slice(self):
        """Test that atoms of a dyadic interval form a contiguous run"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(3, 8), Fraction(5, 8)], [1.0, 2.0, 3.0])

        assert weight.interval_slice(DyadicInterval(1, 0)) == slice(0, 2)
        assert weight.interval_slice(DyadicInterval(1, 1)) == slice(2, 3)
        assert weight.interval_slice(DyadicInterval(2, 3)) == slice(3, 3)

    def test_scaled_and_translate(self):
        """Test scaling and translation modulo 1"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [1.0, 3.0])

        assert weight.scaled(2.0).total_mass == 8.0
        moved = weight.translate(Fraction(1, 2))
        assert moved.exact_positions == (Fraction(1, 8), Fraction(5, 8))
        np.testing.assert_array_equal(moved.masses, [3.0, 1.0])
        with pytest.raises(DomainError):
            weight.scaled(0.0)

    def test_empty(self):
        """Test the empty weight"""
        weight = Weight.empty()

        assert weight.is_empty
        assert weight.total_mass == 0.0
        assert weight.positions.shape == (0,)

    def test_explicit_spec_lists_atoms(self):
        """Test that weights without a seed are written atom by atom"""
        weight = Weight.from_arrays([Fraction(1, 3)], [0.5])
        spec = weight.to_spec(4)

        assert spec["family"] == "explicit_atoms"
        assert spec["atoms"] == [{"pos": "1/3", "mass": 0.5}]


@pytest.mark.unit
class TestWeightPair:
    """Test suite for WeightPair"""

    def test_shared_position_rejected(self):
        """Test that σ and w may not share an atom"""
        sigma = Weight.from_arrays([Fraction(1, 3)], [1.0])
        w = Weight.from_arrays([Fraction(1, 3), Fraction(2, 3)], [1.0, 1.0])

        with pytest.raises(DomainError) as exc_info:
            WeightPair(sigma, w)
        assert "1/3" in str(exc_info.value)

    def test_swapped(self, single_atom_pair):
        """Test role swapping"""
        swapped = single_atom_pair.swapped()

        assert swapped.sigma == single_atom_pair.w
        assert swapped.w == single_atom_pair.sigma

    def test_errors_are_value_errors(self):
        """Test that lab errors derive from one base class"""
        assert issubclass(DomainError, TwoWeightError)
        assert issubclass(TwoWeightError, ValueError)


@pytest.mark.unit
class TestGoodnessParams:
    """Test suite for GoodnessParams"""

    def test_defaults(self):
        """Test default parameters"""
        params = GoodnessParams()

        assert params.epsilon == 0.2
        assert params.r == 2
        assert params.form == "children"
        assert params.to_dict() == {"epsilon": 0.2, "r": 2, "form": "children"}

    @pytest.mark.parametrize("epsilon", [0.0, 0.5, 0.7, -0.1])
    def test_invalid_epsilon(self, epsilon):
        """Test that ε must lie in (0, 1/2)"""
        with pytest.raises(ConfigurationError):
            GoodnessParams(epsilon, 2)

    def test_invalid_r_and_form(self):
        """Test r and goodness form validation"""
        with pytest.raises(ConfigurationError):
            GoodnessParams(0.2, 1)
        with pytest.raises(ConfigurationError):
            GoodnessParams(0.2, 2, "nearest")


@pytest.mark.unit
class TestFunctions:
    """Test suite for WeightedFunction and SignedDensity"""

    def test_norm_inner_integral(self):
        """Test L² quantities against hand values"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [1.0, 3.0])
        f = WeightedFunction(weight, [2.0, -1.0])
        g = WeightedFunction.constant(weight, 1.0)

        assert f.norm() == pytest.approx(math.sqrt(4.0 + 3.0))
        assert f.inner(g) == pytest.approx(-1.0)
        assert f.integral() == pytest.approx(-1.0)
        np.testing.assert_allclose((f + g).values, [3.0, 0.0])
        np.testing.assert_allclose((2 * f).values, [4.0, -2.0])

    def test_wrong_length(self):
        """Test that values must match the atoms"""
        weight = Weight.from_arrays([Fraction(1, 8)], [1.0])

        with pytest.raises(DomainError):
            WeightedFunction(weight, [1.0, 2.0])

    def test_density_restriction(self):
        """Test restriction to an interval and to its complement"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [1.0, 3.0])
        density = SignedDensity.of(weight)

        np.testing.assert_array_equal(density.restricted(DyadicInterval(1, 0)).atom_masses, [1.0, 0.0])
        np.testing.assert_array_equal(density.outside(DyadicInterval(1, 0)).atom_masses, [0.0, 3.0])

    def test_density_must_be_finite(self):
        """Test that multipliers must be finite"""
        weight = Weight.from_arrays([Fraction(1, 8)], [1.0])

        with pytest.raises(DomainError):
            SignedDensity(weight, [math.inf])


@pytest.mark.unit
class TestHaarCoefficients:
    """Test suite for HaarCoefficients"""

    def test_energy(self):
        """Test the Parseval side of the norm"""
        coefficients = HaarCoefficients(2.0, {DyadicInterval(0, 0): 1.0, DyadicInterval(1, 1): -2.0}, 0.5)

        assert coefficients.energy() == pytest.approx(7.0)
        assert coefficients.get(DyadicInterval(1, 0)) == 0.0
        assert coefficients.mean_zero().root_mean == 0.0

    def test_to_frame(self):
        """Test the tabular form"""
        frame = HaarCoefficients(0.0, {DyadicInterval(1, 1): 3.0, DyadicInterval(0, 0): 1.0}, 1.0).to_frame()

        assert list(frame.columns) == ["level", "index", "value"]
        assert frame["level"].tolist() == [0, 1]
        assert frame["value"].tolist() == [1.0, 3.0]

    def test_pair_class_coarsening(self):
        """Test that fine cascade classes roll up into P13"""
        assert PairClass.P22.coarse == PairClass.P13
        assert PairClass.B32.coarse == PairClass.P13
        assert PairClass.P12.coarse == PairClass.P12


@pytest.mark.unit
class TestStoppingForest:
    """Test suite for StoppingForest"""

    def _forest(self):
        forest = StoppingForest(DyadicInterval.root())
        forest.add(DyadicInterval(1, 1), DyadicInterval.root(), 5.0)
        forest.add(DyadicInterval(3, 6), DyadicInterval(1, 1), 30.0)
        return forest

    def test_structure(self):
        """Test nodes, children and generations"""
        forest = self._forest()

        assert len(forest) == 3
        assert forest.nodes() == [DyadicInterval(0, 0), DyadicInterval(1, 1), DyadicInterval(3, 6)]
        assert forest.children(DyadicInterval.root()) == [DyadicInterval(1, 1)]
        assert forest.generation(DyadicInterval(3, 6)) == 2
        assert forest.is_grid()

    def test_parent_of(self):
        """Test π: the smallest node containing an interval"""
        forest = self._forest()

        assert forest.parent_of(DyadicInterval(2, 3)) == DyadicInterval(1, 1)
        assert forest.parent_of(DyadicInterval(2, 0)) == DyadicInterval(0, 0)
        assert forest.parent_of(DyadicInterval(4, 13)) == DyadicInterval(3, 6)

    def test_parent_ids(self):
        """Test the vectorized parent map"""
        forest = self._forest()
        parents = forest.parent_ids(15)

        assert parents[DyadicInterval(2, 3).node_id] == DyadicInterval(1, 1).node_id
        assert parents[DyadicInterval(3, 6).node_id] == DyadicInterval(3, 6).node_id
        assert parents[DyadicInterval(3, 0).node_id] == 0

    def test_invalid_add(self):
        """Test that nodes must nest strictly inside a known parent"""
        forest = self._forest()

        with pytest.raises(DomainError):
            forest.add(DyadicInterval(1, 0), DyadicInterval(1, 1), 1.0)
        with pytest.raises(DomainError):
            forest.add(DyadicInterval(3, 0), DyadicInterval(2, 0), 1.0)

    def test_to_dict(self):
        """Test the nested JSON form"""
        data = self._forest().to_dict()

        assert data["kind"] == "cz"
        assert data["tree"]["level"] == 0
        assert data["tree"]["children"][0]["value"] == 5.0
        assert data["tree"]["children"][0]["children"][0]["index"] == 6


@pytest.mark.unit
class TestReports:
    """Test suite for report records"""

    def test_to_jsonable(self):
        """Test plain-JSON conversion of report values"""
        data = to_jsonable(
            {PairClass.P12: np.float64(1.5), "interval": DyadicInterval(1, 0), "pos": Fraction(1, 3), "arr": np.arange(2)}
        )

        assert data == {"P12": 1.5, "interval": {"level": 1, "index": 0}, "pos": "1/3", "arr": [0, 1]}

    def test_safe_ratio(self):
        """Test 0/0 and x/0"""
        assert safe_ratio(1.0, 2.0) == 0.5
        assert safe_ratio(0.0, 0.0) == 0.0
        assert safe_ratio(1.0, 0.0) == math.inf

    def test_constants_report(self):
        """Test named constants with provenance"""
        report = ConstantsReport()
        report.set("H", 2.0, "exact")
        report.set("B_sub_norm", 1.0, "exact")
        report.set("B_sup_norm", 1.0, "exact")
        report.set("B_norm", 4.0, "exact")

        assert report.provenance["H"].value == "exact"
        assert report.ratios()["(B_sub+B_sup)/B"] == pytest.approx(0.5)
        assert set(report.row()) >= set(CONSTANT_NAMES)
        assert report.to_dict()["values"]["H"] == 2.0
        with pytest.raises(KeyError):
            report.set("not_a_constant", 1.0, "exact")

    def test_split_report_residuals(self):
        """Test residuals of a consistent cascade"""
        report = SplitReport(
            B=6.0, B11=1.0, B12=2.0, B13=3.0, B21=0.5, B22=0.5, B23=2.0, B31=1.5, B32=0.5, B_sub=0.5, B_sup=0.0
        )

        assert all(value == 0.0 for value in report.residuals.values())
        assert report.max_relative_residual == 0.0
        assert report.to_dict()["residuals"]["B=B11+B12+B13"] == 0.0

    def test_check_result_to_dict(self):
        """Test check rows"""
        row = CheckResult(suite="lemmas", check="schur", seed=3, family="uniform|uniform", passed=True, value=1.0)

        data = row.to_dict()
        assert data["assertable"] is True
        assert data["instance_path"] is None
        assert data["family"] == "uniform|uniform"
