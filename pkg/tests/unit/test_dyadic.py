"""
Unit tests for the dyadic tree, masses, goodness and weight families
"""

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic.families import WeightFamilySpec, cantor_kept, doubling_masses, generate_weight, leaf_positions, weight_from_spec
from dyadic.goodness import goodness_mask, is_good, is_good_pair, pair_goodness_offsets
from dyadic.measure import TreeIndex, mass, translate_pair
from dyadic.tree import DyadicTree, build_tree
from models.data_models import DyadicInterval, GoodnessParams, Weight
from models.errors import ConfigurationError, DomainError


@pytest.mark.unit
class TestDyadicTree:
    """Test suite for DyadicTree"""

    def test_sizes(self):
        """Test interval counts"""
        assert DyadicTree(1).size == 3
        assert len(list(DyadicTree(3).intervals())) == 15
        tree = DyadicTree(10)
        assert tree.size == 2047
        assert build_tree(2) == DyadicTree(2)
        assert DyadicInterval(10, 0).length == Fraction(1, 1024)

    @pytest.mark.parametrize("depth", [0, 25, -1])
    def test_invalid_depth(self, depth):
        """Test that depth must lie in [1, 24]"""
        with pytest.raises(ConfigurationError):
            DyadicTree(depth)

    def test_check(self):
        """Test membership and the out-of-tree error"""
        tree = DyadicTree(3)

        assert DyadicInterval(3, 7) in tree
        assert tree.check(DyadicInterval(2, 1)) == DyadicInterval(2, 1)
        assert tree.is_leaf(DyadicInterval(3, 0))
        with pytest.raises(DomainError):
            tree.check(DyadicInterval(4, 0))

    def test_heap_arrays(self):
        """Test the per-node arrays agree with the intervals"""
        tree = DyadicTree(4)

        for interval in tree.intervals():
            node = interval.node_id
            assert tree.node_levels[node] == interval.level
            assert tree.node_indices[node] == interval.index
            assert tree.node_lefts[node] == float(interval.left)
            assert tree.node_lengths[node] == float(interval.length)

    def test_subtree(self):
        """Test subtree enumeration and subtree ids"""
        tree = DyadicTree(3)
        interval = DyadicInterval(1, 1)

        assert len(list(tree.subtree(interval))) == 7
        ids = tree.subtree_ids(interval, 3)
        assert [DyadicInterval.from_node_id(int(n)) for n in ids] == [DyadicInterval(3, k) for k in range(4, 8)]
        assert tree.level_ids(2).tolist() == [3, 4, 5, 6]


@pytest.mark.unit
class TestMass:
    """Test suite for masses and the tree index"""

    def test_mass(self):
        """Test mass on dyadic intervals"""
        weight = Weight.from_arrays([Fraction(1, 4)], [1.0])

        assert mass(weight, DyadicInterval(1, 0)) == 1.0
        assert mass(weight, DyadicInterval(1, 1)) == 0.0

        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [0.25, 0.75])
        assert mass(weight, DyadicInterval.root()) == 1.0

    def test_tree_index_matches_mass(self, random_pair):
        """Test that node masses agree with direct summation"""
        tree = DyadicTree(5)
        index = TreeIndex(random_pair.sigma, tree)
        masses = index.node_masses()

        for interval in tree.intervals():
            assert masses[interval.node_id] == pytest.approx(mass(random_pair.sigma, interval), abs=1e-12)
            assert index.mass(interval) == pytest.approx(masses[interval.node_id], abs=1e-12)
        assert index.resolves

    def test_endpoint_atom_rejected(self):
        """Test that an atom on a depth-D endpoint is not resolved by the tree"""
        weight = Weight.from_arrays([Fraction(1, 4)], [1.0])

        with pytest.raises(DomainError):
            TreeIndex(weight, DyadicTree(2))

    def test_membership(self):
        """Test the atom indicator of an interval"""
        weight = Weight.from_arrays([Fraction(1, 8), Fraction(5, 8)], [1.0, 1.0])
        index = TreeIndex(weight, DyadicTree(3))

        assert index.membership(DyadicInterval(1, 1)).tolist() == [0.0, 1.0]
        assert index.atom_slice(DyadicInterval(1, 0)) == slice(0, 1)

    def test_translate_pair(self, uniform_pair):
        """Test grid translation and the incompatible shift error"""
        tree = DyadicTree(4)
        moved = translate_pair(uniform_pair, Fraction(1, 16), tree)

        assert moved.sigma.total_mass == pytest.approx(1.0)
        with pytest.raises(ConfigurationError):
            translate_pair(uniform_pair, Fraction(11, 12), DyadicTree(2))


@pytest.mark.unit
class TestGoodness:
    """Test suite for goodness"""

    def test_bad_interval(self):
        """Test an interval touching the boundary of its parent's parent"""
        assert not is_good(DyadicInterval(4, 7), GoodnessParams(0.25, 2), DyadicTree(10))

    def test_coarse_intervals_are_good(self, params):
        """Test that levels up to r are always good"""
        tree = DyadicTree(6)
        for level in range(params.r + 1):
            for interval in tree.level(level):
                assert is_good(interval, params, tree)

    def test_pair_goodness(self):
        """Test two-interval goodness"""
        root = DyadicInterval.root()
        params = GoodnessParams(0.45, 2)

        assert is_good_pair(root, DyadicInterval(1, 0), params)
        assert not is_good_pair(root, DyadicInterval(4, 0), params)
        assert is_good_pair(root, DyadicInterval(4, 6), params)
        with pytest.raises(DomainError):
            is_good_pair(DyadicInterval(1, 0), DyadicInterval(2, 3), params)

    def test_pair_offsets_match_pairs(self, params):
        """Test the vectorized pair mask"""
        offsets = pair_goodness_offsets(5, params)
        root = DyadicInterval.root()

        assert offsets.tolist() == [is_good_pair(root, DyadicInterval(5, k), params) for k in range(32)]

    @pytest.mark.property
    @settings(max_examples=40, deadline=None)
    @given(
        depth=st.integers(min_value=1, max_value=9),
        epsilon=st.floats(min_value=0.01, max_value=0.49),
        r=st.integers(min_value=2, max_value=4),
        form=st.sampled_from(["children", "boundary"]),
    )
    def test_mask_matches_is_good(self, depth, epsilon, r, form):
        """Test that goodness_mask agrees with is_good on every interval"""
        tree = DyadicTree(depth)
        params = GoodnessParams(epsilon, r, form)
        mask = goodness_mask(tree, params)

        for interval in tree.intervals():
            assert bool(mask[interval.node_id]) == is_good(interval, params, tree)


@pytest.mark.unit
class TestFamilies:
    """Test suite for weight families"""

    def test_uniform_positions(self):
        """Test σ positions one third into each leaf"""
        weight = generate_weight(WeightFamilySpec.parse("uniform"), DyadicTree(2), 0, "sigma")

        assert weight.exact_positions == (Fraction(1, 12), Fraction(4, 12), Fraction(7, 12), Fraction(10, 12))
        assert weight.masses.tolist() == [0.25] * 4

    def test_sides_never_collide(self):
        """Test that σ and w leaf positions are disjoint"""
        tree = DyadicTree(5)

        assert not set(leaf_positions(tree, "sigma")) & set(leaf_positions(tree, "w"))
        with pytest.raises(ConfigurationError):
            leaf_positions(tree, "nu")

    def test_cantor(self):
        """Test the Cantor family keeping outer quarters"""
        weight = generate_weight(WeightFamilySpec.parse("cantor:2"), DyadicTree(2), 0, "sigma")

        assert weight.exact_positions == (Fraction(1, 12), Fraction(10, 12))
        assert weight.masses.tolist() == [0.5, 0.5]
        assert cantor_kept(4).sum() == 4

    def test_power_normalized(self):
        """Test power masses sum to one"""
        weight = generate_weight(WeightFamilySpec.parse("power:0.5"), DyadicTree(4), 0, "w")

        assert weight.total_mass == pytest.approx(1.0)
        assert np.all(np.diff(weight.masses) > 0)

    def test_seeded_random_is_reproducible(self):
        """Test that one seed gives one weight"""
        tree = DyadicTree(5)
        spec = WeightFamilySpec.parse("random_masses")

        assert generate_weight(spec, tree, 7, "sigma") == generate_weight(spec, tree, 7, "sigma")
        assert generate_weight(spec, tree, 7, "sigma") != generate_weight(spec, tree, 8, "sigma")

    def test_doubling_floor(self):
        """Test that every split keeps at least √c of the parent's mass on each side"""
        masses = doubling_masses(6, 0.1, np.random.default_rng(0))
        low = np.sqrt(0.1)

        assert masses.sum() == pytest.approx(1.0)
        level = masses
        for _ in range(6):
            parents = level.reshape(-1, 2).sum(axis=1)
            share = level.reshape(-1, 2)[:, 0] / parents
            assert np.all(share >= low - 1e-12)
            assert np.all(share <= 1 - low + 1e-12)
            level = parents

    @pytest.mark.parametrize("family", ["power:-2000", "doubling:0.5", "random_masses:0", "cantor:1.5", "gaussian"])
    def test_invalid_parameters(self, family):
        """Test family parameter validation"""
        with pytest.raises(ConfigurationError):
            generate_weight(WeightFamilySpec.parse(family), DyadicTree(4), 0, "sigma")

    def test_label(self):
        """Test family labels"""
        assert WeightFamilySpec.parse("power:0.5").label == "power:0.5"
        assert WeightFamilySpec.parse("uniform").label == "uniform"
        assert WeightFamilySpec.parse("explicit_atoms:w.json").source == "w.json"
        with pytest.raises(ConfigurationError):
            WeightFamilySpec.parse("power:steep")

    def test_explicit_atoms_file(self, temp_dir):
        """Test loading atoms from a weight spec file"""
        path = temp_dir / "atoms.json"
        path.write_text(json.dumps({"atoms": [{"pos": "2/3", "mass": 2.0}, {"pos": "1/3", "mass": 1.0}]}))

        weight = generate_weight(WeightFamilySpec.parse(f"explicit_atoms:{path}"), DyadicTree(3))
        assert weight.exact_positions == (Fraction(1, 3), Fraction(2, 3))

        path.write_text(json.dumps({"atoms": [{"pos": 0.5, "mass": 1.0}]}))
        with pytest.raises(ConfigurationError):
            generate_weight(WeightFamilySpec.parse(f"explicit_atoms:{path}"), DyadicTree(3))

    def test_spec_round_trip(self):
        """Test that a seeded weight is rebuilt from its spec"""
        tree = DyadicTree(5)
        weight = generate_weight(WeightFamilySpec.parse("random_masses:0.5"), tree, 4, "w")

        rebuilt = weight_from_spec(weight.to_spec(tree.depth))
        assert rebuilt == weight
        assert rebuilt.side == "w"

        explicit = Weight.from_arrays([Fraction(1, 3)], [0.5])
        assert weight_from_spec(explicit.to_spec(3)) == explicit
