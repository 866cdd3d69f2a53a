import math

import pytest
from hypothesis import given

from qcluster.errors import (
    InvalidInstanceError,
    InvalidKError,
    InvalidPointError,
    InvalidScalarError,
    OracleSizeError,
    ShapeError,
)
from qcluster.similarity import (
    EdgeClass,
    Partitioning,
    SimilarityInstance,
    canonical_order,
    canonical_pairs,
    classify_edge,
    crossing_weight,
    enumerate_partitionings,
    gamma_transform_sample,
    is_gamma_transform,
    iter_partitionings,
    lambda_objective,
    monotone_transform,
    pair_count,
    pair_index,
    random_instance,
    richness_witness,
    scale,
)

from .conftest import sweep
from .strategies import PROPERTY_SETTINGS, instances, partitionings

SPLIT_12_3 = Partitioning.of([[1, 2], [3]])


def _stirling(n, k):
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, min(i, k) + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table[n][k]


class TestInstance:
    def test_weight_lookup_is_symmetric(self, t3):
        assert t3.weight(1, 2) == t3.weight(2, 1) == 3.0
        assert t3.weight(3, 2) == 1.0

    def test_pair_index_matches_lexicographic_layout(self):
        pairs = [(i, j) for i in range(1, 7) for j in range(i + 1, 7)]
        assert [pair_index(6, i, j) for i, j in pairs] == list(range(pair_count(6)))

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_non_positive_or_non_finite_weights(self, bad):
        with pytest.raises(InvalidInstanceError):
            SimilarityInstance(3, (1.0, bad, 1.0))

    def test_rejects_single_point_and_missing_pairs(self):
        with pytest.raises(InvalidInstanceError):
            SimilarityInstance(1, ())
        with pytest.raises(InvalidInstanceError):
            SimilarityInstance.from_pairs(3, {(1, 2): 1.0, (1, 3): 1.0})

    def test_out_of_range_point(self, t3):
        with pytest.raises(InvalidPointError):
            t3.weight(1, 4)

    def test_from_matrix_and_matrix_round_trip(self, t3):
        again = SimilarityInstance.from_matrix(t3.matrix)
        assert again == t3
        assert t3.matrix[0, 1] == 3.0 and t3.matrix[2, 0] == 2.0

    def test_restrict_relabels_points(self, p4):
        sub = p4.restrict([2, 3, 4])
        assert sub.n == 3
        assert sub.weight(1, 2) == 9.0
        assert sub.weight(2, 3) == 8.0
        assert sub.weight(1, 3) == 1.0


class TestCanonicalOrder:
    def test_strict_weights(self, t3):
        order = canonical_order(t3)
        assert [(e.pair, e.weight) for e in order] == [((1, 2), 3.0), ((1, 3), 2.0), ((2, 3), 1.0)]

    def test_ties_fall_back_to_lexicographic_pairs(self):
        s = SimilarityInstance(3, (1.0, 1.0, 1.0))
        assert canonical_pairs(s) == ((1, 2), (1, 3), (2, 3))

    def test_sorts_descending(self):
        s = SimilarityInstance.from_pairs(3, {(1, 2): 1.0, (1, 3): 5.0, (2, 3): 2.0})
        assert [(e.pair, e.weight) for e in canonical_order(s)] == [((1, 3), 5.0), ((2, 3), 2.0), ((1, 2), 1.0)]

    @PROPERTY_SETTINGS
    @given(instances(tied=True))
    def test_is_deterministic_and_complete(self, s):
        order = canonical_order(s)
        assert order == canonical_order(SimilarityInstance(s.n, s.weights))
        assert len(order) == pair_count(s.n)
        keys = [(-e.weight, e.u, e.v) for e in order]
        assert keys == sorted(keys)


class TestScale:
    def test_multiplies_weights(self, t3):
        assert scale(t3, 2).weights == (6.0, 4.0, 2.0)

    def test_identity(self, t3):
        assert scale(t3, 1) == t3

    def test_preserves_pair_sequence(self, t3):
        assert canonical_pairs(scale(t3, 0.5)) == canonical_pairs(t3)

    @pytest.mark.parametrize("alpha", [0, -2.0, math.nan])
    def test_rejects_non_positive_factor(self, t3, alpha):
        with pytest.raises(InvalidScalarError):
            scale(t3, alpha)

    @PROPERTY_SETTINGS
    @given(instances(tied=True))
    def test_pair_sequence_invariant_under_any_factor(self, s):
        for alpha in (1e-3, 0.25, 7.5, 1e3):
            assert canonical_pairs(scale(s, alpha)) == canonical_pairs(s)


class TestEdgeClasses:
    def test_inner_and_outer(self):
        assert classify_edge((1, 2), SPLIT_12_3) is EdgeClass.INNER
        assert classify_edge((1, 3), SPLIT_12_3) is EdgeClass.OUTER
        assert classify_edge((3, 1), SPLIT_12_3) is EdgeClass.OUTER

    def test_single_block_makes_everything_inner(self):
        whole = Partitioning.of([[1, 2, 3, 4]])
        assert all(classify_edge((i, j), whole) is EdgeClass.INNER for i in range(1, 5) for j in range(i + 1, 5))

    def test_out_of_range_endpoint(self):
        with pytest.raises(InvalidPointError):
            classify_edge((1, 4), SPLIT_12_3)

    @PROPERTY_SETTINGS
    @given(partitionings(n=7))
    def test_classes_split_the_edge_set(self, gamma):
        pairs = [(i, j) for i in range(1, 8) for j in range(i + 1, 8)]
        inner = sum(1 for p in pairs if classify_edge(p, gamma) is EdgeClass.INNER)
        outer = sum(1 for p in pairs if classify_edge(p, gamma) is EdgeClass.OUTER)
        assert inner + outer == pair_count(7)


class TestPartitioning:
    def test_canonical_form(self):
        gamma = Partitioning.of([[3, 1], [4], [2, 5]])
        assert gamma.blocks == ((1, 3), (2, 5), (4,))
        assert gamma == Partitioning.of([[5, 2], [1, 3], [4]])
        assert gamma.k == 3 and gamma.n == 5

    @pytest.mark.parametrize("blocks", [[[1, 2], [2, 3]], [[1, 2], [4]], [[1], []]])
    def test_rejects_invalid_blocks(self, blocks):
        with pytest.raises(InvalidInstanceError):
            Partitioning.of(blocks)

    def test_relabel(self):
        gamma = Partitioning.of([[1, 3], [2]])
        assert gamma.relabel({1: 2, 2: 1}) == Partitioning.of([[2, 3], [1]])


class TestGammaTransforms:
    def test_identity_is_a_transformation(self, t3):
        assert is_gamma_transform(t3, t3, SPLIT_12_3)

    def test_raise_inner_lower_outer(self, t3):
        s_prime = t3.replace({(1, 2): 5.0, (1, 3): 1.5})
        assert is_gamma_transform(t3, s_prime, SPLIT_12_3)

    def test_lowered_inner_pair_is_rejected(self, t3):
        s_prime = t3.replace({(1, 2): 2.9})
        assert not is_gamma_transform(t3, s_prime, SPLIT_12_3)

    def test_size_mismatch(self, t3, p4):
        with pytest.raises(ShapeError):
            is_gamma_transform(t3, p4, SPLIT_12_3)

    def test_sampler_always_produces_transformations(self, stream):
        rng = stream("gamma-sampler")
        for _ in range(1000):
            n = int(rng.integers(3, 9))
            s = random_instance(n, rng)
            gamma = Partitioning.from_labels([int(x) for x in rng.integers(0, 3, size=n)])
            s_prime = gamma_transform_sample(s, gamma, rng)
            assert is_gamma_transform(s, s_prime, gamma)
            assert min(s_prime.weights) > 0

    def test_sampler_is_deterministic_per_stream(self, t3, stream):
        first = gamma_transform_sample(t3, SPLIT_12_3, stream("same"))
        second = gamma_transform_sample(t3, SPLIT_12_3, stream("same"))
        assert first == second


class TestRichnessWitness:
    def test_three_points(self):
        s = richness_witness(SPLIT_12_3, 3)
        assert s.weight(1, 2) == 36.0
        assert s.weight(1, 3) == s.weight(2, 3) == 1.0

    def test_inner_pair_outweighs_all_outer_pairs(self):
        for gamma in enumerate_partitionings(6, 3):
            s = richness_witness(gamma, 6)
            outer = sum(w for (i, j), w in s.items() if not gamma.same_block(i, j))
            inner = [w for (i, j), w in s.items() if gamma.same_block(i, j)]
            assert min(inner) > outer

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            richness_witness(SPLIT_12_3, 4)


class TestEnumeration:
    @pytest.mark.parametrize("n, k, count", [(3, 2, 3), (4, 2, 7), (5, 3, 25), (5, 5, 1)])
    def test_counts(self, n, k, count):
        assert len(enumerate_partitionings(n, k)) == count

    def test_all_singletons(self):
        (only,) = enumerate_partitionings(4, 4)
        assert only.blocks == ((1,), (2,), (3,), (4,))

    def test_counts_match_stirling_numbers(self):
        top = sweep(8, 10)
        for n in range(1, top + 1):
            for k in range(1, n + 1):
                assert sum(1 for _ in iter_partitionings(n, k)) == _stirling(n, k)

    def test_members_are_distinct_and_canonical(self):
        members = enumerate_partitionings(6, 3)
        assert len(set(members)) == len(members)
        assert all(gamma.k == 3 and gamma.n == 6 for gamma in members)

    def test_order_is_deterministic(self):
        assert enumerate_partitionings(5, 2) == enumerate_partitionings(5, 2)

    @pytest.mark.parametrize("k", [0, 4])
    def test_bad_k(self, k):
        with pytest.raises(InvalidKError):
            enumerate_partitionings(3, k)

    def test_size_limit(self):
        with pytest.raises(OracleSizeError):
            next(iter_partitionings(15, 2))


class TestRandomInstances:
    def test_same_stream_same_instance(self, stream):
        assert random_instance(6, stream("draw", 3)) == random_instance(6, stream("draw", 3))
        assert random_instance(6, stream("draw", 3)) != random_instance(6, stream("draw", 4))

    def test_weights_in_unit_interval(self, stream):
        s = random_instance(9, stream("unit"))
        assert all(0 < w <= 1 for w in s.weights)

    def test_no_ties_in_practice(self, stream):
        rng = stream("ties")
        for _ in range(1000):
            s = random_instance(8, rng)
            assert len(set(s.weights)) == len(s.weights)

    def test_monotone_transform_keeps_order(self, stream):
        rng = stream("monotone")
        for _ in range(50):
            s = random_instance(7, rng)
            assert canonical_pairs(monotone_transform(s, rng)) == canonical_pairs(s)


@PROPERTY_SETTINGS
@given(instances(min_n=3, max_n=7))
def test_inner_and_crossing_weight_add_up_to_total(s):
    for gamma in enumerate_partitionings(s.n, 2)[:10]:
        assert math.isclose(lambda_objective(s, gamma) + crossing_weight(s, gamma), s.total_weight(), rel_tol=1e-12)
