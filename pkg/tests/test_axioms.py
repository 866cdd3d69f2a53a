import pytest

from qcluster.axioms import (
    EXPECTED,
    GRID_FUNCTIONS,
    GRID_PROPERTIES,
    LabSettings,
    PropertyName,
    Verdict,
    check_consistency,
    check_k_richness,
    check_mct_consistency,
    check_mst_consistency,
    check_order_invariance,
    check_scale_invariance,
    expected_pattern,
    expected_verdict,
    is_clustering_function,
    matches_expectation,
    run_suite,
    verdict_grid,
)
from qcluster.clusterers import (
    PartitionPermutation,
    PartitioningFunction,
    constant_layout,
    get_function,
    max_sum_approx,
    max_sum_exact,
    mct_cuts_member,
)
from qcluster.errors import OracleSizeError
from qcluster.similarity import Partitioning

from .conftest import TEST_SEED

SMALL = LabSettings(trials=150, tree_trials=60, seed=TEST_SEED, n_range=(4, 7), k_values=(2,))


def _assert_rechecks(report, F):
    assert report.verdict is Verdict.VIOLATED
    assert report.counterexample is not None
    assert report.counterexample.recheck(F)


class TestScaleInvariance:
    @pytest.mark.parametrize("name", ["sl", "maxsum", "constant"])
    def test_holds(self, name):
        report = check_scale_invariance(get_function(name), trials=100, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED
        assert report.trials == 100
        assert report.counterexample is None

    def test_threshold_control_is_caught(self):
        F = get_function("threshold")
        report = check_scale_invariance(F, trials=200, seed=TEST_SEED)
        _assert_rechecks(report, F)
        assert report.counterexample.detail.startswith("alpha=")


class TestConsistency:
    @pytest.mark.parametrize("name", ["sl", "constant"])
    def test_holds(self, name):
        report = check_consistency(get_function(name), trials=150, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED

    def test_max_sum_holds_for_two_blocks(self):
        report = check_consistency(get_function("maxsum"), trials=150, seed=TEST_SEED, k_values=(2,))
        assert report.verdict is Verdict.SATISFIED

    def test_max_sum_trials_default_to_two_blocks(self):
        F = get_function("maxsum")
        assert F.trial_k == (2,)
        assert get_function("mct-cuts").trial_k == (2,)
        assert get_function("sl").trial_k is None
        assert check_consistency(F, trials=300, seed=TEST_SEED).verdict is Verdict.SATISFIED

    def test_iterated_cut_is_not_consistent_beyond_two_blocks(self):
        # without trial_k every trial draws k from 2..n-1
        unrestricted = PartitioningFunction("maxsum-any-k", max_sum_approx)
        report = check_consistency(unrestricted, trials=1000, seed=TEST_SEED)
        _assert_rechecks(report, unrestricted)
        assert report.counterexample.k >= 3

    @pytest.mark.parametrize("k", [3, 4])
    def test_exact_max_sum_holds_beyond_two_blocks(self, k):
        exact = PartitioningFunction("maxsum-exact", max_sum_exact)
        report = check_consistency(exact, trials=40, seed=TEST_SEED, n_range=(5, 7), k_values=(k,))
        assert report.verdict is Verdict.SATISFIED
        assert report.trials == 40

    def test_swapped_member_is_caught(self):
        sigma = PartitionPermutation.from_relabeling(4, 2, {1: 2, 2: 1})
        F = mct_cuts_member(sigma)
        report = check_consistency(F, trials=300, seed=TEST_SEED, n_range=(4, 4), k_values=(2,))
        _assert_rechecks(report, F)
        ce = report.counterexample
        assert len(ce.instances) == 2
        assert ce.k == 2

    def test_same_seed_same_report(self):
        F = get_function("mst-cuts")
        first = check_consistency(F, trials=100, seed=TEST_SEED)
        second = check_consistency(F, trials=100, seed=TEST_SEED)
        assert first == second


class TestRichness:
    def test_single_linkage_reaches_every_two_block_layout(self):
        report = check_k_richness(get_function("sl"), n=5, k=2, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED
        assert report.note == "all 15 partitionings attained"

    def test_max_sum_reaches_every_three_block_layout(self):
        report = check_k_richness(get_function("maxsum"), n=5, k=3, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED
        assert report.note == "all 25 partitionings attained"

    def test_constant_is_structurally_poor(self):
        F = get_function("constant")
        report = check_k_richness(F, n=5, k=2, budget=20, seed=TEST_SEED)
        _assert_rechecks(report, F)
        ce = report.counterexample
        assert ce.structural
        assert ce.actual == constant_layout(5, 2) == Partitioning.of([[1, 2, 3, 4], [5]])

    def test_misses_without_a_structural_hook_are_inconclusive(self):
        layout = PartitioningFunction("layout-only", lambda s, k: constant_layout(s.n, k))
        report = check_k_richness(layout, n=4, k=2, budget=5, seed=TEST_SEED)
        assert report.verdict is Verdict.INCONCLUSIVE
        assert "not attained within budget 5" in report.note

    def test_size_limit(self):
        with pytest.raises(OracleSizeError):
            check_k_richness(get_function("sl"), n=9, k=2)


class TestTreeConsistency:
    def test_single_linkage_is_mst_consistent(self):
        report = check_mst_consistency(get_function("sl"), trials=60, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED

    def test_max_sum_is_mct_consistent(self):
        report = check_mct_consistency(get_function("maxsum"), trials=40, seed=TEST_SEED, n_range=(4, 7))
        assert report.verdict is Verdict.SATISFIED

    def test_mct_premise_rarely_discards(self):
        report = check_mct_consistency(get_function("constant"), trials=60, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED
        assert report.discarded * 4 <= report.trials + report.discarded

    def test_mct_cuts_member_is_mct_consistent(self):
        report = check_mct_consistency(get_function("mct-cuts"), trials=40, seed=TEST_SEED)
        assert report.verdict is Verdict.SATISFIED

    def test_max_sum_is_not_mst_consistent(self):
        F = get_function("maxsum")
        _assert_rechecks(check_mst_consistency(F, trials=200, seed=TEST_SEED, k_values=(2,)), F)

    def test_single_linkage_is_not_mct_consistent(self):
        F = get_function("sl")
        _assert_rechecks(check_mct_consistency(F, trials=60, seed=TEST_SEED, n_range=(4, 7)), F)

    def test_order_invariance_separates_the_two(self):
        assert check_order_invariance(get_function("sl"), trials=100, seed=TEST_SEED).satisfied
        F = get_function("maxsum")
        _assert_rechecks(check_order_invariance(F, trials=300, seed=TEST_SEED, k_values=(2,)), F)


class TestExpectations:
    def test_grid_rows(self):
        pattern = expected_pattern()
        assert pattern["sl"] == (True, True, True, False)
        assert pattern["mct-cuts"] == (False, True, False, True)
        assert pattern["constant"] == (True, False, True, True)

    def test_every_grid_cell_has_a_claim(self):
        for name in GRID_FUNCTIONS:
            for prop in GRID_PROPERTIES:
                assert prop in EXPECTED[name]

    def test_unknown_cells_always_match(self):
        assert expected_verdict("threshold", PropertyName.CONSISTENCY) is None
        report = check_scale_invariance(get_function("threshold"), trials=1, seed=TEST_SEED)
        assert report.function_name == "threshold"
        assert expected_verdict("threshold", PropertyName.SCALE_INVARIANCE) is Verdict.VIOLATED
        assert matches_expectation(report) is (report.verdict is Verdict.VIOLATED)


def test_suite_for_single_linkage():
    reports = run_suite(get_function("sl"), SMALL)
    assert [r.property_name for r in reports] == [
        PropertyName.SCALE_INVARIANCE,
        PropertyName.K_RICHNESS,
        PropertyName.CONSISTENCY,
        PropertyName.MST_CONSISTENCY,
        PropertyName.MCT_CONSISTENCY,
    ]
    assert all(matches_expectation(r) for r in reports)
    assert run_suite(get_function("sl"), SMALL, extended=True)[-1].property_name is PropertyName.ORDER_INVARIANCE


def test_single_linkage_is_a_clustering_function():
    verdict = is_clustering_function(get_function("sl"), trials=100, seed=TEST_SEED)
    assert verdict.is_clustering_function
    assert not is_clustering_function(get_function("constant"), trials=20, seed=TEST_SEED).is_clustering_function


def test_grid_with_small_settings():
    grid = verdict_grid(SMALL)
    assert grid.total == 20
    assert grid.matches, grid.summary()
    assert grid.pattern() == expected_pattern()
    assert grid.summary() == "grid matches expected pattern: 20/20"
    for report in grid.cells():
        if report.verdict is Verdict.VIOLATED:
            assert report.counterexample.recheck(get_function(report.function_name))


def test_grid_with_default_ranges_and_fewer_trials():
    # default n range and k draws; only the trial counts are cut down
    grid = verdict_grid(LabSettings(trials=300, tree_trials=80, seed=TEST_SEED))
    assert grid.summary() == "grid matches expected pattern: 20/20"
    assert grid.reports["maxsum"][PropertyName.CONSISTENCY].verdict is Verdict.SATISFIED
    for report in grid.cells():
        if report.verdict is Verdict.VIOLATED:
            assert report.counterexample.recheck(get_function(report.function_name))


@pytest.mark.slow
def test_grid_with_default_settings():
    grid = verdict_grid(LabSettings(seed=TEST_SEED))
    assert grid.matches, grid.summary()
