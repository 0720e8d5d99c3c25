import pytest

from geoad.verify import PROPERTIES, check_ae, check_dsic, run_suite, suite_instance


@pytest.mark.parametrize("prop", PROPERTIES)
def test_suites_pass_on_a_few_seeds(prop):
    rep = run_suite(prop, range(6))
    assert rep.passed, rep.violations
    assert rep.checked > 0


def test_restricted_solver_instances_are_skipped_not_failed():
    rep = run_suite("ae", range(12), algorithms=("dp",))
    assert rep.passed and rep.skipped > 0 and rep.checked + rep.skipped == 12


def test_unknown_property():
    with pytest.raises(KeyError):
        run_suite("nope", range(1))


def test_checks_detect_a_bad_allocator():
    # one ad per path is not efficient once a second ad adds welfare
    from geoad.solvers import SolveOptions
    flagged = [s for s in range(10) if check_ae(suite_instance(s), "fa", SolveOptions(mbar=1))]
    assert flagged
    assert all(check_ae(suite_instance(s), "fe") == [] for s in flagged)


def test_dsic_grid_runs():
    assert check_dsic(suite_instance(3), "fe", grid=5) == []
