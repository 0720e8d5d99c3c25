import pytest

from geoad import Plan, brute_force_optimal, brute_force_restricted, named_fixture
from geoad.exceptions import EnumerationLimitExceeded
from geoad.instances import random_small_instance
from geoad.oracle import EnumerationGuard, iter_valid_plans
from helpers import chain_instance


def test_counts_valid_plans_on_a_chain():
    # 2 ads on 2 nodes: empty, 4 single placements, 2 orderings of both
    inst = chain_instance([[1, 1], [1, 1]], 0.5)
    assert len(list(iter_valid_plans(inst))) == 7


def test_counts_valid_plans_on_a_tree():
    inst = random_small_instance(0, 2, 3, tree=True)
    plans = list(iter_valid_plans(inst))
    assert len(set(plans)) == len(plans)
    assert Plan() in plans


def test_example_optimum():
    plan, sw = brute_force_optimal(named_fixture("example2"))
    assert plan == Plan({2: 0}) and sw == pytest.approx(100.0)


def test_restricted_and_empty_predicate():
    inst = named_fixture("table1a", lam=1.0)
    plan, sw = brute_force_restricted(inst, lambda p: len(p) <= 1)
    assert plan == Plan({1: 1}) and sw == pytest.approx(4.0)
    assert brute_force_restricted(inst, lambda p: False) == (Plan(), 0.0)


def test_tie_goes_to_fewer_ads():
    inst = chain_instance([[0, 0]], 1.0)
    assert brute_force_optimal(inst)[0] == Plan()


def test_guard():
    inst = random_small_instance(1, 5, 9)
    with pytest.raises(EnumerationLimitExceeded):
        brute_force_optimal(inst, EnumerationGuard(max_nodes=8))
