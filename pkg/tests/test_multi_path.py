import pytest

from geoad import (Plan, brute_force_optimal, brute_force_restricted, build_tree, f_am,
                   f_em, f_mp_plan, social_welfare)
from geoad.exceptions import (EnumerationLimitExceeded, PreconditionError,
                              SearchBudgetExceeded, SearchTimeout)
from geoad.instances import GenConfig, generate_instance
from geoad.multi_path import (BnbNode, branch_bound_upper, f_am_detail, relaxed_upper,
                              search_space_size, split_shared)
from geoad.oracle import iter_valid_plans
from geoad.tree import Path
from helpers import rel_close, small_cases

TREES = list(small_cases(80, tree=True, max_nodes=7))


@pytest.mark.parametrize("seed,inst", TREES)
def test_f_em_matches_oracle(seed, inst):
    _, best = brute_force_optimal(inst)
    assert rel_close(social_welfare(inst, f_em(inst)), best)


def test_f_mp_on_its_domain():
    checked = 0
    for seed, inst in TREES:
        try:
            plan = f_mp_plan(inst)
        except PreconditionError:
            continue
        checked += 1
        assert rel_close(social_welfare(inst, plan), brute_force_optimal(inst)[1])
    assert checked >= 5


@pytest.mark.parametrize("seed,inst", TREES[:40])
def test_f_am_is_best_single_path_plan(seed, inst):
    tree = inst.tree
    plan, sw, p = f_am_detail(inst, exact_per_path=True)
    assert set(plan.nodes()) <= set(tree.nodes_of_path(p))
    on_some_path = [set(tree.nodes_of_path(q)) for q in range(tree.num_paths)]
    _, best = brute_force_restricted(
        inst, lambda pl: any(set(pl.nodes()) <= s for s in on_some_path))
    assert rel_close(sw, best)
    assert rel_close(social_welfare(inst, plan), sw)
    assert social_welfare(inst, f_am(inst, mbar=1)) <= sw + 1e-9


@pytest.mark.parametrize("seed,inst", TREES[:30])
def test_upper_bounds_are_admissible(seed, inst):
    plans = list(iter_valid_plans(inst))
    for frontier in range(inst.num_nodes + 1):
        # best completion of each distinct partial decision
        best: dict[Plan, float] = {}
        for plan in plans:
            part = Plan({n: a for n, a in plan.items() if n < frontier})
            sw = social_welfare(inst, plan, check=False)
            best[part] = max(best.get(part, 0.0), sw)
        for part, sw in list(best.items())[:20]:
            state = BnbNode(frontier, part)
            assert relaxed_upper(inst, state) >= sw - 1e-9
            assert branch_bound_upper(inst, state) >= relaxed_upper(inst, state) - 1e-9


def test_split_shared():
    t = build_tree([Path(0.4, "abcd"), Path(0.3, "abe"), Path(0.3, "af")])
    shared, chains = split_shared(t)
    # a and b branch; c-d, e, f hang below
    assert [t.nodes[n].vertex for n in shared] == ["a", "b"]
    assert sorted("".join(t.nodes[n].vertex for n in c) for c in chains) == ["cd", "e", "f"]
    chain = build_tree([Path(1.0, "xyz")])
    assert split_shared(chain) == ([], [(0, 1, 2)])


def test_single_path_tree_agrees_with_single_path_solver():
    from geoad import f_e
    inst = generate_instance(GenConfig(seed=2, num_nodes=8, num_ads=6))
    assert rel_close(social_welfare(inst, f_em(inst)), social_welfare(inst, f_e(inst)))


def test_budget_timeout_and_size_guard():
    inst = generate_instance(GenConfig(seed=1, num_paths=8, num_ads=30))
    with pytest.raises(SearchBudgetExceeded) as err:
        f_em(inst, budget=1)
    res = err.value.result
    assert not res.optimal and res.sw >= social_welfare(inst, f_am(inst, mbar=2)) - 1e-9
    with pytest.raises(SearchTimeout) as err:
        f_em(inst, deadline=0.0)
    assert err.value.result is not None
    assert search_space_size(inst) > 10
    with pytest.raises(EnumerationLimitExceeded):
        f_em(inst, max_space_log10=5.0)


def test_f_am_needs_mbar():
    inst = generate_instance(GenConfig(seed=1, num_paths=3, num_ads=5))
    with pytest.raises(ValueError):
        f_am(inst)
