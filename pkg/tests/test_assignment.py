import itertools

import numpy as np
import pytest

from geoad.assignment import AssignmentState, cardinality_matchings, solve_max_assignment
from geoad.exceptions import InfeasibleAssignmentError
from helpers import brute_assignment


@pytest.mark.parametrize("seed", range(120))
def test_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    rows = int(rng.integers(1, 6))
    cols = int(rng.integers(1, rows + 1))
    w = rng.random((rows, cols)) * 50
    if seed % 4 == 0:
        w = np.round(w)  # plenty of ties
    matching, value = solve_max_assignment(w)
    assert value == pytest.approx(brute_assignment(w), rel=1e-12, abs=1e-12)
    assert sorted(c for _, c in matching) == list(range(cols))
    assert len({r for r, _ in matching}) == cols
    assert value == pytest.approx(sum(w[r, c] for r, c in matching))


def test_incremental_state_tracks_every_prefix():
    rng = np.random.default_rng(3)
    w = rng.random((6, 5))
    state = AssignmentState(6)
    for c in range(5):
        state = state.add(w[:, c])
        assert state.value == pytest.approx(brute_assignment(w[:, : c + 1]))
        # row prices stay nonnegative, zero on rows never used
        assert np.all(-state.v >= -1e-12)


def test_state_is_persistent():
    w = np.array([[3.0, 1.0], [2.0, 2.0]])
    s1 = AssignmentState(2).add(w[:, 0])
    s2 = s1.add(w[:, 1])
    assert s1.value == 3.0 and s1.matching() == [(0, 0)]
    assert s2.value == 5.0


def test_too_many_columns():
    with pytest.raises(InfeasibleAssignmentError):
        solve_max_assignment(np.ones((2, 3)))
    matching, value = solve_max_assignment(np.array([[1.0, 5.0, 2.0]]), pad=True)
    assert matching == [(0, 1)] and value == 5.0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_max_assignment(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        solve_max_assignment(np.array([1.0, 2.0]))
    assert solve_max_assignment(np.zeros((3, 0))) == ([], 0.0)


def test_scale_invariant_choice():
    w = np.array([[4.0, 1.0, 0.5], [3.0, 3.0, 0.1], [0.0, 2.0, 2.0]])
    m1, v1 = solve_max_assignment(w)
    m2, v2 = solve_max_assignment(w * 1e6)
    assert m1 == m2 and v2 == pytest.approx(v1 * 1e6)


def _brute_cardinality(w, s):
    rows, cols = w.shape
    best = 0.0 if s == 0 else -np.inf
    for rs in itertools.permutations(range(rows), s):
        for cs in itertools.combinations(range(cols), s):
            best = max(best, sum(w[r, c] for r, c in zip(rs, cs)))
    return best


@pytest.mark.parametrize("seed", range(40))
def test_cardinality_matchings(seed):
    rng = np.random.default_rng(seed)
    w = rng.random((int(rng.integers(1, 5)), int(rng.integers(1, 5))))
    if seed % 3 == 0:
        w[:, -1] = w[:, 0]  # duplicate columns
    out = cardinality_matchings(w)
    for s in range(len(out)):
        assert out[s] == pytest.approx(_brute_cardinality(w, s), abs=1e-12)
