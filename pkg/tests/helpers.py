"""Shared builders and comparisons for the test modules."""
from __future__ import annotations

import itertools

import numpy as np

from geoad import Advertiser, FatigueModel, Instance, chain_tree
from geoad.instances import random_small_instance
from geoad.model import prefix_count

REL = 1e-9


def rel_close(a: float, b: float, rel: float = REL) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def chain_instance(values, lam) -> Instance:
    """Chain instance with ``values[a][j]`` as r*q, realized with reward 1."""
    values = np.asarray(values, dtype=float)
    scale = max(1.0, float(values.max(initial=0.0)))
    k = values.shape[1]
    advs = tuple(Advertiser(scale, {j: float(v) / scale for j, v in enumerate(row)})
                 for row in values)
    lams = [lam] * k if np.isscalar(lam) else list(lam)
    return Instance(advs, FatigueModel(lams), chain_tree(k))


def nonincreasing(instance: Instance, seed: int) -> Instance:
    """Same instance with a nonincreasing continuation sequence: a constant
    one on even seeds, the original draws sorted downward on odd ones."""
    lams = sorted(instance.fatigue.lambdas, reverse=True)
    if seed % 2 == 0:
        lams = [lams[len(lams) // 2]] * len(lams)
    return Instance(instance.advertisers, FatigueModel(lams), instance.tree)


def small_cases(count: int, tree: bool, max_nodes: int = 6, max_ads: int = 4, offset: int = 0,
                monotone: bool = False):
    """``count`` seeded instances with up to ``max_nodes`` nodes and ``max_ads`` ads."""
    for seed in range(offset, offset + count):
        rng = np.random.default_rng(10_000 + seed)
        n = int(rng.integers(1, max_nodes + 1))
        a = int(rng.integers(1, max_ads + 1))
        inst = random_small_instance(seed, a, n, tree=tree, zero_prob=0.25 * (seed % 3 == 0))
        yield seed, nonincreasing(inst, seed) if monotone else inst


def brute_assignment(w) -> float:
    """Max-value matching of every column to a distinct row, by enumeration."""
    w = np.asarray(w, dtype=float)
    rows, cols = w.shape
    best = -np.inf
    for perm in itertools.permutations(range(rows), cols):
        best = max(best, sum(w[r, c] for c, r in enumerate(perm)))
    return float(best)


def delta_predicate(instance: Instance, delta: float):
    """Plans whose every allocated node sees a continuation of at least ``delta``."""
    lam = instance.continuation
    tree = instance.tree

    def ok(plan):
        return all(lam[prefix_count(plan, tree, n)] >= delta for n in plan)
    return ok
