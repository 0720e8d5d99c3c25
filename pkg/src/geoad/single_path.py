"""Allocation functions for a single path (a chain-shaped tree).

``f_e`` is exact: it enumerates the set ``B`` of nodes that receive an ad
and solves one assignment problem per set, with values discounted by the
fatigue each node in ``B`` suffers.  ``f_a`` caps ``|B|`` at ``mbar`` and is
maximal in range.  ``f_a2`` ignores fatigue altogether.  ``f_dp_distinct_maximal``
and ``f_dp_general`` are dynamic programs for the case where every node
prefers a different ad, and for the general case via conflict enumeration.

Node values are weighted by the node's visit probability, so the same code
serves the per-path subproblems of the multi-path approximation.
"""
from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from .assignment import AssignmentState, cardinality_matchings, solve_max_assignment
from .exceptions import PreconditionError, SearchTimeout
from .model import Instance, Plan

_SLACK = 1e-12


def chain_nodes(instance: Instance) -> tuple[int, ...]:
    """Node ids of a chain-shaped tree, root first."""
    tree = instance.tree
    if not tree.is_chain():
        raise PreconditionError("tree is not a single path; use the multi-path solvers")
    out = [tree.root]
    while tree.children(out[-1]):
        out.append(tree.children(out[-1])[0])
    return tuple(out)


def weighted_values(instance: Instance, nodes: Sequence[int]) -> np.ndarray:
    """``alpha_n * r_a * q_{a,n}`` for the given nodes, shape ``(ads, len(nodes))``."""
    idx = list(nodes)
    return instance.values[:, idx] * instance.alphas[idx]


def _relaxed_suffix(vmax: np.ndarray, lam: np.ndarray, cap: int) -> np.ndarray:
    """``out[c, j]``: best value of positions ``j..`` given ``c`` ads already
    shown, if every node could use its best ad regardless of repeats."""
    k = len(vmax)
    out = np.zeros((cap + 2, k + 1))
    for j in range(k - 1, -1, -1):
        for c in range(cap):
            out[c, j] = max(out[c, j + 1], lam[c] * vmax[j] + out[c + 1, j + 1])
        out[cap, j] = 0.0
    return out


def _matching_suffix(w: np.ndarray, lam: np.ndarray, cap: int) -> np.ndarray:
    """``out[c, j]``: bound on positions ``j..`` given ``c`` ads already shown,
    honouring that ads are distinct but ignoring their order.

    With ``T_s`` the top-``s`` values of a suffix plan and ``MW_s`` the best
    ``s``-edge matching, the nonincreasing discounts give
    ``sum_t L_{c+t-1} x_t <= sum_{s<M} (L_{c+s-1} - L_{c+s}) MW_s + L_{c+M-1} MW_M``.
    """
    n_ads, k = w.shape
    out = np.zeros((cap + 2, k + 1))
    for j in range(k - 1, -1, -1):
        mw = cardinality_matchings(w[:, j:].T, cap)
        for c in range(cap):
            size = min(cap - c, len(mw) - 1)
            if size <= 0:
                continue
            disc = lam[c:c + size]
            steps = disc[:-1] - disc[1:]
            out[c, j] = float(steps @ mw[1:size] + disc[-1] * mw[size])
    return out


def _priced_suffix(w: np.ndarray, z: np.ndarray, disc: np.ndarray, start: int):
    """Repeats-allowed bound on positions ``start..`` where showing ad ``a``
    as the ``d``-th further ad at position ``j`` earns ``disc[d] * w[a, j] - z[a]``.

    Returns ``(gain, out)``: ``gain[d, j]`` is the best single choice and
    ``out[d, j]`` the best total over positions ``j..`` with ``d`` further
    ads already placed (``j`` counted from ``start``).
    """
    depth = len(disc)
    gain = np.maximum((disc[:, None, None] * w[None, :, start:] - z[None, :, None]).max(axis=1), 0.0)
    k = gain.shape[1]
    out = np.zeros((depth + 1, k + 1))
    for j in range(k - 1, -1, -1):
        out[:depth, j] = np.maximum(out[:depth, j + 1], gain[:, j] + out[1:, j + 1])
    return gain, out


def subset_search(w: np.ndarray, lam: np.ndarray, max_size: int,
                  deadline: float | None = None, floor: float | None = None):
    """Best plan over a chain with at most ``max_size`` ads.

    ``w[a, j]`` is the undiscounted value of ad ``a`` at position ``j``.
    Subsets ``B`` are visited in lexicographic order.  Extending ``B`` only
    appends later positions, which leaves the discounts inside ``B``
    unchanged, so the assignment for ``B + (j,)`` is the one for ``B`` plus a
    single augmentation.

    Pruning: with ``z`` the row prices of the assignment for ``B`` (zero on
    unmatched ads), no extension beats ``AP(B)`` plus the best the remaining
    positions could add, repeats allowed, when each further ad ``a`` is
    charged ``z[a]``.  A static
    bound that ignores ``B`` is also applied.  Position ``j`` is never the
    next element after a skipped position ``i`` whose column dominates it:
    taking ``i`` instead keeps every rank, loses no value and gives a
    lexicographically smaller set.

    Returns ``(position, ad)`` pairs and the welfare.  With a positive
    ``floor`` only plans worth at least ``floor`` are of interest, and
    ``None`` is returned when there is none.
    """
    n_ads, k = w.shape
    max_size = min(max_size, k, n_ads)
    if floor is not None and floor <= 0.0:
        floor = None
    if max_size <= 0:
        return ([], 0.0) if floor is None else None
    vmax = w.max(axis=0)
    relax = np.minimum(_relaxed_suffix(vmax, lam, max_size), _matching_suffix(w, lam, max_size))
    # latest earlier position whose column dominates column j, or -1
    dominator = [max((i for i in range(j) if np.all(w[:, i] >= w[:, j])), default=-1)
                 for j in range(k)]

    # without a floor the empty plan is the first incumbent
    found = floor is None
    best_sw = 0.0 if floor is None else floor
    best_set: tuple[int, ...] = ()
    best_state = None
    visits = 0

    def extend(subset, state, start):
        nonlocal best_sw, best_set, best_state, visits, found
        c = len(subset)
        base = state.value
        gain, out = _priced_suffix(w, -state.v, lam[c:max_size], start)
        for j in range(start, k):
            thresh = best_sw - _SLACK * max(1.0, best_sw)
            jj = j - start
            if base + min(relax[c, j], out[0, jj]) < thresh:
                break
            if dominator[j] >= start:
                continue
            rest = min(lam[c] * vmax[j] + relax[c + 1, j + 1], gain[0, jj] + out[1, jj + 1])
            if base + rest < thresh:
                continue
            visits += 1
            if deadline is not None and visits % 256 == 0 and time.monotonic() > deadline:
                raise SearchTimeout("subset enumeration passed its deadline")
            nxt = subset + (j,)
            nstate = state.add(lam[c] * w[:, j])
            sw = nstate.value
            if not found:
                if sw >= thresh:
                    found = True
                    best_sw, best_set, best_state = sw, nxt, nstate
            elif sw > best_sw or (sw == best_sw and (len(nxt), nxt) < (len(best_set), best_set)):
                best_sw, best_set, best_state = sw, nxt, nstate
            if c + 1 < max_size:
                extend(nxt, nstate, j + 1)

    extend((), AssignmentState(n_ads), 0)
    if not found:
        return None
    if best_state is None:
        return [], 0.0
    ads = [r for r, _ in best_state.matching()]
    return list(zip(best_set, ads)), float(best_sw)


def _plan_from_positions(nodes, pairs) -> Plan:
    return Plan({nodes[j]: a for j, a in pairs})


def f_e(instance: Instance, deadline: float | None = None) -> Plan:
    """Welfare-maximizing plan on a single path.

    Ties go to fewer ads, then the lexicographically smallest node set.
    """
    nodes = chain_nodes(instance)
    pairs, _ = subset_search(weighted_values(instance, nodes), instance.continuation,
                             len(nodes), deadline)
    return _plan_from_positions(nodes, pairs)


def f_a(instance: Instance, mbar: int, deadline: float | None = None) -> Plan:
    """Best plan showing at most ``mbar`` ads on the path."""
    if mbar < 1:
        raise ValueError("mbar must be at least 1")
    nodes = chain_nodes(instance)
    pairs, _ = subset_search(weighted_values(instance, nodes), instance.continuation,
                             mbar, deadline)
    return _plan_from_positions(nodes, pairs)


def f_a2(instance: Instance) -> Plan:
    """Fatigue-blind plan: one assignment problem on ``r_a * q_{a,n}``.

    Fills ``min(|N|, |A|)`` slots.  Not monotone, so it admits no truthful
    payments.
    """
    nodes = chain_nodes(instance)
    w = weighted_values(instance, nodes)
    if w.shape[0] == 0:
        return Plan()
    if w.shape[0] >= w.shape[1]:
        matching, _ = solve_max_assignment(w)
        return Plan({nodes[j]: a for a, j in matching})
    matching, _ = solve_max_assignment(w.T)
    return Plan({nodes[j]: a for j, a in matching})


def maximal_ad(instance: Instance, n: int) -> int:
    """Ad with the largest ``r_a * q_{a,n}`` at node ``n``; lowest index on ties."""
    if instance.num_ads == 0:
        raise ValueError("empty catalog")
    if not 0 <= n < instance.num_nodes:
        raise KeyError(f"unknown tree node {n}")
    return int(np.argmax(instance.values[:, n]))


def dp_tables(vmax: Sequence[float], ads: Sequence[int | None], lam: np.ndarray):
    """Backward dynamic program over a chain where each node has one
    candidate ad.

    ``pi[i, j]`` is the best value of positions ``j..`` when ``i`` ads were
    shown before ``j``; ``phi[i, j]`` the matching ``(position, ad)`` set.
    The last node always takes its ad when it has one; elsewhere ties leave
    the node empty.  A node whose candidate is ``None`` cannot be filled.
    """
    k = len(vmax)
    pi = np.zeros((k + 1, k + 1))
    phi: dict[tuple[int, int], tuple] = {}
    last = k - 1
    for i in range(k):
        if ads[last] is None:
            pi[i, last], phi[i, last] = 0.0, ()
        else:
            pi[i, last] = lam[i] * vmax[last]
            phi[i, last] = ((last, ads[last]),)
    for j in range(k - 2, -1, -1):
        for i in range(j + 1):
            skip = pi[i, j + 1]
            if ads[j] is None:
                pi[i, j], phi[i, j] = skip, phi[i, j + 1]
                continue
            take = lam[i] * vmax[j] + pi[i + 1, j + 1]
            if skip >= take:
                pi[i, j], phi[i, j] = skip, phi[i, j + 1]
            else:
                pi[i, j], phi[i, j] = take, ((j, ads[j]),) + phi[i + 1, j + 1]
    return pi, phi


def _distinct(ads) -> bool:
    real = [a for a in ads if a is not None]
    return len(real) == len(set(real))


def f_dp_distinct_maximal(instance: Instance) -> Plan:
    """Exact plan when every node of the path has a different maximal ad."""
    nodes = chain_nodes(instance)
    if instance.num_ads == 0:
        return Plan()
    w = weighted_values(instance, nodes)
    ads = [int(a) for a in w.argmax(axis=0)]
    if not _distinct(ads):
        raise PreconditionError(
            "an ad is maximal in more than one node; use f_dp_general instead"
        )
    _, phi = dp_tables(w.max(axis=0), ads, instance.continuation)
    return _plan_from_positions(nodes, phi[0, 0])


def f_dp_general(instance: Instance) -> Plan:
    """Exact plan on a path by enumerating ways to resolve maximal-ad conflicts.

    An ad maximal at several nodes is kept at one of them and struck from the
    others, branching over the choice, until every node has its own maximal
    ad; the distinct-maximal program then solves each branch.
    """
    nodes = chain_nodes(instance)
    n_ads = instance.num_ads
    if n_ads == 0:
        return Plan()
    w = weighted_values(instance, nodes)
    lam = instance.continuation
    k = len(nodes)
    memo: dict[tuple, tuple[float, Plan]] = {}

    def best_of(allowed: tuple[frozenset, ...]) -> tuple[float, Plan]:
        if allowed in memo:
            return memo[allowed]
        ads: list[int | None] = []
        for j in range(k):
            cands = sorted(allowed[j])
            ads.append(max(cands, key=lambda a: (w[a, j], -a)) if cands else None)
        where: dict[int, list[int]] = {}
        for j, a in enumerate(ads):
            if a is not None:
                where.setdefault(a, []).append(j)
        conflicts = sorted(a for a, js in where.items() if len(js) > 1)
        if not conflicts:
            vmax = [w[a, j] if a is not None else 0.0 for j, a in enumerate(ads)]
            pi, phi = dp_tables(vmax, ads, lam)
            out = (float(pi[0, 0]), _plan_from_positions(nodes, phi[0, 0]))
        else:
            a = conflicts[0]
            out = None
            for keep in where[a]:
                nxt = tuple(
                    allowed[j] - {a} if (j in where[a] and j != keep) else allowed[j]
                    for j in range(k)
                )
                cand = best_of(nxt)
                if out is None or cand[0] > out[0] or (
                    cand[0] == out[0] and cand[1].tie_key() < out[1].tie_key()
                ):
                    out = cand
        memo[allowed] = out
        return out

    return best_of(tuple(frozenset(range(n_ads)) for _ in range(k)))[1]


def best_plan_on_path(instance: Instance, p: int, mbar: int | None = None,
                      deadline: float | None = None) -> tuple[Plan, float]:
    """Best plan supported on path ``p`` of the tree, node values weighted by
    their visit probabilities.  ``mbar=None`` solves exactly."""
    nodes = instance.tree.nodes_of_path(p)
    cap = len(nodes) if mbar is None else mbar
    pairs, sw = subset_search(weighted_values(instance, nodes), instance.continuation, cap, deadline)
    return _plan_from_positions(nodes, pairs), sw
