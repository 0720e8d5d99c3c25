"""Allocation over a tree of paths.

``f_em`` is exact (branch-and-bound over the nodes shared by several paths,
with each chain hanging below them solved on its own),
``f_mp`` is the tree dynamic program for instances where no ad is maximal
at two nodes of the same path, and ``f_am`` keeps only the best single path.
Assigning one ad per tree node makes shared nodes agree across the paths
through them by construction.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .exceptions import (EnumerationLimitExceeded, PreconditionError,
                         SearchBudgetExceeded, SearchTimeout)
from .model import Instance, Plan, prefix_count, social_welfare
from .single_path import _priced_suffix, best_plan_on_path, subset_search

_SLACK = 1e-12


# --- restricted-domain tree dynamic program -------------------------------

def _tree_dp(instance: Instance, vmax: np.ndarray, ads):
    """Run the allocate-or-skip recursion bottom-up for every node.

    Returns ``(pi, phi)``: per node, a vector indexed by the number of ads
    shown above it, holding the best subtree value and its ``(node, ad)``
    pairs.  ``ads[n] is None`` marks a node that cannot be filled.
    """
    tree = instance.tree
    lam = instance.continuation
    pi: list[np.ndarray] = [None] * len(tree)
    phi: list[list[tuple]] = [None] * len(tree)
    # breadth-first ids: children always carry larger ids than parents
    for n in range(len(tree) - 1, -1, -1):
        nd = tree.nodes[n]
        size = nd.depth
        own = nd.alpha * lam[:size] * vmax[n] if ads[n] is not None else np.zeros(size)
        if not nd.children:
            pi[n] = own.copy()
            phi[n] = [((n, ads[n]),) if ads[n] is not None else () for _ in range(size)]
            continue
        below = np.zeros(size + 1)
        for ch in nd.children:
            below += pi[ch][: size + 1]
        vec = np.empty(size)
        plans = []
        for i in range(size):
            skip = below[i]
            take = own[i] + below[i + 1]
            if ads[n] is None or skip >= take:
                vec[i] = skip
                plans.append(tuple(x for ch in nd.children for x in phi[ch][i]))
            else:
                vec[i] = take
                plans.append(((n, ads[n]),) + tuple(x for ch in nd.children for x in phi[ch][i + 1]))
        pi[n], phi[n] = vec, plans
    return pi, phi


def check_distinct_maximal_per_path(instance: Instance) -> list[int]:
    """Maximal ad of every node; raises if one repeats along some path."""
    ads = [int(a) for a in instance.values.argmax(axis=0)]
    for p, (_, seq) in enumerate(instance.tree.paths):
        on_path = [ads[n] for n in seq]
        if len(set(on_path)) != len(on_path):
            raise PreconditionError(
                f"path {p} has an ad maximal at two of its nodes; use f_em instead"
            )
    return ads


def f_mp(instance: Instance, n: int | None = None):
    """Tree dynamic program rooted at ``n`` (default: the root).

    Returns ``(pi, phi)`` for that node: ``pi[i]`` is the best value of the
    subtree when ``i`` ads were shown above it, ``phi[i]`` the matching plan.
    """
    if instance.num_ads == 0:
        raise PreconditionError("empty catalog")
    ads = check_distinct_maximal_per_path(instance)
    vmax = instance.values.max(axis=0)
    pi, phi = _tree_dp(instance, vmax, ads)
    n = instance.tree.root if n is None else n
    return pi[n], [Plan(dict(x)) for x in phi[n]]


def f_mp_plan(instance: Instance) -> Plan:
    if instance.num_ads == 0:
        return Plan()
    return f_mp(instance)[1][0]


# --- exact branch-and-bound --------------------------------------------------

@dataclass(frozen=True)
class BnbNode:
    """Search state: nodes with id below ``frontier`` are decided by ``partial``."""
    frontier: int
    partial: Plan


@dataclass(frozen=True)
class BnbResult:
    plan: Plan
    sw: float
    expanded: int
    optimal: bool
    reason: str = ""


def branch_bound_upper(instance: Instance, state: BnbNode) -> float:
    """Value of ``state.partial`` plus, for every undecided node, its best ad
    discounted by the ads already shown above it.  Ignores repeats and the
    extra fatigue later ads would add, so it never underestimates."""
    tree = instance.tree
    if instance.num_ads == 0:
        return 0.0
    vmax = instance.values.max(axis=0)
    lam = instance.continuation
    bound = social_welfare(instance, state.partial, check=False)
    for n in range(state.frontier, len(tree)):
        c = prefix_count(state.partial, tree, n)
        bound += tree.alpha(n) * lam[c] * vmax[n]
    return bound


def relaxed_upper(instance: Instance, state: BnbNode) -> float:
    """Tighter admissible bound used by the search: each undecided subtree is
    solved exactly with repeats allowed (every node may take its best ad)."""
    tree = instance.tree
    if instance.num_ads == 0:
        return 0.0
    vmax = instance.values.max(axis=0)
    pi, _ = _tree_dp(instance, vmax, [0] * len(tree))
    bound = social_welfare(instance, state.partial, check=False)
    for n in range(state.frontier, len(tree)):
        par = tree.parent(n)
        if par is None or par < state.frontier:
            bound += pi[n][prefix_count(state.partial, tree, n)]
    return bound


def _priced_gains(instance: Instance, Z: np.ndarray) -> np.ndarray:
    """``gain[n, c]``: best ``alpha_n * L_c * w[a, n] - Z[a, n]`` over ads,
    floored at 0 (leaving the node empty), for ``c`` ads shown above ``n``."""
    depth = instance.tree.max_depth
    lam = instance.continuation[:depth]
    scaled = instance.values * instance.alphas  # (ads, nodes)
    g = lam[None, :, None] * scaled[:, None, :] - Z[:, None, :]  # (ads, counts, nodes)
    return np.maximum(g.max(axis=0), 0.0).T


def _subtree_bounds(tree, gain: np.ndarray) -> list[np.ndarray]:
    """``out[n][c]``: best subtree value below and at ``n`` with ``c`` ads
    shown above it, each node earning ``gain[n, count]`` if filled.  One
    trailing zero is appended so ``out[n][depth(n)]`` is defined."""
    out: list[np.ndarray] = [None] * len(tree)
    for n in range(len(tree) - 1, -1, -1):
        nd = tree.nodes[n]
        size = nd.depth
        below = np.zeros(size + 1)
        for ch in nd.children:
            below += out[ch][: size + 1]
        vec = np.zeros(size + 1)
        vec[:size] = np.maximum(below[:size], gain[n, :size] + below[1:])
        out[n] = vec
    return out


def _priced_choice(tree, gain, bounds):
    """Nodes filled by an optimal solution of the priced relaxation, with the
    count of filled ancestors of each."""
    chosen = []
    stack = [(tree.root, 0)]
    while stack:
        n, c = stack.pop()
        kids = tree.nodes[n].children
        skip = sum(bounds[ch][c] for ch in kids)
        take = gain[n, c] + sum(bounds[ch][c + 1] for ch in kids)
        if gain[n, c] > 0 and take > skip:
            chosen.append((n, c))
            c += 1
        stack.extend((ch, c) for ch in kids)
    return chosen


def lagrangian_prices(instance: Instance, target: float, iterations: int = 150) -> np.ndarray:
    """Prices ``Z[a, n] = sum of z[a, p]`` over paths ``p`` through ``n`` that
    make the priced relaxation a tight upper bound.

    Relaxing "each ad at most once per path" with prices ``z[a, p] >= 0``
    gives the bound ``sum(z) + best tree plan earning alpha*L*w - Z``, which
    holds for every ``z``.  Subgradient steps toward ``target`` (a known
    feasible welfare) shrink it.
    """
    tree = instance.tree
    n_ads, n_nodes = instance.num_ads, instance.num_nodes
    member = np.zeros((tree.num_paths, n_nodes))
    for p in range(tree.num_paths):
        member[p, list(tree.nodes_of_path(p))] = 1.0
    values = instance.values * instance.alphas
    lam = instance.continuation
    z = np.zeros((n_ads, tree.num_paths))
    best_z, best_val = z, np.inf
    theta, stale = 1.0, 0
    for _ in range(iterations):
        Z = z @ member
        gain = _priced_gains(instance, Z)
        bounds = _subtree_bounds(tree, gain)
        val = float(z.sum() + bounds[tree.root][0])
        if val < best_val - 1e-12 * max(1.0, val):
            best_z, best_val, stale = z, val, 0
        else:
            stale += 1
            if stale >= 5:
                theta, stale = theta / 2, 0
        if best_val <= target * (1 + 1e-9) or theta < 1e-4:
            break
        uses = np.zeros((n_ads, n_nodes))
        for n, c in _priced_choice(tree, gain, bounds):
            a = int(np.argmax(lam[c] * values[:, n] - Z[:, n]))
            uses[a, n] = 1.0
        sub = 1.0 - uses @ member.T  # d bound / d z
        norm = float((sub ** 2).sum())
        if norm == 0.0:
            break
        step = theta * max(val - target, 1e-9 * max(1.0, val)) / norm
        z = np.maximum(z - step * sub, 0.0)
    return best_z @ member


def split_shared(tree) -> tuple[list[int], list[tuple[int, ...]]]:
    """Nodes with at least two leaves below them (the shared part, a
    top-closed set in breadth-first order) and the chains hanging off it.

    Once every shared node is decided, each chain is an independent
    single-path problem.
    """
    leaves = [0] * len(tree)
    for n in range(len(tree) - 1, -1, -1):
        kids = tree.nodes[n].children
        leaves[n] = sum(leaves[ch] for ch in kids) if kids else 1
    shared = [n for n in range(len(tree)) if leaves[n] > 1]
    heads = [tree.root] if not shared else [
        ch for n in shared for ch in tree.nodes[n].children if leaves[ch] == 1
    ]
    chains = []
    for h in sorted(heads):
        seq = [h]
        while tree.nodes[seq[-1]].children:
            seq.append(tree.nodes[seq[-1]].children[0])
        chains.append(tuple(seq))
    return shared, chains


class _Stop(Exception):
    pass


def branch_and_bound(instance: Instance, budget: int | None = None,
                     deadline: float | None = None, incumbent: Plan | None = None) -> BnbResult:
    """Exact search; returns the incumbent with ``optimal=False`` if the node
    budget or the deadline runs out first.

    Branches on the shared nodes in breadth-first order (each takes an ad not
    used above it, or none).  Two bounds prune: every undecided subtree solved
    with repeats allowed, and the same with per-path Lagrangian prices
    (see ``lagrangian_prices``).  When the shared nodes are all decided, the
    hanging chains are solved one by one with the exact single-path search,
    each asked only for plans good enough to beat the incumbent given the
    bounds on the others.  ``budget`` counts branching nodes plus chain solves.
    """
    tree = instance.tree
    n_nodes, n_ads = instance.num_nodes, instance.num_ads
    if n_ads == 0:
        return BnbResult(Plan(), 0.0, 0, True)
    w = instance.values
    alpha = instance.alphas
    lam = instance.continuation
    vmax = w.max(axis=0)
    relax, _ = _tree_dp(instance, vmax, [0] * n_nodes)
    relax = [list(map(float, r)) + [0.0] for r in relax]
    children = [nd.children for nd in tree.nodes]
    # zero-valued ads are never worth their fatigue: the empty ad dominates
    cands = [[int(a) for a in np.argsort(-w[:, n], kind="stable") if w[a, n] > 0] for n in range(n_nodes)]
    shared, chains = split_shared(tree)
    chain_of = {seq[0]: seq for seq in chains}
    chain_w = {h: w[:, list(seq)] * alpha[list(seq)] for h, seq in chain_of.items()}

    if incumbent is None:
        incumbent = Plan()
    best = {"sw": social_welfare(instance, incumbent), "plan": incumbent}
    Z = lagrangian_prices(instance, best["sw"])
    lrelax = [list(map(float, r)) for r in _subtree_bounds(tree, _priced_gains(instance, Z))]
    zconst = float(Z[:, tree.root].sum())  # every path passes through the root

    assign = [-1] * n_nodes
    count = [0] * n_nodes
    used = [0] * n_nodes
    expanded = 0
    memo: dict[tuple, tuple] = {}

    def tick():
        nonlocal expanded
        expanded += 1
        if budget is not None and expanded > budget:
            raise _Stop("budget")
        if deadline is not None and time.monotonic() > deadline:
            raise _Stop("timeout")

    def chain_bound(h):
        c, ban = count[h], used[h]
        allowed = [a for a in range(n_ads) if not ban >> a & 1]
        if not allowed:
            return 0.0
        cw = chain_w[h][allowed]
        k = cw.shape[1]
        _, out = _priced_suffix(cw, np.zeros(len(allowed)), lam[c:c + k], 0)
        return min(relax[h][c], float(out[0, 0]))

    def solve_chain(h, floor):
        """Exact chain optimum as ``(value, pairs)``, or None if below ``floor``."""
        c, ban = count[h], used[h]
        seq = chain_of[h]
        # only banned ads that could earn something on this chain matter
        live = ban & chain_mask[h]
        key = (h, c, live)
        hit = memo.get(key)
        if hit is not None:
            if hit[0] == "exact":
                return None if floor is not None and hit[1] < floor else hit[1:]
            if floor is not None and floor >= hit[1]:
                return None  # an earlier, lower floor already failed
        tick()
        allowed = [a for a in range(n_ads) if not live >> a & 1]
        cw = chain_w[h][allowed]
        try:
            res = subset_search(cw, lam[c:], len(seq), deadline, floor)
        except SearchTimeout:
            raise _Stop("timeout") from None
        if res is None:
            memo[key] = ("below", floor)
            return None
        pairs, val = res
        pairs = tuple((seq[j], allowed[r]) for j, r in pairs)
        memo[key] = ("exact", val, pairs)
        return val, pairs

    chain_mask = {}
    for h, cw in chain_w.items():
        chain_mask[h] = sum(1 << a for a in range(n_ads) if cw[a].max() > 0)

    def finish(acc):
        thresh = best["sw"] - _SLACK * max(1.0, best["sw"])
        ubs = {h: chain_bound(h) for h in chain_of}
        if acc + sum(ubs.values()) < thresh:
            return
        got = {}
        rest = sum(ubs.values())
        for h in sorted(chain_of, key=lambda x: -ubs[x]):
            rest -= ubs[h]
            res = solve_chain(h, thresh - acc - sum(v for v, _ in got.values()) - rest)
            if res is None:
                return
            got[h] = res
        plan = Plan({**{n: a for n, a in enumerate(assign) if a >= 0},
                     **{n: a for _, pairs in got.values() for n, a in pairs}})
        sw = social_welfare(instance, plan, check=False)
        if sw > best["sw"] or (sw == best["sw"] and plan.tie_key() < best["plan"].tie_key()):
            best["sw"], best["plan"] = sw, plan

    def rec(k, acc, fsum, lacc, lsum):
        # acc/fsum: welfare so far and repeats-allowed bound of the rest;
        # lacc/lsum: the same under prices, to which zconst is added
        tick()
        thresh = best["sw"] - _SLACK * max(1.0, best["sw"])
        if acc + fsum < thresh or zconst + lacc + lsum < thresh:
            return
        if k == len(shared):
            finish(acc)
            return
        n = shared[k]
        c = count[n]
        kids = children[n]
        base = fsum - relax[n][c]
        lbase = lsum - lrelax[n][c]
        with_ad = base + sum(relax[ch][c + 1] for ch in kids)
        lwith_ad = lbase + sum(lrelax[ch][c + 1] for ch in kids)
        scale = alpha[n] * lam[c]
        for a in cands[n]:
            if used[n] >> a & 1:
                continue
            val = scale * w[a, n]
            thresh = best["sw"] - _SLACK * max(1.0, best["sw"])
            if acc + val + with_ad < thresh:
                break  # candidates are sorted by value
            lval = val - Z[a, n]
            if zconst + lacc + lval + lwith_ad < thresh:
                continue
            assign[n] = a
            for ch in kids:
                count[ch] = c + 1
                used[ch] = used[n] | (1 << a)
            rec(k + 1, acc + val, with_ad, lacc + lval, lwith_ad)
        assign[n] = -1
        for ch in kids:
            count[ch] = c
            used[ch] = used[n]
        rec(k + 1, acc, base + sum(relax[ch][c] for ch in kids),
            lacc, lbase + sum(lrelax[ch][c] for ch in kids))

    try:
        rec(0, 0.0, relax[tree.root][0], 0.0, lrelax[tree.root][0])
    except _Stop as stop:
        return BnbResult(best["plan"], social_welfare(instance, best["plan"]), expanded, False, str(stop))
    return BnbResult(best["plan"], social_welfare(instance, best["plan"]), expanded, True)


def search_space_size(instance: Instance) -> float:
    """``log10`` of ``(|A|+1)^|N|``, the number of node-to-ad maps."""
    return instance.num_nodes * math.log10(instance.num_ads + 1)


def f_em(instance: Instance, *, budget: int | None = None, deadline: float | None = None,
         max_space_log10: float | None = None, force: bool = False) -> Plan:
    """Welfare-maximizing plan over the whole tree.

    ``max_space_log10`` refuses instances whose raw search space exceeds
    ``10**max_space_log10`` unless ``force`` is set.  Running out of
    ``budget`` expansions or passing ``deadline`` raises with the incumbent
    attached.
    """
    if max_space_log10 is not None and not force and search_space_size(instance) > max_space_log10:
        raise EnumerationLimitExceeded(
            f"search space 10^{search_space_size(instance):.1f} exceeds 10^{max_space_log10}; "
            "pass force=True to run anyway"
        )
    start = f_am(instance, mbar=2) if instance.num_ads else Plan()
    res = branch_and_bound(instance, budget=budget, deadline=deadline, incumbent=start)
    if not res.optimal:
        if res.reason == "timeout":
            raise SearchTimeout("branch-and-bound passed its deadline", result=res)
        raise SearchBudgetExceeded(res)
    return res.plan


# --- best single path ---------------------------------------------------------

def f_am_detail(instance: Instance, mbar: int | None = None, exact_per_path: bool = False,
                deadline: float | None = None) -> tuple[Plan, float, int]:
    """Solve every path on its own and keep the best one.

    Returns ``(plan, welfare, path index)``; the lowest path index wins ties.
    """
    if not exact_per_path and (mbar is None or mbar < 1):
        raise ValueError("mbar must be at least 1 unless exact_per_path is set")
    best = (Plan(), 0.0, 0)
    for p in range(instance.tree.num_paths):
        plan, sw = best_plan_on_path(instance, p, None if exact_per_path else mbar, deadline)
        if p == 0 or sw > best[1]:
            best = (plan, sw, p)
    return best


def f_am(instance: Instance, mbar: int | None = None, exact_per_path: bool = False,
         deadline: float | None = None) -> Plan:
    return f_am_detail(instance, mbar, exact_per_path, deadline)[0]
